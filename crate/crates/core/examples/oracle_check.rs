//! Finite-bath amplitude integration against the reduced solver.
//!
//! cargo run --release --example oracle_check

use central_spin::kernels::box_detuning;
use central_spin::oracle::{compare_reduced, evolve_amplitudes, sample_bath, BathRealization};
use central_spin::propagator::{solve_volterra, TimeGrid};
use central_spin::{KernelSpec, PulseSequence, TwoTimeKernel};

fn main() -> central_spin::Result<()> {
    let grid = TimeGrid::new(20.0, 20_000)?;
    let (acal, omega0) = (2.0, 1.5);

    for (label, pulses) in [("no pulses", PulseSequence::off()), ("random pulses", PulseSequence::random(0.1, 0.05, 0.5, 1)?)] {
        for n in [4, 64, 1024] {
            let bath = BathRealization::homogeneous(acal, n, 0.0)?;
            let omega = box_detuning(omega0, 0.0, acal, n)?;
            let oracle = evolve_amplitudes(&bath, omega0, grid, &pulses)?;
            let kernel = TwoTimeKernel::new(KernelSpec::box_model(acal, n, omega)?, pulses.clone())?;
            let reduced = solve_volterra(&kernel, grid)?.with_overhauser(0.5 * acal);
            let report = compare_reduced(&oracle, &reduced)?;
            println!(
                "{label:>14}  N = {n:>4}  max|ΔG̃| = {:.2e}  norm drift = {:.1e}",
                report.max_abs,
                oracle.max_norm_drift()
            );
        }
    }

    // inhomogeneous couplings: the box kernel is only an approximation
    let bath = sample_bath(1024, acal / 1024.0, 0.5 * acal / 1024.0, 0.0, 0.05, 7)?;
    let omega = box_detuning(omega0, 0.0, acal, 1024)?;
    let oracle = evolve_amplitudes(&bath, omega0, grid, &PulseSequence::off())?;
    let kernel = TwoTimeKernel::uncontrolled(KernelSpec::box_model(acal, 1024, omega)?)?;
    let reduced = solve_volterra(&kernel, grid)?.with_overhauser(0.5 * acal);
    println!("sampled bath vs box kernel: max|ΔG̃| = {:.2e}", compare_reduced(&oracle, &reduced)?.max_abs);
    Ok(())
}
