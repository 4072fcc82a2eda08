//! Lorentzian bath: fidelity for a few memory times, closed form vs Volterra.
//!
//! cargo run --example exponential_memory

use central_spin::propagator::{analytic_exponential, solve_volterra, TimeGrid};
use central_spin::{KernelSpec, TwoTimeKernel};

fn main() -> central_spin::Result<()> {
    let grid = TimeGrid::new(12.0, 12_000)?;
    println!("{:>8} {:>10} {:>10} {:>10}", "γ₀/Γ", "F(Γt=1)", "F(Γt=12)", "max|Δ|");
    for ratio in [0.2, 0.5, 2.0, 5.0, 50.0] {
        let exact = analytic_exponential(1.0, ratio, grid)?;
        let kernel = TwoTimeKernel::uncontrolled(KernelSpec::exponential(1.0, ratio)?)?;
        let numeric = solve_volterra(&kernel, grid)?;
        let err = exact.g_tilde.iter().zip(&numeric.g_tilde).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let f = exact.fidelity();
        println!("{ratio:>8} {:>10.6} {:>10.6} {err:>10.2e}", f[1000], f[12_000]);
    }
    Ok(())
}
