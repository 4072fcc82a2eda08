//! Time-local shift and rate, and the qubit state from the exact map and
//! from integrating the master equation.
//!
//! cargo run --example tcl_master_equation

use central_spin::propagator::{solve_volterra, TimeGrid};
use central_spin::tcl::{coefficients, evolve_exact, evolve_tcl_direct};
use central_spin::{Complex64, KernelSpec, QubitState, TwoTimeKernel};

fn main() -> central_spin::Result<()> {
    let grid = TimeGrid::new(4.0, 4000)?;
    let kernel = TwoTimeKernel::uncontrolled(KernelSpec::box_model(2.0, 16, 0.5)?)?;
    let series = solve_volterra(&kernel, grid)?.with_overhauser(1.0);
    let coeffs = coefficients(&series);

    let rho0 = QubitState::new(0.5, Complex64::new(0.5, 0.0))?;
    let exact = evolve_exact(&rho0, &series);
    let tcl = evolve_tcl_direct(&rho0, &coeffs);

    println!("{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "t", "γ", "S", "ρ₁₁", "|ρ₁₀|", "Δ(map,eq)");
    for k in (0..grid.len()).step_by(400) {
        let (a, b) = (&exact[k], &tcl.states[k]);
        println!(
            "{:>5.2} {:>9.4} {:>9.4} {:>9.5} {:>9.5} {:>9.1e}",
            grid.t(k),
            coeffs.gamma[k],
            coeffs.shift[k],
            a.rho11(),
            a.rho10().norm(),
            a.max_abs_diff(b)
        );
    }
    Ok(())
}
