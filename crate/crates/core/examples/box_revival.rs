//! Homogeneous bath: periodic revivals at Δt = 2nπ and the minimum |Ω|/Δ.
//!
//! cargo run --example box_revival

use std::f64::consts::PI;

use central_spin::kernels::box_delta;
use central_spin::propagator::{analytic_box, solve_volterra, TimeGrid};
use central_spin::{KernelSpec, TwoTimeKernel};

fn main() -> central_spin::Result<()> {
    let (omega, acal) = (0.5, 2.0);
    for n in [1, 16, 256] {
        let delta = box_delta(omega, acal, n)?;
        let grid = TimeGrid::new(3.0 * 2.0 * PI / delta, 6000)?;
        let exact = analytic_box(omega, acal, n, grid)?.fidelity();
        let kernel = TwoTimeKernel::uncontrolled(KernelSpec::box_model(acal, n, omega)?)?;
        let numeric = solve_volterra(&kernel, grid)?.fidelity();
        let min = exact.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("N = {n:>3}  Δ = {delta:.4}  min F = {min:.6} (|Ω|/Δ = {:.6})", omega.abs() / delta);
        for period in 1..=3 {
            let k = period * 2000;
            println!("    Δt = {period}·2π: analytic {:.8}  volterra {:.8}", exact[k], numeric[k]);
        }
    }
    Ok(())
}
