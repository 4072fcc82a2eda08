//! Random rectangular pulses against baths of decreasing memory time.
//!
//! cargo run --release --example leo_control

use central_spin::propagator::TimeGrid;
use central_spin::scenario::figures::{control_gain, fig3_pulses, FIG3_STEPS, FIG3_T_MAX};

fn main() -> central_spin::Result<()> {
    let pulses = fig3_pulses();
    println!("τ = {}, κ = {}, Ψ = {}, seed = {}", pulses.tau, pulses.kappa, pulses.psi, pulses.seed);
    println!("{:>8} {:>8} {:>10} {:>8} {:>12}", "γ₀/Γ", "free", "controlled", "gain", "suppression");
    for ratio in [0.2, 1.0, 5.0, 1000.0] {
        let steps = if ratio > 100.0 { 500_000 } else { FIG3_STEPS };
        let g = control_gain(ratio, &pulses, TimeGrid::new(FIG3_T_MAX, steps)?)?;
        println!(
            "{ratio:>8} {:>8.4} {:>10.4} {:>8.4} {:>12.2}",
            g.free_mean,
            g.controlled_mean,
            g.gain(),
            g.suppression()
        );
    }
    Ok(())
}
