//! Gaussian-distributed couplings: coherence becomes more robust as N grows.
//!
//! cargo run --release --example gaussian_bath

use central_spin::scenario::figures::fig2_data;
use central_spin::scenario::time_average;

fn main() -> central_spin::Result<()> {
    let fig = fig2_data()?;
    for (n, f) in fig.sizes.iter().zip(&fig.fidelity) {
        let min = f.iter().cloned().fold(f64::INFINITY, f64::min);
        println!("N = {n:>8}  mean F = {:.6}  min F = {min:.6}", time_average(f, fig.grid));
    }
    Ok(())
}
