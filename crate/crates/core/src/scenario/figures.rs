//! Data behind the three standard figures, in units where `Γ = 1` (figures
//! 1 and 3) or `μ = 1` (figure 2).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{time_average, write_atomic};
use crate::control::{PulseSequence, TwoTimeKernel};
use crate::error::Result;
use crate::kernels::KernelSpec;
use crate::propagator::{analytic_exponential, solve_volterra, TimeGrid};

/// Figure 1 spans `Γt ∈ [0, 15]`; the `γ₀/Γ = 0.2` revival peaks near 10.5.
pub const FIG1_T_MAX: f64 = 15.0;
pub const FIG1_STEPS: usize = 1500;
/// `γ₀/Γ = 0.1, 0.2, …, 5.0`.
pub const FIG1_RATIOS: usize = 50;

pub const FIG2_SIZES: [usize; 3] = [10_000, 100_000, 1_000_000];
pub const FIG2_ACAL: f64 = 100.0;
pub const FIG2_NU: f64 = 0.5;
pub const FIG2_T_MAX: f64 = 10.0;
pub const FIG2_STEPS: usize = 20_000;

pub const FIG3_RATIOS: [f64; 3] = [0.2, 1.0, 5.0];
pub const FIG3_T_MAX: f64 = 5.0;
pub const FIG3_STEPS: usize = 10_000;
pub const FIG3_TAU: f64 = 0.02;
pub const FIG3_KAPPA: f64 = 0.01;
pub const FIG3_PSI: f64 = 0.2;
pub const FIG3_SEED: u64 = 20_160_331;

#[derive(Debug, Clone)]
pub struct Fig1 {
    pub ratios: Vec<f64>,
    pub grid: TimeGrid,
    /// `fidelity[i][k]` for `ratios[i]` at node `k`.
    pub fidelity: Vec<Vec<f64>>,
}

pub fn fig1_data() -> Result<Fig1> {
    let grid = TimeGrid::new(FIG1_T_MAX, FIG1_STEPS)?;
    let ratios: Vec<f64> = (1..=FIG1_RATIOS).map(|k| k as f64 / 10.0).collect();
    let fidelity = ratios
        .par_iter()
        .map(|&r| Ok(analytic_exponential(1.0, r, grid)?.fidelity()))
        .collect::<Result<_>>()?;
    Ok(Fig1 { ratios, grid, fidelity })
}

impl Fig1 {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma0_over_Gamma,Gamma_t,fidelity\n");
        for (r, curve) in self.ratios.iter().zip(&self.fidelity) {
            for (t, f) in self.grid.times().zip(curve) {
                let _ = writeln!(out, "{r},{t},{f}");
            }
        }
        out
    }
}

pub fn fig1(dir: &Path) -> Result<PathBuf> {
    let path = dir.join("fig1.csv");
    write_atomic(&path, &fig1_data()?.to_csv())?;
    Ok(path)
}

#[derive(Debug, Clone)]
pub struct Fig2 {
    pub sizes: Vec<usize>,
    pub grid: TimeGrid,
    pub fidelity: Vec<Vec<f64>>,
}

pub fn fig2_data() -> Result<Fig2> {
    let grid = TimeGrid::new(FIG2_T_MAX, FIG2_STEPS)?;
    let sizes = FIG2_SIZES.to_vec();
    let fidelity = sizes
        .par_iter()
        .map(|&n| {
            let kernel = TwoTimeKernel::uncontrolled(KernelSpec::gaussian_bath(FIG2_ACAL, n, FIG2_NU)?)?;
            Ok(solve_volterra(&kernel, grid)?.fidelity())
        })
        .collect::<Result<_>>()?;
    Ok(Fig2 { sizes, grid, fidelity })
}

impl Fig2 {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,mu_t,fidelity\n");
        for (n, curve) in self.sizes.iter().zip(&self.fidelity) {
            for (t, f) in self.grid.times().zip(curve) {
                let _ = writeln!(out, "{n},{t},{f}");
            }
        }
        out
    }
}

pub fn fig2(dir: &Path) -> Result<PathBuf> {
    let path = dir.join("fig2.csv");
    write_atomic(&path, &fig2_data()?.to_csv())?;
    Ok(path)
}

/// The random pulse train used for figure 3.
pub fn fig3_pulses() -> PulseSequence {
    PulseSequence::random(FIG3_TAU, FIG3_KAPPA, FIG3_PSI, FIG3_SEED).expect("figure 3 pulse parameters are valid")
}

#[derive(Debug, Clone)]
pub struct Fig3 {
    pub ratios: Vec<f64>,
    pub grid: TimeGrid,
    pub free: Vec<Vec<f64>>,
    pub controlled: Vec<Vec<f64>>,
}

pub fn fig3_data() -> Result<Fig3> {
    let grid = TimeGrid::new(FIG3_T_MAX, FIG3_STEPS)?;
    let ratios = FIG3_RATIOS.to_vec();
    let pulses = fig3_pulses();
    let curves: Vec<(Vec<f64>, Vec<f64>)> = ratios
        .par_iter()
        .map(|&r| {
            let free = analytic_exponential(1.0, r, grid)?.fidelity();
            let kernel = TwoTimeKernel::new(KernelSpec::exponential(1.0, r)?, pulses.clone())?;
            let controlled = solve_volterra(&kernel, grid)?.fidelity();
            Ok((free, controlled))
        })
        .collect::<Result<_>>()?;
    let (free, controlled) = curves.into_iter().unzip();
    Ok(Fig3 { ratios, grid, free, controlled })
}

impl Fig3 {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma0_over_Gamma,controlled,Gamma_t,fidelity\n");
        for (i, r) in self.ratios.iter().enumerate() {
            for (flag, curve) in [(0, &self.free[i]), (1, &self.controlled[i])] {
                for (t, f) in self.grid.times().zip(curve) {
                    let _ = writeln!(out, "{r},{flag},{t},{f}");
                }
            }
        }
        out
    }
}

pub fn fig3(dir: &Path) -> Result<PathBuf> {
    let path = dir.join("fig3.csv");
    write_atomic(&path, &fig3_data()?.to_csv())?;
    Ok(path)
}

/// Time-averaged fidelity with and without pulses, both from the Volterra
/// solver on the same grid (`Γ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGain {
    pub free_mean: f64,
    pub controlled_mean: f64,
}

impl ControlGain {
    pub fn gain(&self) -> f64 {
        self.controlled_mean - self.free_mean
    }

    /// Ratio of the residual infidelities, free over controlled.
    pub fn suppression(&self) -> f64 {
        (1.0 - self.free_mean) / (1.0 - self.controlled_mean)
    }
}

pub fn control_gain(gamma0_over_gamma: f64, pulses: &PulseSequence, grid: TimeGrid) -> Result<ControlGain> {
    let base = KernelSpec::exponential(1.0, gamma0_over_gamma)?;
    let free = solve_volterra(&TwoTimeKernel::uncontrolled(base.clone())?, grid)?.fidelity();
    let controlled = solve_volterra(&TwoTimeKernel::new(base, pulses.clone())?, grid)?.fidelity();
    Ok(ControlGain { free_mean: time_average(&free, grid), controlled_mean: time_average(&controlled, grid) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_examples() {
        let fig = fig1_data().unwrap();
        assert_eq!(fig.ratios.len(), 50);
        assert!(fig.fidelity.iter().all(|f| f[0] == 1.0));
        let two = fig.ratios.iter().position(|r| *r == 2.0).unwrap();
        assert!((fig.fidelity[two][100] - 0.735759).abs() < 1e-6);

        let slow = &fig.fidelity[1];
        assert_eq!(fig.ratios[1], 0.2);
        let zero = slow.windows(2).position(|w| w[1] > w[0]).unwrap();
        assert!(slow[zero] < 1e-2);
        assert!(slow[zero + 1..].windows(3).any(|w| w[1] >= w[0] && w[1] > w[2]));
    }

    #[test]
    fn fig1_csv_layout() {
        let csv = fig1_data().unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("gamma0_over_Gamma,Gamma_t,fidelity"));
        assert_eq!(lines.next(), Some("0.1,0,1"));
        assert_eq!(csv.lines().count(), 1 + FIG1_RATIOS * (FIG1_STEPS + 1));
    }

    #[test]
    fn fig2_examples() {
        let fig = fig2_data().unwrap();
        assert!(fig.fidelity.iter().all(|f| f[0] == 1.0));
        let means: Vec<f64> = fig.fidelity.iter().map(|f| time_average(f, fig.grid)).collect();
        assert!(means.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn fig3_controlled_beats_free_for_long_memory() {
        let fig = fig3_data().unwrap();
        let end = fig.grid.n_steps();
        assert_eq!(fig.ratios[0], 0.2);
        assert!(fig.controlled[0][end] > fig.free[0][end]);
        assert!(fig.to_csv().starts_with("gamma0_over_Gamma,controlled,Gamma_t,fidelity\n0.2,0,0,1\n"));
    }
}
