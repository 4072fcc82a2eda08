//! Brute-force reference: integrate the single-exciton amplitudes of an
//! explicit finite bath.
//!
//! With `c₀` the amplitude of `|1⟩|0⟩_E` and `c_k` that of `|0⟩σ_k⁺|0⟩_E`,
//!
//! ```text
//! ċ₀  = i h c₀ - i Σ_k (A_k/2) e^{iθ_k t} c_k
//! ċ_k = -i (A_k/2) e^{-iθ_k t} c₀,        θ_k = ω₀ - ω_k + A_k/2
//! ```
//!
//! starting from `c₀ = 1`, `c_k = 0` (fully polarized bath). The
//! integration runs in the frame `b_k = c_k e^{i(θ_k - h)t}`,
//! `ĉ₀ = c₀ e^{-iht}`, where the system is autonomous and the Overhauser
//! rotation is removed.
//!
//! Pulses enter as `H_L = -(r/2)σ_z`: `ĉ₀` picks up `+i(r/2)` and each
//! `b_k` picks up `-i(r/2)`. Eliminating the bath then yields exactly the
//! kernel phase `e^{-i∫ₛᵗ r}`; the residual local phase `e^{+iR̃/2}` on `ĉ₀`
//! is stripped from the reported `G̃`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::control::{PhaseTable, PulseSequence};
use crate::error::{Error, Result};
use crate::propagator::{PropagatorSeries, TimeGrid};

/// Largest tolerated `dt · rate` for the RK4 step.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;

/// Norm drift that aborts an oracle run.
pub const MAX_NORM_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BathRealization {
    pub couplings: Vec<f64>,
    pub frequencies: Vec<f64>,
}

impl BathRealization {
    pub fn new(couplings: Vec<f64>, frequencies: Vec<f64>) -> Result<Self> {
        let bath = BathRealization { couplings, frequencies };
        bath.validate()?;
        Ok(bath)
    }

    /// Homogeneous bath `A_k = 𝒜/N`, `ω_k = ω`.
    pub fn homogeneous(acal: f64, n: usize, omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("bath size N must be >= 1".into()));
        }
        Self::new(vec![acal / n as f64; n], vec![omega; n])
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings.is_empty() || self.couplings.len() != self.frequencies.len() {
            return Err(Error::InvalidParameter(format!(
                "bath needs equal, nonzero numbers of couplings and frequencies (got {} and {})",
                self.couplings.len(),
                self.frequencies.len()
            )));
        }
        if self.couplings.iter().chain(&self.frequencies).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("bath parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.couplings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.couplings.is_empty()
    }
}

/// Draw `A_k ~ N(muA, nuA²)` and `ω_k ~ N(w_mean, w_spread²)`, i.i.d.
pub fn sample_bath(n: usize, mu_a: f64, nu_a: f64, w_mean: f64, w_spread: f64, seed: u64) -> Result<BathRealization> {
    if n == 0 {
        return Err(Error::InvalidParameter("bath size N must be >= 1".into()));
    }
    if !(nu_a >= 0.0 && w_spread >= 0.0) {
        return Err(Error::InvalidParameter(format!("spreads must be >= 0, got ({nu_a}, {w_spread})")));
    }
    let couplings_dist = Normal::new(mu_a, nu_a).map_err(|e| Error::InvalidParameter(format!("coupling spread: {e}")))?;
    let freq_dist = Normal::new(w_mean, w_spread).map_err(|e| Error::InvalidParameter(format!("frequency spread: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let couplings = (0..n).map(|_| couplings_dist.sample(&mut rng)).collect();
    let frequencies = (0..n).map(|_| freq_dist.sample(&mut rng)).collect();
    BathRealization::new(couplings, frequencies)
}

/// `h = Σ A_k / 2`.
pub fn overhauser_shift(bath: &BathRealization) -> f64 {
    0.5 * bath.couplings.iter().sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct AmplitudeTrajectory {
    pub grid: TimeGrid,
    /// Lab-frame `c₀(t)`.
    pub c0: Vec<Complex64>,
    /// `c₀ e^{-iht}` with the pulse self-phase removed; directly comparable
    /// with a Volterra solution.
    pub g_tilde: Vec<Complex64>,
    pub dg_tilde: Vec<Complex64>,
    /// `|c₀|² + Σ|c_k|²`.
    pub norm: Vec<f64>,
    /// `c_k(t)` per node, when requested.
    pub modes: Option<Vec<Vec<Complex64>>>,
    pub h: f64,
}

impl AmplitudeTrajectory {
    pub fn fidelity(&self) -> Vec<f64> {
        self.g_tilde.iter().map(|g| g.norm()).collect()
    }

    pub fn as_series(&self) -> PropagatorSeries {
        PropagatorSeries { grid: self.grid, g_tilde: self.g_tilde.clone(), dg_tilde: self.dg_tilde.clone(), h: self.h }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - self.norm[0]).abs()).fold(0.0, f64::max)
    }
}

struct Amplitudes {
    c0: Complex64,
    modes: Vec<Complex64>,
}

/// Amplitudes `ȳ₀ = ĉ₀ e^{-iR̃/2}`, `ȳ_k = b̂_k e^{iR̃/2}`: the pulse enters
/// only through the continuous phase `e^{±iR̃}` on the couplings, so RK4
/// never steps across a jump in `r(t)`.
struct System {
    half_coupling: Vec<f64>,
    /// `θ_k - h`
    detuning: Vec<f64>,
    phases: PhaseTable,
}

impl System {
    fn collective(&self, modes: &[Complex64]) -> Complex64 {
        self.half_coupling.iter().zip(modes).map(|(a, b)| a * b).sum()
    }

    fn rhs(&self, t: f64, y: &Amplitudes, out: &mut Amplitudes) {
        let i = Complex64::i();
        let rot = Complex64::from_polar(1.0, self.phases.phase_at(t));
        out.c0 = -i * rot.conj() * self.collective(&y.modes);
        let drive = i * rot * y.c0;
        for (((o, b), a), d) in out.modes.iter_mut().zip(&y.modes).zip(&self.half_coupling).zip(&self.detuning) {
            *o = i * d * b - a * drive;
        }
    }
}

/// Integrate the amplitude equations with RK4; `c_k` snapshots are dropped.
pub fn evolve_amplitudes(bath: &BathRealization, omega0: f64, grid: TimeGrid, pulses: &PulseSequence) -> Result<AmplitudeTrajectory> {
    evolve(bath, omega0, grid, pulses, false)
}

/// As [`evolve_amplitudes`], keeping `c_k(t)` at every node.
pub fn evolve_amplitudes_with_modes(bath: &BathRealization, omega0: f64, grid: TimeGrid, pulses: &PulseSequence) -> Result<AmplitudeTrajectory> {
    evolve(bath, omega0, grid, pulses, true)
}

fn evolve(bath: &BathRealization, omega0: f64, grid: TimeGrid, pulses: &PulseSequence, keep_modes: bool) -> Result<AmplitudeTrajectory> {
    bath.validate()?;
    pulses.validate()?;
    if !omega0.is_finite() {
        return Err(Error::InvalidParameter(format!("omega0 must be finite, got {omega0}")));
    }
    let h = overhauser_shift(bath);
    let theta: Vec<f64> = bath.couplings.iter().zip(&bath.frequencies).map(|(a, w)| omega0 - w + 0.5 * a).collect();
    let system = System {
        half_coupling: bath.couplings.iter().map(|a| 0.5 * a).collect(),
        detuning: theta.iter().map(|th| th - h).collect(),
        phases: pulses.phase_table(grid.t_max()),
    };

    let collective_rate = system.half_coupling.iter().map(|a| a * a).sum::<f64>().sqrt();
    let max_detuning = system.detuning.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rate = max_detuning + collective_rate + 0.5 * pulses.peak_amplitude();
    let dt = grid.dt();
    if dt * rate >= MAX_PHASE_PER_STEP {
        return Err(Error::StepTooCoarse(dt * rate));
    }

    let n_modes = bath.len();
    let zero = Complex64::new(0.0, 0.0);
    let blank = || Amplitudes { c0: zero, modes: vec![zero; n_modes] };
    let mut y = Amplitudes { c0: Complex64::new(1.0, 0.0), modes: vec![zero; n_modes] };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (blank(), blank(), blank(), blank(), blank());

    let nodes = grid.len();
    let mut c0 = Vec::with_capacity(nodes);
    let mut g_tilde = Vec::with_capacity(nodes);
    let mut dg_tilde = Vec::with_capacity(nodes);
    let mut norm = Vec::with_capacity(nodes);
    let mut modes = keep_modes.then(|| Vec::with_capacity(nodes));

    let mut record = |k: usize, y: &Amplitudes, system: &System| -> Result<()> {
        let t = grid.t(k);
        let half = Complex64::from_polar(1.0, 0.5 * system.phases.phase_at(t));
        let total = y.c0.norm_sqr() + y.modes.iter().map(|b| b.norm_sqr()).sum::<f64>();
        if !total.is_finite() {
            return Err(Error::NonFinite { node: k, t });
        }
        if (total - 1.0).abs() > MAX_NORM_DRIFT {
            return Err(Error::NormDrift { node: k, drift: total - 1.0 });
        }
        c0.push(y.c0 * half * Complex64::from_polar(1.0, h * t));
        g_tilde.push(y.c0);
        dg_tilde.push(-Complex64::i() * system.collective(&y.modes) * (half * half).conj());
        norm.push(total);
        if let Some(store) = modes.as_mut() {
            // back to the interaction-picture amplitudes c_k = ȳ_k e^{-iR̃/2} e^{-i(θ_k - h)t}
            let snapshot = y
                .modes
                .iter()
                .zip(&system.detuning)
                .map(|(b, d)| b * half.conj() * Complex64::from_polar(1.0, -d * t))
                .collect();
            store.push(snapshot);
        }
        Ok(())
    };

    record(0, &y, &system)?;
    for k in 0..nodes - 1 {
        let t = grid.t(k);
        let step = grid.t(k + 1) - t;
        system.rhs(t, &y, &mut k1);
        combine(&y, 0.5 * step, &k1, &mut tmp);
        system.rhs(t + 0.5 * step, &tmp, &mut k2);
        combine(&y, 0.5 * step, &k2, &mut tmp);
        system.rhs(t + 0.5 * step, &tmp, &mut k3);
        combine(&y, step, &k3, &mut tmp);
        system.rhs(t + step, &tmp, &mut k4);
        let w = step / 6.0;
        y.c0 += w * (k1.c0 + 2.0 * k2.c0 + 2.0 * k3.c0 + k4.c0);
        for (j, b) in y.modes.iter_mut().enumerate() {
            *b += w * (k1.modes[j] + 2.0 * k2.modes[j] + 2.0 * k3.modes[j] + k4.modes[j]);
        }
        record(k + 1, &y, &system)?;
    }

    Ok(AmplitudeTrajectory { grid, c0, g_tilde, dg_tilde, norm, modes, h })
}

fn combine(y: &Amplitudes, s: f64, k: &Amplitudes, out: &mut Amplitudes) {
    out.c0 = y.c0 + s * k.c0;
    for ((o, a), b) in out.modes.iter_mut().zip(&y.modes).zip(&k.modes) {
        *o = a + s * b;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub max_abs: f64,
    pub rms: f64,
}

/// Max and RMS of `|G̃_oracle - G̃_reduced|` over the nodes.
pub fn compare_reduced(traj: &AmplitudeTrajectory, series: &PropagatorSeries) -> Result<ErrorReport> {
    if traj.grid != series.grid || traj.g_tilde.len() != series.g_tilde.len() {
        return Err(Error::GridMismatch(format!(
            "oracle grid ({}, {} steps) vs reduced grid ({}, {} steps)",
            traj.grid.t_max(),
            traj.grid.n_steps(),
            series.grid.t_max(),
            series.grid.n_steps()
        )));
    }
    let mut max_abs: f64 = 0.0;
    let mut sq = 0.0;
    for (a, b) in traj.g_tilde.iter().zip(&series.g_tilde) {
        let d = (a - b).norm();
        max_abs = max_abs.max(d);
        sq += d * d;
    }
    Ok(ErrorReport { max_abs, rms: (sq / traj.g_tilde.len() as f64).sqrt() })
}

/// Distribution a bath ensemble is drawn from (see [`sample_bath`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathDistribution {
    pub n: usize,
    pub coupling_mean: f64,
    pub coupling_spread: f64,
    pub freq_mean: f64,
    pub freq_spread: f64,
}

/// Mean fidelity `|G̃|` over `realizations` baths; realization `i` uses
/// seed `master_seed + i`. Realizations run in parallel and are reduced in
/// index order, so the result does not depend on the worker count.
pub fn ensemble_fidelity(
    dist: &BathDistribution,
    realizations: usize,
    master_seed: u64,
    omega0: f64,
    grid: TimeGrid,
    pulses: &PulseSequence,
) -> Result<Vec<f64>> {
    if realizations == 0 {
        return Err(Error::InvalidParameter("need at least one realization".into()));
    }
    let runs: Vec<Vec<f64>> = (0..realizations)
        .into_par_iter()
        .map(|i| {
            let bath = sample_bath(
                dist.n,
                dist.coupling_mean,
                dist.coupling_spread,
                dist.freq_mean,
                dist.freq_spread,
                master_seed.wrapping_add(i as u64),
            )?;
            Ok(evolve_amplitudes(&bath, omega0, grid, pulses)?.fidelity())
        })
        .collect::<Result<_>>()?;
    let mut mean = vec![0.0; grid.len()];
    for run in &runs {
        for (m, f) in mean.iter_mut().zip(run) {
            *m += f;
        }
    }
    let scale = 1.0 / realizations as f64;
    Ok(mean.into_iter().map(|m| m * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{box_delta, box_detuning};
    use crate::propagator::analytic_box;

    #[test]
    fn degenerate_sampling_is_the_box_model() {
        let bath = sample_bath(8, 0.25, 0.0, 1.5, 0.0, 1).unwrap();
        assert!(bath.couplings.iter().all(|a| *a == 0.25));
        assert!(bath.frequencies.iter().all(|w| *w == 1.5));
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        let a = sample_bath(100_000, 1.0, 0.5, 0.0, 0.1, 42).unwrap();
        let b = sample_bath(100_000, 1.0, 0.5, 0.0, 0.1, 42).unwrap();
        assert_eq!(a, b);
        let mean = a.couplings.iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 1.0).abs() < 0.01);
        assert!(sample_bath(0, 1.0, 0.5, 0.0, 0.0, 1).is_err());
        assert!(sample_bath(3, 1.0, -0.5, 0.0, 0.0, 1).is_err());
    }

    #[test]
    fn overhauser_examples() {
        let zero = BathRealization::new(vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert_eq!(overhauser_shift(&zero), 0.0);
        let b = BathRealization::new(vec![1.0, 2.0, 3.0], vec![0.0; 3]).unwrap();
        assert_eq!(overhauser_shift(&b), 3.0);
        let b = BathRealization::homogeneous(6.0, 12, 0.0).unwrap();
        assert!((overhauser_shift(&b) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn decoupled_bath_is_static() {
        let bath = BathRealization::new(vec![0.0; 4], vec![0.3; 4]).unwrap();
        let traj = evolve_amplitudes(&bath, 0.5, TimeGrid::new(5.0, 100).unwrap(), &PulseSequence::off()).unwrap();
        assert!(traj.c0.iter().all(|c| *c == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn single_spin_rabi() {
        // N = 1, A = 1 on resonance: Ω = 0, Δ = 1, G̃ = cos(t/2)
        let bath = BathRealization::homogeneous(1.0, 1, 0.0).unwrap();
        let omega0 = 0.0;
        assert_eq!(box_detuning(omega0, 0.0, 1.0, 1).unwrap(), 0.0);
        let grid = TimeGrid::new(8.0 * std::f64::consts::PI, 20_000).unwrap();
        let traj = evolve_amplitudes(&bath, omega0, grid, &PulseSequence::off()).unwrap();
        for (t, g) in grid.times().zip(&traj.g_tilde) {
            assert!((g.norm() - (0.5 * t).cos().abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn homogeneous_bath_reproduces_closed_form() {
        let (n, acal, omega_bath, omega0) = (4, 2.0, 0.3, 1.1);
        let bath = BathRealization::homogeneous(acal, n, omega_bath).unwrap();
        let omega = box_detuning(omega0, omega_bath, acal, n).unwrap();
        let delta = box_delta(omega, acal, n).unwrap();
        let grid = TimeGrid::new(3.0 * 2.0 * std::f64::consts::PI / delta, 6_000).unwrap();
        let traj = evolve_amplitudes_with_modes(&bath, omega0, grid, &PulseSequence::off()).unwrap();
        let exact = analytic_box(omega, acal, n, grid).unwrap();
        let report = compare_reduced(&traj, &exact).unwrap();
        assert!(report.max_abs <= 1e-6, "{report:?}");
        assert!(traj.max_norm_drift() <= 1e-8);
        // lab-frame amplitude carries the Overhauser phase
        let lab = exact.to_lab_frame();
        assert!(traj.c0.iter().zip(&lab).all(|(a, b)| (a - b).norm() < 1e-6));
        let modes = traj.modes.as_ref().unwrap();
        assert_eq!(modes.len(), grid.len());
        let last = grid.len() - 1;
        let total = traj.c0[last].norm_sqr() + modes[last].iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn coarse_steps_are_refused() {
        let bath = BathRealization::homogeneous(10.0, 4, 0.0).unwrap();
        let err = evolve_amplitudes(&bath, 50.0, TimeGrid::new(10.0, 100).unwrap(), &PulseSequence::off()).unwrap_err();
        assert!(matches!(err, Error::StepTooCoarse(_)));
    }

    #[test]
    fn compare_identical_and_mismatched() {
        let bath = BathRealization::homogeneous(1.0, 2, 0.0).unwrap();
        let grid = TimeGrid::new(2.0, 200).unwrap();
        let traj = evolve_amplitudes(&bath, 0.2, grid, &PulseSequence::off()).unwrap();
        let report = compare_reduced(&traj, &traj.as_series()).unwrap();
        assert_eq!(report, ErrorReport { max_abs: 0.0, rms: 0.0 });
        let other = analytic_box(0.1, 1.0, 2, TimeGrid::new(2.0, 100).unwrap()).unwrap();
        assert!(matches!(compare_reduced(&traj, &other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn ensemble_is_deterministic() {
        let dist = BathDistribution { n: 16, coupling_mean: 0.25, coupling_spread: 0.05, freq_mean: 0.0, freq_spread: 0.0 };
        let grid = TimeGrid::new(5.0, 500).unwrap();
        let a = ensemble_fidelity(&dist, 6, 9, 2.0, grid, &PulseSequence::off()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| ensemble_fidelity(&dist, 6, 9, 2.0, grid, &PulseSequence::off())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0], 1.0);
    }
}
