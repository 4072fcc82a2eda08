//! Leakage-elimination pulse trains `r(t)` and the controlled kernel
//! `g(t, s) = f̃(t - s) e^{-i ∫ₛᵗ r}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_finite, Error, Result};
use crate::kernels::KernelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseMode {
    Off,
    /// Every duty window carries the full amplitude `Ψ/κ`.
    Constant,
    /// The n-th duty window carries `u_n Ψ/κ`, `u_n ~ U[0, 1)` drawn from the seed.
    RandomRectangular,
}

/// Equidistant rectangular pulses: period `tau`, duty window `[nτ, nτ + κ)`,
/// accumulated phase `Ψ` per period (scaled by `u_n` in random mode).
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub mode: PulseMode,
    pub tau: f64,
    pub kappa: f64,
    pub psi: f64,
    pub seed: u64,
}

impl PulseSequence {
    pub fn off() -> Self {
        PulseSequence { mode: PulseMode::Off, tau: 1.0, kappa: 1.0, psi: 0.0, seed: 0 }
    }

    pub fn constant(tau: f64, kappa: f64, psi: f64) -> Result<Self> {
        let seq = PulseSequence { mode: PulseMode::Constant, tau, kappa, psi, seed: 0 };
        seq.validate()?;
        Ok(seq)
    }

    /// A strictly constant field `r(t) = rate` (duty window fills the period).
    pub fn constant_rate(rate: f64, tau: f64) -> Result<Self> {
        Self::constant(tau, tau, rate * tau)
    }

    pub fn random(tau: f64, kappa: f64, psi: f64, seed: u64) -> Result<Self> {
        let seq = PulseSequence { mode: PulseMode::RandomRectangular, tau, kappa, psi, seed };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == PulseMode::Off {
            return Ok(());
        }
        ensure_finite("tau", self.tau)?;
        ensure_finite("kappa", self.kappa)?;
        ensure_finite("psi", self.psi)?;
        if !(self.kappa > 0.0 && self.kappa <= self.tau) {
            return Err(Error::InvalidParameter(format!(
                "pulses need 0 < kappa <= tau, got kappa = {}, tau = {}",
                self.kappa, self.tau
            )));
        }
        if self.psi < 0.0 {
            return Err(Error::InvalidParameter(format!("psi must be >= 0, got {}", self.psi)));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.mode == PulseMode::Off || self.psi == 0.0
    }

    /// Relative weight `u_n` of period `n`.
    pub fn period_weight(&self, n: u64) -> f64 {
        match self.mode {
            PulseMode::Off => 0.0,
            PulseMode::Constant => 1.0,
            PulseMode::RandomRectangular => {
                // one independent stream per period gives O(1) random access
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(n);
                rng.random::<f64>()
            }
        }
    }

    /// Largest amplitude the field can reach.
    pub fn peak_amplitude(&self) -> f64 {
        if self.is_off() {
            0.0
        } else {
            self.psi / self.kappa
        }
    }

    fn split(&self, t: f64) -> (u64, f64) {
        let n = (t / self.tau).floor().max(0.0);
        let rem = (t - n * self.tau).max(0.0);
        (n as u64, rem)
    }

    /// `r(t)`.
    pub fn amplitude(&self, t: f64) -> f64 {
        if self.mode == PulseMode::Off {
            return 0.0;
        }
        let (n, rem) = self.split(t);
        if rem < self.kappa {
            self.period_weight(n) * self.psi / self.kappa
        } else {
            0.0
        }
    }

    fn partial(&self, n: u64, rem: f64) -> f64 {
        self.period_weight(n) * self.psi / self.kappa * rem.min(self.kappa)
    }

    /// `R̃(t) = ∫₀ᵗ r(s) ds`, exact for the piecewise-constant field.
    pub fn phase_integral(&self, t: f64) -> f64 {
        if self.mode == PulseMode::Off {
            return 0.0;
        }
        let (n, rem) = self.split(t);
        let mut completed = 0.0;
        for m in 0..n {
            completed += self.period_weight(m);
        }
        self.psi * completed + self.partial(n, rem)
    }

    /// Precomputed prefix sums so that `R̃(t)` costs O(1) on `[0, t_max]`.
    pub fn phase_table(&self, t_max: f64) -> PhaseTable {
        let periods = if self.mode == PulseMode::Off {
            0
        } else {
            (t_max / self.tau).ceil().max(0.0) as u64 + 2
        };
        let mut cumulative = Vec::with_capacity(periods as usize + 1);
        let mut weights = Vec::with_capacity(periods as usize);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for m in 0..periods {
            let w = self.period_weight(m);
            acc += w;
            weights.push(w);
            cumulative.push(acc);
        }
        PhaseTable { seq: self.clone(), cumulative, weights }
    }
}

/// Prefix-summed phase of a [`PulseSequence`]; agrees bit-for-bit with
/// [`PulseSequence::phase_integral`] inside its range.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    seq: PulseSequence,
    cumulative: Vec<f64>,
    weights: Vec<f64>,
}

impl PhaseTable {
    pub fn phase_at(&self, t: f64) -> f64 {
        if self.seq.mode == PulseMode::Off {
            return 0.0;
        }
        let (n, rem) = self.seq.split(t);
        let idx = n as usize;
        if idx >= self.weights.len() {
            return self.seq.phase_integral(t);
        }
        let partial = self.weights[idx] * self.seq.psi / self.seq.kappa * rem.min(self.seq.kappa);
        self.seq.psi * self.cumulative[idx] + partial
    }
}

/// A base kernel modulated by a pulse train.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoTimeKernel {
    pub base: KernelSpec,
    pub pulses: PulseSequence,
}

impl TwoTimeKernel {
    pub fn new(base: KernelSpec, pulses: PulseSequence) -> Result<Self> {
        base.validate()?;
        pulses.validate()?;
        Ok(TwoTimeKernel { base, pulses })
    }

    pub fn uncontrolled(base: KernelSpec) -> Result<Self> {
        Self::new(base, PulseSequence::off())
    }

    /// `g(t, s)` for `0 ≤ s ≤ t`.
    pub fn eval(&self, t: f64, s: f64) -> Result<Complex64> {
        if !(s >= 0.0 && s <= t) {
            return Err(Error::InvalidParameter(format!("need 0 <= s <= t, got s = {s}, t = {t}")));
        }
        let f = self.base.eval(t - s)?;
        if self.pulses.mode == PulseMode::Off {
            return Ok(f);
        }
        let phase = self.pulses.phase_integral(t) - self.pulses.phase_integral(s);
        Ok(f * Complex64::from_polar(1.0, -phase))
    }
}

/// See [`TwoTimeKernel::eval`].
pub fn eval_controlled(kernel: &TwoTimeKernel, t: f64, s: f64) -> Result<Complex64> {
    kernel.eval(t, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo() -> PulseSequence {
        PulseSequence::constant(1.0, 0.5, 2.0).unwrap()
    }

    #[test]
    fn off_is_silent() {
        let p = PulseSequence::off();
        assert_eq!(p.amplitude(3.3), 0.0);
        assert_eq!(p.phase_integral(7.0), 0.0);
    }

    #[test]
    fn constant_mode_amplitude() {
        assert_eq!(demo().amplitude(0.25), 4.0);
        assert_eq!(demo().amplitude(0.75), 0.0);
        assert_eq!(demo().amplitude(2.1), 4.0);
    }

    #[test]
    fn constant_mode_phase() {
        assert!((demo().phase_integral(3.0) - 6.0).abs() < 1e-12);
        assert!((demo().phase_integral(0.25) - 1.0).abs() < 1e-15);
        assert!((demo().phase_integral(0.75) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn random_phase_at_period_boundaries() {
        let p = PulseSequence::random(0.02, 0.01, 0.2, 99).unwrap();
        let mut acc = 0.0;
        for n in 0..50u64 {
            let r = p.phase_integral(n as f64 * 0.02 + 0.015);
            acc += p.period_weight(n);
            assert!((r - 0.2 * acc).abs() < 1e-12, "period {n}");
        }
        for n in 0..50u64 {
            let u = p.period_weight(n);
            assert!((0.0..1.0).contains(&u));
            assert!((p.amplitude(n as f64 * 0.02 + 0.005) - u * 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seeds_are_deterministic_and_distinct() {
        let a = PulseSequence::random(0.1, 0.05, 1.0, 5).unwrap();
        let b = PulseSequence::random(0.1, 0.05, 1.0, 5).unwrap();
        let c = PulseSequence::random(0.1, 0.05, 1.0, 6).unwrap();
        for k in 0..200 {
            let t = k as f64 * 0.0137;
            assert_eq!(a.amplitude(t).to_bits(), b.amplitude(t).to_bits());
            assert_eq!(a.phase_integral(t).to_bits(), b.phase_integral(t).to_bits());
        }
        assert!((0..20).any(|n| a.period_weight(n) != c.period_weight(n)));
    }

    #[test]
    fn table_matches_direct_integral() {
        let p = PulseSequence::random(0.02, 0.01, 0.2, 3).unwrap();
        let table = p.phase_table(2.0);
        for k in 0..=2000 {
            let t = k as f64 * 1e-3;
            assert_eq!(table.phase_at(t).to_bits(), p.phase_integral(t).to_bits());
        }
    }

    #[test]
    fn rejects_bad_duty_cycles() {
        assert!(PulseSequence::constant(1.0, 0.0, 1.0).is_err());
        assert!(PulseSequence::constant(1.0, 1.5, 1.0).is_err());
        assert!(PulseSequence::random(1.0, 0.5, -1.0, 0).is_err());
    }

    #[test]
    fn controlled_kernel_examples() {
        let base = KernelSpec::exponential(1.0, 2.0).unwrap();
        let free = TwoTimeKernel::uncontrolled(base.clone()).unwrap();
        assert_eq!(free.eval(1.3, 0.4).unwrap(), base.eval(0.9).unwrap());

        let c = 3.0;
        let k = TwoTimeKernel::new(base.clone(), PulseSequence::constant_rate(c, 0.1).unwrap()).unwrap();
        for (t, s) in [(1.0, 0.2), (2.55, 2.5), (0.7, 0.0)] {
            let want = base.eval(t - s).unwrap() * Complex64::from_polar(1.0, -c * (t - s));
            assert!((k.eval(t, s).unwrap() - want).norm() < 1e-12);
        }
        let r = TwoTimeKernel::new(base.clone(), PulseSequence::random(0.02, 0.01, 0.2, 1).unwrap()).unwrap();
        assert_eq!(r.eval(0.73, 0.73).unwrap(), base.eval(0.0).unwrap());
        assert!(r.eval(0.2, 0.3).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn phase_is_nondecreasing_and_additive(seed in any::<u64>(), i in 0usize..10_000, len in 0usize..10_000) {
                // cells of width h tile every duty window, so the midpoint sum is exact
                let h = 1e-4;
                let p = PulseSequence::random(0.02, 0.01, 0.2, seed).unwrap();
                let (t1, t2) = (i as f64 * h, (i + len) as f64 * h);
                let exact = p.phase_integral(t2) - p.phase_integral(t1);
                prop_assert!(exact >= -1e-15);
                let sum: f64 = (0..len).map(|k| p.amplitude(t1 + (k as f64 + 0.5) * h)).sum::<f64>() * h;
                prop_assert!((sum - exact).abs() <= 1e-10 * exact.abs().max(1e-12), "sum {sum} exact {exact}");
            }

            #[test]
            fn modulus_is_preserved(seed in any::<u64>(), t in 0.0f64..3.0, frac in 0.0f64..1.0) {
                let s = t * frac;
                let base = KernelSpec::box_model(2.0, 3, 0.7).unwrap();
                let k = TwoTimeKernel::new(base.clone(), PulseSequence::random(0.05, 0.02, 1.0, seed).unwrap()).unwrap();
                let g = k.eval(t, s).unwrap().norm();
                let f = base.eval(t - s).unwrap().norm();
                prop_assert!((g - f).abs() <= 4.0 * f64::EPSILON * f);
            }
        }
    }
}
