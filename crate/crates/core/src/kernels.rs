//! Bath memory kernels `f̃(t - s)`.
//!
//! All kernels are stationary: they depend on the time difference only.
//! Two-time kernels appear only through pulse modulation (see
//! [`crate::control`]).

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// A stationary bath correlation function, already in the frame that removes
/// the Overhauser shift.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// Lorentzian bath: `(Γγ₀/2) e^{-γ₀|dt|}`.
    Exponential { gamma: f64, gamma0: f64 },
    /// Homogeneous ("box") bath with `A_k = 𝒜/N`: `(𝒜²/4N) e^{iΩ dt}`.
    Box { acal: f64, n: usize, omega: f64 },
    /// Effective Gaussian-distributed couplings:
    /// `(𝒜/(2√N)) exp(-ν² dt²/2 + i(𝒜/2) dt)`.
    GaussianBath { acal: f64, n: usize, nu: f64 },
    /// Samples `values[k] = f̃(k·dt)`, linearly interpolated in between.
    Tabulated { dt: f64, values: Vec<Complex64> },
}

impl KernelSpec {
    pub fn exponential(gamma: f64, gamma0: f64) -> Result<Self> {
        let k = KernelSpec::Exponential { gamma, gamma0 };
        k.validate()?;
        Ok(k)
    }

    pub fn box_model(acal: f64, n: usize, omega: f64) -> Result<Self> {
        let k = KernelSpec::Box { acal, n, omega };
        k.validate()?;
        Ok(k)
    }

    pub fn gaussian_bath(acal: f64, n: usize, nu: f64) -> Result<Self> {
        let k = KernelSpec::GaussianBath { acal, n, nu };
        k.validate()?;
        Ok(k)
    }

    pub fn tabulated(dt: f64, values: Vec<Complex64>) -> Result<Self> {
        let k = KernelSpec::Tabulated { dt, values };
        k.validate()?;
        Ok(k)
    }

    /// A kernel that is identically zero on `[0, t_max]`.
    pub fn zero(t_max: f64) -> Result<Self> {
        let t_max = if t_max > 0.0 { t_max } else { 1.0 };
        Self::tabulated(t_max, vec![Complex64::new(0.0, 0.0); 2])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::Exponential { gamma, gamma0 } => {
                ensure_finite("Gamma", *gamma)?;
                ensure_finite("gamma0", *gamma0)?;
                if *gamma <= 0.0 || *gamma0 <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponential kernel needs Gamma > 0 and gamma0 > 0, got ({gamma}, {gamma0})"
                    )));
                }
            }
            KernelSpec::Box { acal, n, omega } => {
                ensure_finite("Acal", *acal)?;
                ensure_finite("Omega", *omega)?;
                check_bath(*acal, *n)?;
            }
            KernelSpec::GaussianBath { acal, n, nu } => {
                ensure_finite("Acal", *acal)?;
                ensure_finite("nu", *nu)?;
                check_bath(*acal, *n)?;
                if *nu < 0.0 {
                    return Err(Error::InvalidParameter(format!("nu must be >= 0, got {nu}")));
                }
            }
            KernelSpec::Tabulated { dt, values } => {
                ensure_finite("dt", *dt)?;
                if *dt <= 0.0 {
                    return Err(Error::InvalidParameter(format!("table step must be > 0, got {dt}")));
                }
                if values.is_empty() {
                    return Err(Error::InvalidParameter("kernel table is empty".into()));
                }
                if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::InvalidParameter(format!("kernel table entry {k} is not finite")));
                }
            }
        }
        Ok(())
    }

    /// Evaluate `f̃(dt)` for `dt ≥ 0`.
    pub fn eval(&self, dt: f64) -> Result<Complex64> {
        if !dt.is_finite() || dt < 0.0 {
            return Err(Error::InvalidParameter(format!("kernel argument must be finite and >= 0, got {dt}")));
        }
        self.validate()?;
        Ok(match self {
            KernelSpec::Exponential { gamma, gamma0 } => {
                Complex64::new(0.5 * gamma * gamma0 * (-gamma0 * dt).exp(), 0.0)
            }
            KernelSpec::Box { acal, n, omega } => {
                let amp = acal * acal / (4.0 * *n as f64);
                Complex64::from_polar(amp, omega * dt)
            }
            KernelSpec::GaussianBath { acal, n, nu } => {
                let amp = acal / (2.0 * (*n as f64).sqrt());
                Complex64::from_polar(amp * (-0.5 * nu * nu * dt * dt).exp(), 0.5 * acal * dt)
            }
            KernelSpec::Tabulated { dt: step, values } => return lookup(*step, values, dt),
        })
    }

    /// `f̃(0)`, the zero-lag correlation.
    pub fn at_zero(&self) -> Result<Complex64> {
        self.eval(0.0)
    }

    /// Overhauser shift `h = Σ A_k/2` implied by the variant, where the
    /// model defines one. The Lorentzian and tabulated kernels carry no
    /// explicit coupling list and report 0.
    pub fn implied_overhauser(&self) -> f64 {
        match self {
            KernelSpec::Box { acal, .. } | KernelSpec::GaussianBath { acal, .. } => 0.5 * acal,
            _ => 0.0,
        }
    }
}

fn check_bath(acal: f64, n: usize) -> Result<()> {
    if acal == 0.0 {
        return Err(Error::InvalidParameter("Acal must be nonzero".into()));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("bath size N must be >= 1".into()));
    }
    Ok(())
}

fn lookup(step: f64, values: &[Complex64], dt: f64) -> Result<Complex64> {
    let last = values.len() - 1;
    let max = step * last as f64;
    let x = dt / step;
    // grid arithmetic may land a hair past the last sample
    if x > last as f64 * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::OutOfTable { dt, max });
    }
    let i = (x.floor() as usize).min(last);
    if i == last {
        return Ok(values[last]);
    }
    let w = x - i as f64;
    Ok(values[i] * (1.0 - w) + values[i + 1] * w)
}

/// Evaluate a kernel; see [`KernelSpec::eval`].
pub fn eval_kernel(spec: &KernelSpec, dt: f64) -> Result<Complex64> {
    spec.eval(dt)
}

/// Box-model detuning `Ω = ω₀ − ω − (𝒜/2)(1 − 1/N)`.
pub fn box_detuning(omega0: f64, omega: f64, acal: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("bath size N must be >= 1".into()));
    }
    let out = omega0 - omega - 0.5 * acal * (1.0 - 1.0 / n as f64);
    ensure_finite("Omega", out)?;
    Ok(out)
}

/// `χ = √(1 − 2Γ/γ₀)`, principal branch; purely imaginary for `γ₀ < 2Γ`.
pub fn exponential_chi(gamma: f64, gamma0: f64) -> Complex64 {
    Complex64::new(1.0 - 2.0 * gamma / gamma0, 0.0).sqrt()
}

/// Box-model revival frequency `Δ = √(Ω² + 𝒜²/N)`.
pub fn box_delta(omega: f64, acal: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("bath size N must be >= 1".into()));
    }
    Ok((omega * omega + acal * acal / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn exponential_at_zero() {
        let k = KernelSpec::exponential(1.0, 2.0).unwrap();
        let v = k.eval(0.0).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn box_has_constant_modulus() {
        let k = KernelSpec::box_model(1.0, 4, 0.0).unwrap();
        for dt in [0.0, 0.3, 7.0, 123.4] {
            let v = k.eval(dt).unwrap();
            assert!(close(v.re, 1.0 / 16.0, 1e-15) && v.im.abs() < 1e-15);
        }
        let k = KernelSpec::box_model(1.0, 4, 2.5).unwrap();
        for dt in [0.0, 0.3, 7.0] {
            assert!(close(k.eval(dt).unwrap().norm(), 1.0 / 16.0, 1e-15));
        }
    }

    #[test]
    fn gaussian_prefactor() {
        // 𝒜/(2√N) = 100 / (2 * 100)
        let expected = 100.0 / (2.0 * 10_000f64.sqrt());
        let k = KernelSpec::gaussian_bath(100.0, 10_000, 0.5).unwrap();
        let v = k.eval(0.0).unwrap();
        assert!(close(v.re, expected, 1e-15));
        assert!(close(v.re, 0.5, 1e-15));
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn gaussian_envelope_and_phase() {
        let k = KernelSpec::gaussian_bath(4.0, 4, 0.5).unwrap();
        let v = k.eval(2.0).unwrap();
        let amp = 4.0 / (2.0 * 2.0) * (-0.5 * 0.25 * 4.0f64).exp();
        assert!(close(v.norm(), amp, 1e-14));
        assert!(close(v.arg(), 4.0 - 2.0 * std::f64::consts::PI, 1e-12));
    }

    #[test]
    fn detuning_examples() {
        assert_eq!(box_detuning(1.0, 0.0, 0.0, 10).unwrap(), 1.0);
        assert_eq!(box_detuning(0.0, 0.0, 2.0, 1).unwrap(), 0.0);
        assert!(close(box_detuning(5.0, 1.0, 4.0, 2).unwrap(), 3.0, 1e-15));
        assert!(box_detuning(1.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn chi_examples() {
        let c = exponential_chi(1.0, 2.0);
        assert_eq!(c, Complex64::new(0.0, 0.0));
        let c = exponential_chi(1.0, 8.0);
        assert!(close(c.re, 3f64.sqrt() / 2.0, 1e-15) && c.im == 0.0);
        let c = exponential_chi(1.0, 1.0);
        assert!(c.re.abs() < 1e-15 && close(c.im, 1.0, 1e-15));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(box_delta(0.0, 2.0, 4).unwrap(), 1.0);
        assert_eq!(box_delta(3.0, 0.0, 1).unwrap(), 3.0);
        assert_eq!(box_delta(3.0, 4.0, 1).unwrap(), 5.0);
    }

    #[test]
    fn delta_bounds_detuning() {
        let omega = box_detuning(3.0, 0.5, 0.0, 7).unwrap();
        assert_eq!(box_delta(omega, 0.0, 7).unwrap(), omega.abs());
        let omega = box_detuning(3.0, 0.5, 2.0, 7).unwrap();
        assert!(box_delta(omega, 2.0, 7).unwrap() > omega.abs());
    }

    #[test]
    fn tabulated_interpolates_and_refuses_to_extrapolate() {
        let vals = vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, -2.0)];
        let k = KernelSpec::tabulated(0.5, vals).unwrap();
        let v = k.eval(0.25).unwrap();
        assert!(close(v.re, 2.0, 1e-15) && close(v.im, -1.0, 1e-15));
        assert_eq!(k.eval(0.5).unwrap(), Complex64::new(3.0, -2.0));
        assert!(matches!(k.eval(0.51), Err(Error::OutOfTable { .. })));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(KernelSpec::exponential(0.0, 1.0).is_err());
        assert!(KernelSpec::exponential(1.0, -1.0).is_err());
        assert!(KernelSpec::exponential(f64::NAN, 1.0).is_err());
        assert!(KernelSpec::box_model(0.0, 4, 1.0).is_err());
        assert!(KernelSpec::box_model(1.0, 0, 1.0).is_err());
        assert!(KernelSpec::gaussian_bath(1.0, 4, -0.1).is_err());
        assert!(KernelSpec::tabulated(0.0, vec![Complex64::new(0.0, 0.0)]).is_err());
        assert!(KernelSpec::tabulated(1.0, vec![Complex64::new(f64::INFINITY, 0.0)]).is_err());
        let k = KernelSpec::exponential(1.0, 1.0).unwrap();
        assert!(k.eval(-1.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn chi_squares_back(gamma in 1e-3f64..1e3, gamma0 in 1e-3f64..1e3) {
                let chi = exponential_chi(gamma, gamma0);
                let target = 1.0 - 2.0 * gamma / gamma0;
                let err = (chi * chi - Complex64::new(target, 0.0)).norm();
                prop_assert!(err <= 1e-14 * target.abs().max(1.0));
            }

            #[test]
            fn moduli_nonincreasing(a in 0.0f64..20.0, b in 0.0f64..20.0,
                                    gamma in 0.1f64..5.0, gamma0 in 0.1f64..5.0,
                                    nu in 0.0f64..3.0) {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                let e = KernelSpec::exponential(gamma, gamma0).unwrap();
                prop_assert!(e.eval(hi).unwrap().norm() <= e.eval(lo).unwrap().norm());
                let g = KernelSpec::gaussian_bath(10.0, 100, nu).unwrap();
                prop_assert!(g.eval(hi).unwrap().norm() <= g.eval(lo).unwrap().norm() * (1.0 + 1e-15));
            }
        }
    }
}
