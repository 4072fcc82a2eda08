//! Time-convolutionless master equation for the central spin:
//!
//! ```text
//! ∂ₜρ = -(i/2) S(t) [σ₊σ₋, ρ] + γ(t) (σ₋ρσ₊ - ½{σ₊σ₋, ρ})
//! S(t) = -2 Im(Ġ/G),   γ(t) = -2 Re(Ġ/G)
//! ```
//!
//! The exact dynamical map ([`evolve_exact`]) is the primary evolution path;
//! [`evolve_tcl_direct`] integrates the equation itself as a cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::exponential_chi;
use crate::propagator::{to_lab_frame, PropagatorSeries, TimeGrid};

/// Nodes with `|G̃|` below this are masked: the generator diverges there.
pub const MASK_THRESHOLD: f64 = 1e-8;

const CHI_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TclCoefficients {
    pub grid: TimeGrid,
    /// Lab-frame shift `-2 Im(Ġ/G)`, including the Overhauser part `-2h`.
    pub shift: Vec<f64>,
    /// Shift in the frame of `G̃`, `-2 Im(Ġ̃/G̃)`.
    pub shift_rotating: Vec<f64>,
    /// Damping rate `-2 Re(Ġ/G)`.
    pub gamma: Vec<f64>,
    pub valid: Vec<bool>,
}

/// Derive `S(t)` and `γ(t)` from a propagator series.
pub fn coefficients(series: &PropagatorSeries) -> TclCoefficients {
    let n = series.g_tilde.len();
    let mut shift = Vec::with_capacity(n);
    let mut shift_rotating = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut valid = Vec::with_capacity(n);
    for (g, dg) in series.g_tilde.iter().zip(&series.dg_tilde) {
        if g.norm() < MASK_THRESHOLD {
            shift.push(f64::NAN);
            shift_rotating.push(f64::NAN);
            gamma.push(f64::NAN);
            valid.push(false);
            continue;
        }
        let ratio = dg / g;
        let rot = -2.0 * ratio.im;
        shift_rotating.push(rot);
        shift.push(rot - 2.0 * series.h);
        gamma.push(-2.0 * ratio.re);
        valid.push(rot.is_finite() && ratio.re.is_finite());
    }
    TclCoefficients { grid: series.grid, shift, shift_rotating, gamma, valid }
}

/// Closed-form decay rate for the Lorentzian kernel. `None` at poles
/// (fidelity zeros, only possible for `γ₀ < 2Γ`).
pub fn analytic_gamma_exponential(gamma: f64, gamma0: f64, t: f64) -> Option<f64> {
    let chi = exponential_chi(gamma, gamma0);
    if chi.norm() < CHI_LIMIT {
        return Some(2.0 * gamma * gamma * t / (1.0 + gamma * t));
    }
    // sinh x / (χ cosh x + sinh x) with the e^{x} factor divided out
    let one = Complex64::new(1.0, 0.0);
    let x = 0.5 * gamma0 * chi * t;
    let damp = (-2.0 * x).exp();
    let num = one - damp;
    let den = chi * (one + damp) + num;
    if den.norm() < 1e-12 {
        return None;
    }
    let value = 2.0 * gamma * num / den;
    if value.im.abs() > 1e-10 * value.re.abs().max(1.0) {
        return None;
    }
    Some(value.re)
}

/// 2×2 density matrix in the `{|1⟩, |0⟩}` basis (index 0 is the excited state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho: [[Complex64; 2]; 2],
}

impl QubitState {
    pub fn new(rho11: f64, rho10: Complex64) -> Result<Self> {
        let state = QubitState {
            rho: [
                [Complex64::new(rho11, 0.0), rho10],
                [rho10.conj(), Complex64::new(1.0 - rho11, 0.0)],
            ],
        };
        state.validate()?;
        Ok(state)
    }

    pub fn excited() -> Self {
        Self::new(1.0, Complex64::new(0.0, 0.0)).unwrap()
    }

    pub fn ground() -> Self {
        Self::new(0.0, Complex64::new(0.0, 0.0)).unwrap()
    }

    /// `|+⟩ = (|1⟩ + |0⟩)/√2`.
    pub fn plus() -> Self {
        Self::new(0.5, Complex64::new(0.5, 0.0)).unwrap()
    }

    /// `|ψ⟩⟨ψ|` for `ψ = (amplitude of |1⟩, amplitude of |0⟩)`.
    pub fn pure(psi: [Complex64; 2]) -> Result<Self> {
        check_normalized(&psi)?;
        let rho = [
            [psi[0] * psi[0].conj(), psi[0] * psi[1].conj()],
            [psi[1] * psi[0].conj(), psi[1] * psi[1].conj()],
        ];
        Ok(QubitState { rho })
    }

    pub fn validate(&self) -> Result<()> {
        let flat = self.rho.iter().flatten();
        if flat.clone().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::InvalidParameter("density matrix has non-finite entries".into()));
        }
        if (self.trace() - 1.0).abs() > 1e-12 || self.hermiticity_error() > 1e-12 {
            return Err(Error::InvalidParameter("density matrix must be Hermitian with unit trace".into()));
        }
        if self.min_eigenvalue() < -1e-9 {
            return Err(Error::InvalidParameter("density matrix must be positive semidefinite".into()));
        }
        Ok(())
    }

    pub fn rho11(&self) -> f64 {
        self.rho[0][0].re
    }

    pub fn rho00(&self) -> f64 {
        self.rho[1][1].re
    }

    pub fn rho10(&self) -> Complex64 {
        self.rho[0][1]
    }

    pub fn trace(&self) -> f64 {
        (self.rho[0][0] + self.rho[1][1]).re
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.rho[0][0].re;
        let d = self.rho[1][1].re;
        let b = self.rho[0][1];
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        mean - half_gap
    }

    pub fn max_abs_diff(&self, other: &QubitState) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.rho[i][j] - other.rho[i][j]).norm());
            }
        }
        worst
    }
}

fn check_normalized(psi: &[Complex64; 2]) -> Result<()> {
    let norm = psi[0].norm_sqr() + psi[1].norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Apply the exact map: `ρ₁₁ → |G|²ρ₁₁`, `ρ₁₀ → Gρ₁₀`.
pub fn evolve_exact(rho0: &QubitState, series: &PropagatorSeries) -> Vec<QubitState> {
    to_lab_frame(series)
        .into_iter()
        .map(|g| {
            let p = g.norm_sqr() * rho0.rho11();
            let c = g * rho0.rho10();
            QubitState {
                rho: [
                    [Complex64::new(p, 0.0), c],
                    [c.conj(), Complex64::new(1.0 - p, 0.0)],
                ],
            }
        })
        .collect()
}

/// A TCL trajectory; `stopped_at` marks the first masked node if the
/// integration had to end early.
#[derive(Debug, Clone)]
pub struct TclTrajectory {
    pub states: Vec<QubitState>,
    pub stopped_at: Option<usize>,
}

fn rhs(rho: &[[Complex64; 2]; 2], shift: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let i = Complex64::i();
    let p = rho[0][0];
    let c = rho[0][1];
    let dc = (-0.5 * i * shift - 0.5 * gamma) * c;
    let dp = -gamma * p;
    [[dp, dc], [dc.conj(), -dp]]
}

fn axpy(a: &[[Complex64; 2]; 2], s: f64, b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut out = *a;
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] += s * b[r][c];
        }
    }
    out
}

/// Coefficient value halfway between nodes `k` and `k+1`, cubic through
/// four valid neighbours where available.
fn midpoint(values: &[f64], valid: &[bool], k: usize) -> f64 {
    let n = values.len();
    let ok = |j: usize| j < n && valid[j];
    if k >= 1 && ok(k - 1) && ok(k + 2) {
        return (-values[k - 1] + 9.0 * values[k] + 9.0 * values[k + 1] - values[k + 2]) / 16.0;
    }
    if ok(k + 3) && ok(k + 2) {
        // one-sided cubic through k..k+3
        return (5.0 * values[k] + 15.0 * values[k + 1] - 5.0 * values[k + 2] + values[k + 3]) / 16.0;
    }
    if k >= 2 && ok(k - 2) && ok(k - 1) {
        return (values[k - 2] - 5.0 * values[k - 1] + 15.0 * values[k] + 5.0 * values[k + 1]) / 16.0;
    }
    0.5 * (values[k] + values[k + 1])
}

/// RK4 integration of the master equation with tabulated coefficients.
pub fn evolve_tcl_direct(rho0: &QubitState, coeffs: &TclCoefficients) -> TclTrajectory {
    let n = coeffs.grid.len();
    let mut states = Vec::with_capacity(n);
    if !coeffs.valid[0] {
        return TclTrajectory { states, stopped_at: Some(0) };
    }
    states.push(*rho0);
    let mut rho = rho0.rho;
    for k in 0..n - 1 {
        if !coeffs.valid[k + 1] {
            return TclTrajectory { states, stopped_at: Some(k + 1) };
        }
        let h = coeffs.grid.t(k + 1) - coeffs.grid.t(k);
        let (s0, g0) = (coeffs.shift[k], coeffs.gamma[k]);
        let (s1, g1) = (coeffs.shift[k + 1], coeffs.gamma[k + 1]);
        let sm = midpoint(&coeffs.shift, &coeffs.valid, k);
        let gm = midpoint(&coeffs.gamma, &coeffs.valid, k);
        let k1 = rhs(&rho, s0, g0);
        let k2 = rhs(&axpy(&rho, 0.5 * h, &k1), sm, gm);
        let k3 = rhs(&axpy(&rho, 0.5 * h, &k2), sm, gm);
        let k4 = rhs(&axpy(&rho, h, &k3), s1, g1);
        for r in 0..2 {
            for c in 0..2 {
                rho[r][c] += h / 6.0 * (k1[r][c] + 2.0 * k2[r][c] + 2.0 * k3[r][c] + k4[r][c]);
            }
        }
        states.push(QubitState { rho });
    }
    TclTrajectory { states, stopped_at: None }
}

/// `√⟨ψ₀|ρ|ψ₀⟩`.
pub fn state_fidelity(psi0: [Complex64; 2], rho: &QubitState) -> Result<f64> {
    check_normalized(&psi0)?;
    let mut value = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            value += psi0[i].conj() * rho.rho[i][j] * psi0[j];
        }
    }
    Ok(value.re.max(0.0).sqrt())
}
