//! The propagator `G̃(t)`: numerical Volterra solution and closed forms.

use num_complex::Complex64;

use crate::control::{PulseMode, TwoTimeKernel};
use crate::error::{Error, Result};
use crate::kernels::{box_delta, exponential_chi, KernelSpec};

/// Numerical slack on `|G̃| ≤ 1`.
pub const FIDELITY_SLACK: f64 = 1e-6;

/// `|G̃|` beyond `1 + UNSTABLE_LIMIT` aborts a solve.
pub const UNSTABLE_LIMIT: f64 = 1e-3;

/// Below this `|χ|` the `γ₀ = 2Γ` limit is used.
const CHI_LIMIT: f64 = 1e-8;

/// Uniform grid `t_k = k·dt`, `k = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, n_steps: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidParameter(format!("t_max must be finite and > 0, got {t_max}")));
        }
        if n_steps < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 steps, got {n_steps}")));
        }
        Ok(TimeGrid { t_max, n_steps })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_max / self.n_steps as f64
    }

    /// Number of nodes, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == self.n_steps {
            self.t_max
        } else {
            k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.t(k))
    }
}

/// `G̃(t_k)` and `∂ₜG̃(t_k)` on a grid, together with the Overhauser shift
/// `h` that links it to the lab-frame `G(t) = G̃(t) e^{iht}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatorSeries {
    pub grid: TimeGrid,
    pub g_tilde: Vec<Complex64>,
    pub dg_tilde: Vec<Complex64>,
    pub h: f64,
}

impl PropagatorSeries {
    pub fn with_overhauser(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn fidelity(&self) -> Vec<f64> {
        fidelity(self)
    }

    pub fn to_lab_frame(&self) -> Vec<Complex64> {
        to_lab_frame(self)
    }

    pub fn max_modulus(&self) -> f64 {
        self.g_tilde.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }
}

/// How the trapezoidal history sum is accumulated.
enum History {
    /// Full O(n) sum per step over the tabulated kernel.
    Direct { table: Vec<Complex64> },
    /// `e^{-γ₀(t-s)}` factorizes, so the sum obeys a one-term recursion.
    Recursive { weight: f64, decay: f64 },
}

/// Solve `∂ₜG̃(t) = -∫₀ᵗ g(t,s) G̃(s) ds`, `G̃(0) = 1`.
///
/// Trapezoidal history quadrature with an explicit-Euler predictor and a
/// trapezoidal corrector (PECE), second order in `dt`. Pulse modulation
/// enters through the separable phase `e^{-iR̃(t)} e^{+iR̃(s)}`, so a
/// controlled solve costs the same as a free one. Exponential kernels use
/// an exact O(1)-per-step recursion for the history sum.
pub fn solve_volterra(kernel: &TwoTimeKernel, grid: TimeGrid) -> Result<PropagatorSeries> {
    let history = match kernel.base {
        KernelSpec::Exponential { gamma, gamma0 } => {
            kernel.base.validate()?;
            History::Recursive { weight: 0.5 * gamma * gamma0, decay: gamma0 }
        }
        _ => History::Direct { table: tabulate(&kernel.base, grid)? },
    };
    solve_with(kernel, grid, history)
}

/// [`solve_volterra`] without the exponential-kernel recursion; every step
/// sums the full history. Used to cross-check the fast path.
pub fn solve_volterra_direct(kernel: &TwoTimeKernel, grid: TimeGrid) -> Result<PropagatorSeries> {
    let table = tabulate(&kernel.base, grid)?;
    solve_with(kernel, grid, History::Direct { table })
}

fn tabulate(base: &KernelSpec, grid: TimeGrid) -> Result<Vec<Complex64>> {
    let dt = grid.dt();
    (0..grid.len()).map(|k| base.eval(k as f64 * dt)).collect()
}

fn solve_with(kernel: &TwoTimeKernel, grid: TimeGrid, history: History) -> Result<PropagatorSeries> {
    kernel.pulses.validate()?;
    let n = grid.len();
    let dt = grid.dt();
    let one = Complex64::new(1.0, 0.0);

    // e^{-iR̃(t_k)}; identity when uncontrolled
    let rotor: Option<Vec<Complex64>> = if kernel.pulses.mode == PulseMode::Off {
        None
    } else {
        let table = kernel.pulses.phase_table(grid.t_max());
        Some((0..n).map(|k| Complex64::from_polar(1.0, -table.phase_at(grid.t(k)))).collect())
    };
    let rot = |k: usize| rotor.as_ref().map_or(one, |r| r[k]);

    let g0 = match &history {
        History::Direct { table } => table[0],
        History::Recursive { weight, .. } => Complex64::new(*weight, 0.0),
    };

    let mut g = Vec::with_capacity(n);
    let mut dg = Vec::with_capacity(n);
    g.push(one);
    dg.push(Complex64::new(0.0, 0.0));

    // q_j = e^{+iR̃(t_j)} G̃_j, the phase-stripped history
    let mut q: Vec<Complex64> = Vec::with_capacity(n);
    q.push(one);
    // recursive path: P_k = Σ_{j≤k} e^{-γ₀(t_k - t_j)} q_j
    let mut running = one;

    for k in 1..n {
        let t = grid.t(k);
        // trapezoidal history without the implicit endpoint j = k, already
        // divided out of the rotor: Σ_j w_j f̃(t_k - t_j) q_j
        let partial = match &history {
            History::Direct { table } => {
                let mut acc = 0.5 * table[k] * q[0];
                for j in 1..k {
                    acc += table[k - j] * q[j];
                }
                acc
            }
            History::Recursive { weight, decay } => {
                running *= (-decay * dt).exp();
                let tail = (-decay * t).exp();
                *weight * (running - 0.5 * tail * q[0])
            }
        };
        let memory = dt * rot(k) * partial;
        let endpoint = 0.5 * dt * g0;

        let prev = g[k - 1];
        let slope_prev = dg[k - 1];
        let predicted = prev + dt * slope_prev;
        let slope_pred = -(memory + endpoint * predicted);
        let corrected = prev + 0.5 * dt * (slope_prev + slope_pred);
        let slope = -(memory + endpoint * corrected);

        if !(corrected.re.is_finite() && corrected.im.is_finite() && slope.re.is_finite() && slope.im.is_finite()) {
            return Err(Error::NonFinite { node: k, t });
        }
        let modulus = corrected.norm();
        if modulus > 1.0 + UNSTABLE_LIMIT {
            return Err(Error::Unstable { node: k, t, modulus });
        }

        g.push(corrected);
        dg.push(slope);
        let qk = rot(k).conj() * corrected;
        q.push(qk);
        if let History::Recursive { .. } = history {
            running += qk;
        }
    }

    Ok(PropagatorSeries { grid, g_tilde: g, dg_tilde: dg, h: 0.0 })
}

/// Closed-form `G̃` for the Lorentzian kernel.
///
/// Written as `½[(1 + 1/χ) e^{-γ₀t(1-χ)/2} + (1 - 1/χ) e^{-γ₀t(1+χ)/2}]`,
/// which equals `e^{-γ₀t/2}[cosh(γ₀χt/2) + sinh(γ₀χt/2)/χ]` but cannot
/// overflow since `Re χ ≥ 0`.
pub fn analytic_exponential(gamma: f64, gamma0: f64, grid: TimeGrid) -> Result<PropagatorSeries> {
    KernelSpec::exponential(gamma, gamma0)?;
    let (g, dg) = grid.times().map(|t| exponential_point(gamma, gamma0, t)).unzip();
    Ok(PropagatorSeries { grid, g_tilde: g, dg_tilde: dg, h: 0.0 })
}

/// `(G̃(t), ∂ₜG̃(t))` for the Lorentzian kernel at a single time.
pub fn exponential_point(gamma: f64, gamma0: f64, t: f64) -> (Complex64, Complex64) {
    if t == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let chi = exponential_chi(gamma, gamma0);
    if chi.norm() < CHI_LIMIT {
        let decay = (-gamma * t).exp();
        let g = decay * (1.0 + gamma * t);
        let dg = -gamma * gamma * t * decay;
        return (Complex64::new(g, 0.0), Complex64::new(dg, 0.0));
    }
    let one = Complex64::new(1.0, 0.0);
    let slow = (-0.5 * gamma0 * t * (one - chi)).exp();
    let fast = (-0.5 * gamma0 * t * (one + chi)).exp();
    let g = 0.5 * ((one + one / chi) * slow + (one - one / chi) * fast);
    // ∂ₜG̃ = -Γ e^{-γ₀t/2} sinh(γ₀χt/2)/χ
    let dg = -gamma / chi * 0.5 * (slow - fast);
    (g, dg)
}

/// Closed-form `G̃` for the box kernel; `h = 𝒜/2`.
pub fn analytic_box(omega: f64, acal: f64, n: usize, grid: TimeGrid) -> Result<PropagatorSeries> {
    KernelSpec::box_model(acal, n, omega)?;
    let delta = box_delta(omega, acal, n)?;
    let (g, dg) = grid.times().map(|t| box_point(omega, delta, t)).unzip();
    Ok(PropagatorSeries { grid, g_tilde: g, dg_tilde: dg, h: 0.5 * acal })
}

/// `(G̃(t), ∂ₜG̃(t))` for the box kernel with detuning `Ω` and revival frequency `Δ`.
pub fn box_point(omega: f64, delta: f64, t: f64) -> (Complex64, Complex64) {
    if delta == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let a = (delta - omega) / (2.0 * delta);
    let b = (delta + omega) / (2.0 * delta);
    let wa = 0.5 * (omega + delta);
    let wb = 0.5 * (omega - delta);
    let ea = Complex64::from_polar(1.0, wa * t);
    let eb = Complex64::from_polar(1.0, wb * t);
    let g = a * ea + b * eb;
    let dg = Complex64::i() * (a * wa * ea + b * wb * eb);
    (g, dg)
}

/// `F(t_k) = |G̃(t_k)|`.
pub fn fidelity(series: &PropagatorSeries) -> Vec<f64> {
    series.g_tilde.iter().map(|g| g.norm()).collect()
}

/// `G(t_k) = G̃(t_k) e^{iht_k}`.
pub fn to_lab_frame(series: &PropagatorSeries) -> Vec<Complex64> {
    series
        .grid
        .times()
        .zip(&series.g_tilde)
        .map(|(t, g)| g * Complex64::from_polar(1.0, series.h * t))
        .collect()
}
