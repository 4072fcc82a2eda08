//! Reduced dynamics of a central spin-1/2 coupled to a fully polarized spin
//! bath through the hyperfine interaction.
//!
//! The bath enters only through its memory kernel `f̃(t - s)`. The central
//! object is the propagator `G̃(t)` solving
//!
//! ```text
//! ∂ₜG̃(t) = -∫₀ᵗ ds g(t, s) G̃(s),    G̃(0) = 1
//! ```
//!
//! where `g` is the bath kernel, optionally phase-modulated by a
//! leakage-elimination pulse train. Everything else (fidelity, the
//! time-convolutionless shift and rate, the qubit density matrix) follows
//! from `G̃`.
//!
//! Modules, bottom-up:
//!
//! * [`kernels`]: stationary bath kernels and their spectral constants.
//! * [`control`]: pulse sequences and the controlled two-time kernel.
//! * [`propagator`]: Volterra solver plus closed-form solutions.
//! * [`tcl`]: master-equation coefficients and qubit evolution.
//! * [`oracle`]: brute-force finite-bath amplitude integration.
//! * [`scenario`]: configuration files, CSV output, figure data, sweeps.

pub mod control;
pub mod error;
pub mod kernels;
pub mod oracle;
pub mod propagator;
pub mod scenario;
pub mod tcl;

pub use num_complex::Complex64;

pub use control::{PulseMode, PulseSequence, TwoTimeKernel};
pub use error::{Error, Result};
pub use kernels::KernelSpec;
pub use oracle::{AmplitudeTrajectory, BathRealization};
pub use propagator::{PropagatorSeries, TimeGrid};
pub use tcl::{QubitState, TclCoefficients};
