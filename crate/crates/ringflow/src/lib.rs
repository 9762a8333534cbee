//! Torsion problem `Δu = -2` on ring-shaped domains.
//!
//! - [`model_family`]: the radial solutions `u_R`, their wall shear stress
//!   and the expected core radius.
//! - [`pseudo_radial`]: the comparison functions `ψ±` and `W_R`.
//! - [`solver`]: spectral solves on Fourier-perturbed annuli.
//! - [`theorem_checks`]: gradient, curvature, length and integral checks on a
//!   computed solution.
//! - [`bifurcation`]: the 2×2 linearized spectrum and the points `λ_k`.
//! - [`continuation`]: non-radial branches with constant boundary gradients.

pub mod bifurcation;
pub mod continuation;
pub mod error;
pub mod lstsq;
pub mod model_family;
pub mod pseudo_radial;
pub mod report;
pub mod roots;
pub mod scalar;
pub mod solver;
pub mod theorem_checks;

pub use error::{Error, Result};
pub use report::CheckReport;

pub type CoreRadius = model_family::CoreRadius<f64>;
pub type NwssValue = model_family::NwssValue<f64>;
pub type ModelSolution = model_family::ModelSolution<f64>;
pub type PseudoRadialBranch = pseudo_radial::PseudoRadialBranch<f64>;
pub type ExpansionReport = pseudo_radial::ExpansionReport<f64>;
pub type SpectralPoint = bifurcation::SpectralPoint<f64>;
pub type BifurcationPoint = bifurcation::BifurcationPoint<f64>;
