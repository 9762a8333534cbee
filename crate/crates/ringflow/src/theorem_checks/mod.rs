//! Numerical verification of the comparison inequalities and integral
//! identities on solved fields.
//!
//! Every check works on a [`RegionView`] (or on the whole field for the
//! pinching estimate) and returns a [`CheckReport`]. Values are compared after
//! rescaling `u_max` to the model value `u_max(R)` of the region's expected
//! core radius.

mod contour;
mod curvature;
mod gradient;
mod integral;
mod region;
mod suite;

pub use contour::{line_quadrature, LevelContour, SigmaCurve};
pub use curvature::{check_boundary_curvature_bound, check_core_radius_pinch, check_length_bounds, check_sigma_curvature_bound};
pub use gradient::{
    check_divergence_inequality, check_gradient_estimate, check_u_monotone, check_w_expansion_near_sigma,
    contour_u_profile, uniform_levels,
};
pub use integral::{check_crucial_identity, check_pohozaev, classify_region_by_pohozaev, pohozaev_sides};
pub use region::{wall_nwss, RegionView, Side, WallNwss};
pub use suite::{run_suite, RegionSummary, SuiteReport};

use serde::{Deserialize, Serialize};

use crate::report::CheckReport;
use crate::solver::Field;

/// Below this normalized violation magnitude an inequality counts as
/// saturated.
pub const RIGIDITY_THRESHOLD: f64 = 1e-6;

/// Tunable parameters shared by the checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Absolute tolerance; defaults to ten times the solve residual estimate.
    pub tolerance: Option<f64>,
    pub rigidity_threshold: f64,
    /// Number of levels for `U(t)`.
    pub levels: usize,
    /// Levels stop at `u_max (1 - level_margin)`.
    pub level_margin: f64,
    /// Trim `ε` (normalized units) for the integral identity on `N_ε`.
    pub crucial_eps: f64,
    /// Distance window, relative to `R`, for the expansions near `Σ`.
    pub expansion_window: f64,
    /// Relative tolerance for the expansion coefficients.
    pub expansion_rel_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            tolerance: None,
            rigidity_threshold: RIGIDITY_THRESHOLD,
            levels: 40,
            level_margin: 1e-2,
            crucial_eps: 1e-3,
            expansion_window: 0.1,
            expansion_rel_tol: 0.05,
        }
    }
}

impl CheckOptions {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }

    /// Tolerance used on `field`.
    pub fn tolerance_for(&self, field: &Field) -> f64 {
        self.tolerance.unwrap_or(10.0 * field.report.residual_estimate)
    }
}

fn rigidity(report: &mut CheckReport, magnitude: f64, threshold: f64) {
    report.rigidity = Some(magnitude < threshold);
    report.diag("rigidity_magnitude", magnitude);
}
