//! All checks on one field, collected into a serializable report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_family::BranchKind;
use crate::report::CheckReport;
use crate::solver::{locate_max_set, Field, MaxSetKind, Wall};

use super::region::{RegionView, Side};
use super::{
    check_boundary_curvature_bound, check_core_radius_pinch, check_crucial_identity, check_divergence_inequality,
    check_gradient_estimate, check_length_bounds, check_pohozaev, check_sigma_curvature_bound, check_u_monotone,
    check_w_expansion_near_sigma, classify_region_by_pohozaev, uniform_levels, CheckOptions,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSummary {
    pub side: Side,
    pub tau: f64,
    pub branch: BranchKind,
    pub r_expected: f64,
    pub scale: f64,
    pub walls: Vec<(Wall, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub n_theta: usize,
    pub n_r: usize,
    pub u_max: f64,
    pub residual_estimate: f64,
    pub tolerance: f64,
    pub max_set: MaxSetKind,
    pub regions: Vec<RegionSummary>,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    /// True when no applicable check failed.
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| !c.is_failure())
    }

    pub fn failures(&self) -> Vec<&CheckReport> {
        self.checks.iter().filter(|c| c.is_failure()).collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Copy without per-sample tables.
    pub fn without_samples(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.checks {
            c.samples.clear();
            c.sample_columns.clear();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn settle(name: String, r: Result<CheckReport>) -> CheckReport {
    match r {
        Ok(c) => c,
        Err(Error::Precondition(msg)) => CheckReport::not_applicable(name, msg),
        Err(e) => {
            let mut c = CheckReport::not_applicable(name, e.to_string());
            c.applicable = true;
            c
        }
    }
}

fn classification_report(region: &RegionView, tol: f64) -> CheckReport {
    let name = format!("pohozaev_classification[{}]", region.side.label());
    match classify_region_by_pohozaev(region, tol) {
        Ok(kind) => {
            let mut c = CheckReport::new(name, 0.0, 0.0);
            c.diag("tau", region.tau);
            c.note(format!("{kind:?}"));
            c
        }
        Err(Error::Precondition(msg)) => CheckReport::not_applicable(name, msg),
        Err(e) => {
            let mut c = CheckReport::new(name, 1.0, 0.0);
            c.note(e.to_string());
            c
        }
    }
}

/// Run every check on every region of `field`.
pub fn run_suite(field: &Field, opts: &CheckOptions) -> Result<SuiteReport> {
    let ms = locate_max_set(field);
    let regions = RegionView::regions_from(field, &ms)?;
    let tol = opts.tolerance_for(field);
    let mut checks = Vec::new();
    let mut summaries = Vec::new();
    for reg in &regions {
        let label = reg.side.label();
        summaries.push(RegionSummary {
            side: reg.side,
            tau: reg.tau,
            branch: reg.branch,
            r_expected: reg.r(),
            scale: reg.scale,
            walls: reg.walls.iter().map(|w| (w.wall, w.tau)).collect(),
        });
        let levels = uniform_levels(reg.u_max(), opts.levels, opts.level_margin);
        checks.push(settle(format!("u_monotone[{label}]"), check_u_monotone(reg, &levels, opts)));
        checks.push(settle(format!("divergence_inequality[{label}]"), check_divergence_inequality(reg, opts)));
        checks.push(settle(format!("gradient_estimate[{label}]"), check_gradient_estimate(reg, opts)));
        checks.push(settle(format!("pohozaev[{label}]"), check_pohozaev(reg, opts)));
        checks.push(classification_report(reg, tol.max(1e-12)));
        checks.push(settle(format!("boundary_curvature[{label}]"), check_boundary_curvature_bound(reg, opts)));
        checks.push(settle(format!("sigma_curvature[{label}]"), check_sigma_curvature_bound(reg, opts)));
        checks.push(settle(format!("length_bounds[{label}]"), check_length_bounds(reg, opts)));
        checks.push(settle(format!("crucial_identity[{label}]"), check_crucial_identity(reg, opts)));
        checks.push(settle(format!("w_expansion[{label}]"), check_w_expansion_near_sigma(reg, opts)));
    }
    checks.push(settle("core_radius_pinch".into(), check_core_radius_pinch(field, opts)));
    Ok(SuiteReport {
        n_theta: field.n_theta(),
        n_r: field.n_r(),
        u_max: ms.u_max,
        residual_estimate: field.report.residual_estimate,
        tolerance: tol,
        max_set: ms.kind,
        regions: summaries,
        checks,
    })
}
