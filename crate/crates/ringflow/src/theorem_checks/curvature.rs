//! Curvature bounds on the walls and on the max curve, the pinching estimate
//! and the length bounds that follow from them.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model_family::{expected_core_radius, pinch_scale, BranchKind, NwssValue};
use crate::report::CheckReport;
use crate::solver::boundary::wall_curvature;
use crate::solver::{locate_max_set, Field, MaxSetKind, Wall};

use super::contour::SigmaCurve;
use super::region::{wall_nwss, RegionView, Side};
use super::{rigidity, CheckOptions};

/// Relative window defining the argmax samples of `|∇u|` on `Γ_N`.
const ARGMAX_REL: f64 = 1e-9;

/// At the points of `Γ_N` where `|∇u|` is maximal: `κ ≤ 1` on outer
/// branches, `κ ≤ -1/r_i(R)` on inner ones (exterior normal, normalized).
pub fn check_boundary_curvature_bound(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("boundary_curvature[{}]", region.side.label());
    let bound = match region.branch {
        BranchKind::Outer => 1.0,
        BranchKind::Inner => -1.0 / region.model_inner_radius()?,
        BranchKind::Critical => {
            return Ok(CheckReport::not_applicable(name, "NWSS at the threshold sqrt(2): no comparison model"))
        }
    };
    let field = region.field;
    let top = region.walls.iter().map(|w| w.max_gradient).fold(f64::NEG_INFINITY, f64::max);
    let mut points: Vec<(Wall, f64)> = Vec::new();
    for (w, t) in region.walls.iter().zip(region.wall_traces()) {
        if w.max_gradient >= top * (1.0 - ARGMAX_REL) {
            points.push((w.wall, w.theta_max));
        }
        for (m, &g) in t.gradient_norm.iter().enumerate() {
            if g >= top * (1.0 - ARGMAX_REL) {
                points.push((t.wall, field.geom.theta[m]));
            }
        }
    }
    let mut worst = f64::NEG_INFINITY;
    let mut max_abs = 0.0f64;
    let mut samples = Vec::new();
    for &(wall, theta) in &points {
        let k = wall_curvature(&field.domain, wall, theta) / region.scale;
        worst = worst.max(k - bound);
        max_abs = max_abs.max((k - bound).abs());
        samples.push(vec![if wall == Wall::Inner { 0.0 } else { 1.0 }, theta, k, bound]);
    }
    let mut rep = CheckReport::new(name, worst, opts.tolerance_for(field));
    rep.diag("argmax_points", points.len() as f64);
    rep.diag("bound", bound);
    rigidity(&mut rep, max_abs, opts.rigidity_threshold);
    rep.sample_columns = ["wall", "theta", "kappa", "bound"].map(String::from).to_vec();
    rep.samples = samples;
    Ok(rep)
}

/// On the max curve: `κ ≤ -1/R` on outer branches, `κ ≤ 1/R` otherwise,
/// with the normal exterior to `N`.
pub fn check_sigma_curvature_bound(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("sigma_curvature[{}]", region.side.label());
    let Some(sig) = region.sigma() else {
        return Ok(CheckReport::not_applicable(name, "maximum set is not a curve"));
    };
    let r = region.r();
    let bound = if region.branch == BranchKind::Outer { -1.0 / r } else { 1.0 / r };
    let field = region.field;
    let ori = region.sigma_orientation();
    let mut worst = f64::NEG_INFINITY;
    let mut max_abs = 0.0f64;
    let mut samples = Vec::new();
    for &t in field.theta() {
        let k = ori * sig.polar_curvature(t) / region.scale;
        worst = worst.max(k - bound);
        max_abs = max_abs.max((k - bound).abs());
        samples.push(vec![t, k, bound]);
    }
    let mut rep = CheckReport::new(name, worst, opts.tolerance_for(field));
    rep.diag("bound", bound);
    rep.diag("fit_residual", sig.fit_residual(field.theta()));
    rigidity(&mut rep, max_abs, opts.rigidity_threshold);
    rep.sample_columns = ["theta", "kappa", "bound"].map(String::from).to_vec();
    rep.samples = samples;
    Ok(rep)
}

/// `√u_max(R_o)/R_o ≤ κ √u_max ≤ √u_max(R_i)/R_i` on the max curve, with
/// `R_o`, `R_i` the expected core radii of the two walls, and `R_o ≥ R_i`.
///
/// Errors with `Precondition` when `τ̄(Γ_o) ≥ √2`. When the maximum set is
/// not a curve the report is not applicable but still records both radii.
pub fn check_core_radius_pinch(field: &Field, opts: &CheckOptions) -> Result<CheckReport> {
    let ms = locate_max_set(field);
    let [inner, outer] = wall_nwss(field, ms.u_max);
    if outer.tau >= 2f64.sqrt() {
        return Err(Error::Precondition(format!("outer NWSS {:.9} is not below sqrt(2)", outer.tau)));
    }
    let r_o = expected_core_radius(NwssValue::new(outer.tau)?)?.value();
    let r_i = expected_core_radius(NwssValue::new(inner.tau)?)?.value();
    let lower = pinch_scale(r_o);
    let upper = pinch_scale(r_i);
    let tol = opts.tolerance_for(field);
    let gap = r_o - r_i;
    let mut worst = r_i - r_o;
    let mut max_abs = gap.abs();
    let mut samples = Vec::new();
    if ms.kind == MaxSetKind::Curve {
        let sig = SigmaCurve::fit(field, &ms.ridge);
        let su = ms.u_max.sqrt();
        for &t in field.theta() {
            let v = sig.polar_curvature(t) * su;
            worst = worst.max(lower - v).max(v - upper);
            max_abs = max_abs.max((v - lower).abs()).max((upper - v).abs());
            samples.push(vec![t, v, lower, upper]);
        }
    }
    let mut rep = CheckReport::new("core_radius_pinch", worst, tol);
    rep.diag("r_outer", r_o);
    rep.diag("r_inner", r_i);
    rep.diag("radius_gap", gap);
    rep.diag("tau_outer", outer.tau);
    rep.diag("tau_inner", inner.tau);
    rep.diag("lower_bound", lower);
    rep.diag("upper_bound", upper);
    rigidity(&mut rep, max_abs, opts.rigidity_threshold);
    rep.sample_columns = ["theta", "kappa_sqrt_umax", "lower", "upper"].map(String::from).to_vec();
    rep.samples = samples;
    if ms.kind != MaxSetKind::Curve {
        rep = rep.inapplicable_because("maximum set is not a curve; radii recorded only");
    }
    Ok(rep)
}

/// Normalized lengths of `Γ_N` and `Σ_N` against the model circles.
///
/// Outer regions with constant boundary gradient: `2π ≤ |Γ_N|`; inner ones:
/// `|Γ_N| ≤ 2π r_i`. With a max curve: `|Σ_N| ≤ 2πR` when `τ̄ < √2`,
/// `2πR ≤ |Σ_N|` for inner regions with `τ̄ ≥ √2`, and `|Σ_N|/R ≤ |Γ_N|`
/// (resp. `|Γ_N|/r_i`).
pub fn check_length_bounds(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("length_bounds[{}]", region.side.label());
    if region.side == Side::Whole {
        return Ok(CheckReport::not_applicable(name, "boundary of the region is not connected and there is no max curve"));
    }
    let field = region.field;
    let tol = opts.tolerance_for(field);
    let mu = region.scale;
    let r = region.r();
    let trace = &region.wall_traces()[0];
    let gamma = mu * trace.length();
    let spread = trace.max_gradient() - trace.gradient_norm.iter().copied().fold(f64::INFINITY, f64::min);
    let constant = spread <= tol.max(1e-12);
    let r_i = region.model_inner_radius().ok();
    let outer_side = region.side == Side::OuterRegion;
    let tau_low = region.tau < 2f64.sqrt();
    let mut slack: Vec<(&str, f64)> = Vec::new();
    let mut rep_notes = Vec::new();
    if constant {
        if outer_side {
            slack.push(("gamma_lower", 2.0 * PI - gamma));
        } else if let Some(ri) = r_i {
            slack.push(("gamma_upper", gamma - 2.0 * PI * ri));
        }
    } else {
        rep_notes.push(format!("|∇u| varies by {spread:.3e} on Γ_N: boundary length bound skipped"));
    }
    if let Some(sig) = region.sigma() {
        let sigma = mu * sig.length();
        if tau_low {
            // also forces N to be outer
            slack.push(("sigma_upper", sigma - 2.0 * PI * r));
            if !outer_side {
                slack.push(("sigma_region_is_outer", 1.0));
            }
            slack.push(("sigma_over_r_vs_gamma", sigma / r - gamma));
        } else {
            if !outer_side {
                slack.push(("sigma_lower", 2.0 * PI * r - sigma));
            }
            if region.branch == BranchKind::Inner {
                if let Some(ri) = r_i {
                    slack.push(("sigma_over_r_vs_gamma", sigma / r - gamma / ri));
                }
            }
        }
    }
    if slack.is_empty() {
        let mut rep = CheckReport::not_applicable(name, "no length bound has its hypotheses met");
        rep.notes.extend(rep_notes);
        return Ok(rep);
    }
    let worst = slack.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let max_abs = slack.iter().map(|s| s.1.abs()).fold(0.0, f64::max);
    let mut rep = CheckReport::new(name, worst, tol);
    rep.diag("gamma_length", gamma);
    if let Some(sig) = region.sigma() {
        rep.diag("sigma_length", mu * sig.length());
    }
    for (k, v) in &slack {
        rep.diag(k, *v);
    }
    rep.notes.extend(rep_notes);
    rigidity(&mut rep, max_abs, opts.rigidity_threshold);
    Ok(rep)
}
