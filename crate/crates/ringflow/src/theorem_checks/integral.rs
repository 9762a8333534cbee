//! Integral identities: the Pohozaev balance and the trimmed-region identity
//! behind the length bounds.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model_family::{BranchKind, CRITICAL_TOL};
use crate::report::CheckReport;
use crate::solver::Wall;

use super::contour::{line_quadrature, LevelContour};
use super::region::{RegionView, Side};
use super::{rigidity, CheckOptions};

/// `(8 ∬_N (u - u_max) dμ, ∮_{Γ_N} (|∇u|² - 4u_max) ⟨x, ν⟩ dσ)`.
pub fn pohozaev_sides(region: &RegionView) -> (f64, f64) {
    let field = region.field;
    let u_max = region.u_max();
    let nt = field.n_theta();
    let nr = field.n_r();
    let mut lhs = 0.0;
    for m in 0..nt {
        let g: Vec<f64> = (0..nr).map(|j| (field.u[(j, m)] - u_max) * field.jacobian(j, m)).collect();
        let (lo, hi) = region.s_range(m);
        lhs += field.grid.integrate_between(&g, lo, hi);
    }
    lhs *= 8.0 * 2.0 * PI / nt as f64;
    let mut rhs = 0.0;
    for t in region.wall_traces() {
        let f: Vec<f64> = t.gradient_norm.iter().map(|g| g * g - 4.0 * u_max).collect();
        rhs += 2.0 * PI * f.iter().zip(&t.support_element).map(|(a, b)| a * b).sum::<f64>() / nt as f64;
    }
    (lhs, rhs)
}

/// Relative residual of the Pohozaev balance on the region.
pub fn check_pohozaev(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let (lhs, rhs) = pohozaev_sides(region);
    let rel = (lhs - rhs).abs() / lhs.abs().max(f64::MIN_POSITIVE);
    let mut rep = CheckReport::new(format!("pohozaev[{}]", region.side.label()), rel, opts.tolerance_for(region.field));
    rep.diag("lhs", lhs);
    rep.diag("rhs", rhs);
    if lhs >= 0.0 {
        rep.pass = false;
        rep.note("interior integral is not negative");
    }
    Ok(rep)
}

/// Classify a region with constant boundary gradient by its NWSS and check
/// the orientation of `Γ_N` agrees.
///
/// Errors: `Precondition` when `Γ_N` is disconnected or the gradient is not
/// constant within `tol`, `Threshold` when `τ̄` is within `1e-9` of `√2`,
/// `Inconsistent` when the NWSS side and the geometric side disagree.
pub fn classify_region_by_pohozaev(region: &RegionView, tol: f64) -> Result<BranchKind> {
    if region.side == Side::Whole {
        return Err(Error::Precondition("the boundary of the region is not connected".into()));
    }
    let trace = &region.wall_traces()[0];
    let spread = trace.max_gradient() - trace.gradient_norm.iter().copied().fold(f64::INFINITY, f64::min);
    if spread > tol {
        return Err(Error::Precondition(format!("|∇u| varies by {spread:.3e} on the boundary (tolerance {tol:.1e})")));
    }
    let tau = region.tau;
    if (tau - 2f64.sqrt()).abs() <= CRITICAL_TOL {
        return Err(Error::Threshold(format!("NWSS {tau} at the excluded value sqrt(2)")));
    }
    let kind = if tau < 2f64.sqrt() { BranchKind::Outer } else { BranchKind::Inner };
    // counterclockwise (outer) boundaries carry η = +1
    let eta = if region.walls[0].wall == Wall::Outer { 1.0 } else { -1.0 };
    let g2 = trace.max_gradient().powi(2);
    if (g2 - 4.0 * region.u_max()) * eta >= 0.0 {
        return Err(Error::Inconsistent(format!(
            "|∇u|² - 4u_max = {:.3e} has the sign of the orientation {eta}",
            g2 - 4.0 * region.u_max()
        )));
    }
    let side_kind = match region.side {
        Side::OuterRegion => BranchKind::Outer,
        _ => BranchKind::Inner,
    };
    if kind != side_kind {
        return Err(Error::Inconsistent(format!(
            "NWSS {tau:.9} classifies the {} region as {kind:?}",
            region.side.label()
        )));
    }
    Ok(kind)
}

/// Residual of
/// `∬_{N_ε} 2Ψ²/(Ψ²-R²)³ (W - W_R) = -∮_{Γ_N} |∇u|/(Ψ²-R²) + ∮_{Σ_ε} |∇u|/(Ψ²-R²)`
/// on `N_ε = N ∩ {u ≤ u_max - ε}`, in normalized units.
pub fn check_crucial_identity(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("crucial_identity[{}]", region.side.label());
    let Some(p) = region.pseudo() else {
        return Ok(CheckReport::not_applicable(name, "NWSS at the threshold sqrt(2): no comparison model"));
    };
    let field = region.field;
    let nt = field.n_theta();
    let mu = region.scale;
    let r2 = region.r() * region.r();
    let eps_raw = opts.crucial_eps / (mu * mu);
    let level = region.u_max() - eps_raw;
    let ridge = &region.max_set.ridge;
    if ridge.value.iter().any(|&v| v < level) {
        return Ok(CheckReport::not_applicable(
            name,
            format!("level u_max - {:.1e} does not enclose the maximum set", opts.crucial_eps),
        ));
    }
    // integration intervals per line and the trimmed contours
    let mut pieces: Vec<(Vec<f64>, Vec<f64>, bool)> = Vec::new();
    match region.side {
        Side::InnerRegion => pieces.push((vec![0.0; nt], ridge.s.clone(), true)),
        Side::OuterRegion => pieces.push((ridge.s.clone(), vec![1.0; nt], false)),
        Side::Whole => {
            pieces.push((vec![0.0; nt], ridge.s.clone(), true));
            pieces.push((ridge.s.clone(), vec![1.0; nt], false));
        }
    }
    let weight = |u_raw: f64| -> Result<(f64, f64)> {
        let u = region.normalized_u(u_raw);
        let psi = p.psi(u)?;
        let q = psi * psi - r2;
        Ok((psi, q))
    };
    let nq = field.n_r().max(16);
    let mut lhs = 0.0;
    let mut sigma_term = 0.0;
    for (lo, hi, wall_first) in &pieces {
        let c = LevelContour::extract(field, level, lo, hi)
            .ok_or_else(|| Error::NoConvergence("trimmed level curve not found".into()))?;
        for m in 0..nt {
            let (a, b) = if *wall_first { (lo[m], c.s[m]) } else { (c.s[m], hi[m]) };
            let mut err = None;
            let v = line_quadrature(a, b, nq, |s| {
                let u = field.value_at(s, m);
                let wn = mu * mu * field.grad_sq_at(s, m);
                match weight(u) {
                    Ok((psi, q)) => {
                        let wr = (q / psi).powi(2);
                        2.0 * psi * psi / q.powi(3) * (wn - wr) * field.geom.radius(s, m) * field.geom.h(m)
                    }
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
            lhs += v * mu * mu;
        }
        let (_, q) = weight(level)?;
        let f: Vec<f64> = c.gradient.iter().map(|g| mu * g / q).collect();
        sigma_term += mu * c.integrate(&f);
    }
    lhs *= 2.0 * PI / nt as f64;
    let mut gamma_term = 0.0;
    for t in region.wall_traces() {
        let (_, q) = weight(0.0)?;
        let f: Vec<f64> = t.gradient_norm.iter().map(|g| mu * g / q).collect();
        gamma_term += mu * t.integrate(&f);
    }
    let rhs = -gamma_term + sigma_term;
    let scale = gamma_term.abs() + sigma_term.abs();
    let rel = (lhs - rhs).abs() / scale;
    let mut rep = CheckReport::new(name, rel, opts.tolerance_for(field));
    rep.diag("lhs", lhs);
    rep.diag("rhs", rhs);
    rep.diag("gamma_term", gamma_term);
    rep.diag("sigma_term", sigma_term);
    rep.diag("eps", opts.crucial_eps);
    // the left side is ≤ 0 on outer branches and ≥ 0 on inner ones
    let sign_ok = match region.branch {
        BranchKind::Outer => lhs <= opts.tolerance_for(field) * scale,
        _ => lhs >= -opts.tolerance_for(field) * scale,
    };
    if !sign_ok {
        rep.pass = false;
        rep.note(format!("left side {lhs:.3e} has the wrong sign for the {:?} branch", region.branch));
    }
    rigidity(&mut rep, lhs.abs() / scale, opts.rigidity_threshold);
    Ok(rep)
}
