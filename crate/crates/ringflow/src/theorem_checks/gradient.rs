//! Pointwise gradient comparisons and the monotone quantity `U(t)`.

use crate::error::Result;
use crate::lstsq::lstsq;
use crate::model_family::BranchKind;
use crate::report::CheckReport;

use super::contour::LevelContour;
use super::region::{RegionView, Side};
use super::{rigidity, CheckOptions};

/// `n` levels evenly spread over `[0, u_max (1 - margin)]`.
pub fn uniform_levels(u_max: f64, n: usize, margin: f64) -> Vec<f64> {
    let top = u_max * (1.0 - margin);
    if n < 2 {
        return vec![0.0];
    }
    (0..n).map(|j| top * j as f64 / (n - 1) as f64).collect()
}

fn contours_at(region: &RegionView, level: f64) -> Option<Vec<LevelContour>> {
    let field = region.field;
    let nt = field.n_theta();
    let ridge = &region.max_set.ridge;
    let mut brackets: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    match region.side {
        Side::InnerRegion | Side::OuterRegion => {
            let (lo, hi): (Vec<f64>, Vec<f64>) = (0..nt).map(|m| region.s_range(m)).unzip();
            brackets.push((lo, hi));
        }
        Side::Whole => {
            brackets.push((vec![0.0; nt], ridge.s.clone()));
            brackets.push((ridge.s.clone(), vec![1.0; nt]));
        }
    }
    let mut out = Vec::new();
    for (lo, hi) in brackets {
        let c = if level <= 0.0 {
            // the wall itself
            let wall: Vec<f64> = lo.iter().map(|&l| if l == 0.0 { 0.0 } else { 1.0 }).collect();
            LevelContour::from_parameters(field, 0.0, wall)
        } else {
            LevelContour::extract(field, level, &lo, &hi)?
        };
        out.push(c);
    }
    Some(out)
}

/// `(t, U(t))` with `U(t) = (u_max - t)⁻¹ ∮_{u=t} |∇u| dσ` on the region.
///
/// Levels too close to a critical value, or whose contour has a vanishing
/// gradient, are skipped with a warning.
pub fn contour_u_profile(region: &RegionView, levels: &[f64]) -> Vec<(f64, f64)> {
    let u_max = region.u_max();
    let guard = 1e-6 * u_max;
    let ceiling = match region.side {
        Side::Whole => region.max_set.ridge.value.iter().copied().fold(f64::INFINITY, f64::min),
        _ => u_max,
    };
    let mut out = Vec::new();
    for &t in levels {
        if t >= ceiling - guard || t < 0.0 {
            log::debug!("level {t:.6e} skipped: within {guard:.1e} of a critical value");
            continue;
        }
        let Some(cs) = contours_at(region, t) else {
            log::debug!("level {t:.6e} skipped: contour extraction failed");
            continue;
        };
        if t > 0.0 && cs.iter().any(|c| c.min_gradient() < 1e-8 * u_max.sqrt()) {
            log::debug!("level {t:.6e} skipped: gradient vanishes on the contour");
            continue;
        }
        let flux: f64 = cs.iter().map(|c| c.integrate(&c.gradient)).sum();
        out.push((t, flux / (u_max - t)));
    }
    out
}

/// `U(t)` must be nonincreasing in `t`. The monotonicity argument requires
/// `τ̄(N) ≤ 1`; otherwise the report is marked not applicable but the
/// measured profile is kept.
pub fn check_u_monotone(region: &RegionView, levels: &[f64], opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("u_monotone[{}]", region.side.label());
    let tol = opts.tolerance_for(region.field);
    let mut sorted = levels.to_vec();
    sorted.sort_by(f64::total_cmp);
    let prof = contour_u_profile(region, &sorted);
    if prof.len() < 2 {
        return Ok(CheckReport::not_applicable(name, "fewer than two regular levels"));
    }
    let worst = prof.windows(2).map(|w| w[1].1 - w[0].1).fold(f64::NEG_INFINITY, f64::max);
    let mut rep = CheckReport::new(name, worst, tol);
    let u0 = prof[0].1;
    let top = prof.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    rep.diag("u_at_first_level", u0);
    rep.diag("u_first_minus_max", u0 - top);
    rep.diag("levels_used", prof.len() as f64);
    rep.diag("levels_skipped", (sorted.len() - prof.len()) as f64);
    rep.diag("tau", region.tau);
    rep.sample_columns = vec!["t".into(), "U".into()];
    rep.samples = prof.iter().map(|&(t, u)| vec![t, u]).collect();
    if region.tau > 1.0 {
        rep = rep.inapplicable_because(format!("requires NWSS <= 1, region has {:.6}", region.tau));
    }
    Ok(rep)
}

/// `|∇u|² + 2u - 2u_max ≤ 0` on the region, the numerator behind the
/// monotonicity of `U`. Same applicability as [`check_u_monotone`].
pub fn check_divergence_inequality(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let field = region.field;
    let tol = opts.tolerance_for(field);
    let w = field.grad_sq();
    let u_max = region.u_max();
    let mut worst = f64::NEG_INFINITY;
    let mut min_val = f64::INFINITY;
    for m in 0..field.n_theta() {
        for j in 0..field.n_r() {
            if region.contains(j, m) {
                let v = w[(j, m)] + 2.0 * field.u[(j, m)] - 2.0 * u_max;
                worst = worst.max(v);
                min_val = min_val.min(v);
            }
        }
    }
    let mut rep = CheckReport::new(format!("divergence_inequality[{}]", region.side.label()), worst, tol);
    rep.diag("min_value", min_val);
    rep.diag("tau", region.tau);
    if region.tau > 1.0 {
        rep = rep.inapplicable_because(format!("requires NWSS <= 1, region has {:.6}", region.tau));
    }
    Ok(rep)
}

/// `W ≤ W_R` at every node of the normalized region.
pub fn check_gradient_estimate(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("gradient_estimate[{}]", region.side.label());
    let Some(p) = region.pseudo() else {
        return Ok(CheckReport::not_applicable(name, "NWSS at the threshold sqrt(2): no comparison model"));
    };
    let field = region.field;
    let tol = opts.tolerance_for(field);
    let w = field.grad_sq();
    let mu2 = region.scale * region.scale;
    let mut worst = f64::NEG_INFINITY;
    let mut interior_max = f64::NEG_INFINITY;
    let mut max_abs = 0.0f64;
    let mut samples = Vec::new();
    for m in 0..field.n_theta() {
        for j in 0..field.n_r() {
            if !region.contains(j, m) {
                continue;
            }
            let u = region.normalized_u(field.u[(j, m)]);
            let wn = mu2 * w[(j, m)];
            let wr = p.w_model(u)?;
            let d = wn - wr;
            worst = worst.max(d);
            max_abs = max_abs.max(d.abs());
            if region.is_interior(j, m) {
                interior_max = interior_max.max(d);
            }
            samples.push(vec![field.geom.theta[m], field.grid.s[j], u, wn, wr]);
        }
    }
    let mut rep = CheckReport::new(name, worst, tol);
    rep.diag("interior_max_difference", interior_max);
    rep.diag("max_abs_difference", max_abs);
    rep.diag("tau", region.tau);
    rep.diag("r_expected", region.r());
    rep.diag("scale", region.scale);
    rigidity(&mut rep, max_abs, opts.rigidity_threshold);
    rep.sample_columns = ["theta", "s", "u", "W", "W_R"].map(String::from).to_vec();
    rep.samples = samples;
    Ok(rep)
}

struct LineFit {
    lead_w: f64,
    slope_w: f64,
    lead_wr: f64,
    slope_wr: f64,
    lead_u: f64,
    slope_u: f64,
    kappa: f64,
}

fn fit_line(region: &RegionView, sig: &super::SigmaCurve, m: usize, n_fit: usize, window: f64) -> Result<Option<LineFit>> {
    let field = region.field;
    let p = match region.pseudo() {
        Some(p) => p,
        None => return Ok(None),
    };
    let mu = region.scale;
    let ori = region.sigma_orientation();
    let theta = field.geom.theta[m];
    let rho_sigma = sig.radius(theta, 0);
    let (a, h) = (field.geom.a[m], field.geom.h(m));
    let (lo, hi) = region.s_range(m);
    let umax_n = region.normalized_u_max();
    let mut rows_w = Vec::new();
    let mut rhs_w = Vec::new();
    let mut rhs_wr = Vec::new();
    let mut rows_u = Vec::new();
    let mut rhs_u = Vec::new();
    let mut foot = theta;
    for k in 0..n_fit {
        let delta = window * (0.1 + 0.9 * k as f64 / (n_fit - 1) as f64);
        let rho = rho_sigma - ori * delta;
        let s = (rho - a) / h;
        if s < lo || s > hi {
            return Ok(None);
        }
        let (d, ft) = sig.distance([rho * theta.cos(), rho * theta.sin()], theta);
        if k == 0 {
            foot = ft;
        }
        let dn = mu * d;
        let u = region.normalized_u(field.value_at(s, m));
        let wn = mu * mu * field.grad_sq_at(s, m);
        let wr = p.w_model(u)?;
        let x = umax_n - u;
        rows_w.push(vec![1.0, dn, dn * dn]);
        rhs_w.push(wn / (4.0 * dn * dn));
        rhs_wr.push(wr / (4.0 * dn * dn));
        rows_u.push(vec![1.0, x.sqrt(), x]);
        rhs_u.push(wr / x);
    }
    let cw = lstsq(&rows_w, &rhs_w)?;
    let cr = lstsq(&rows_w, &rhs_wr)?;
    let cu = lstsq(&rows_u, &rhs_u)?;
    Ok(Some(LineFit {
        lead_w: 4.0 * cw[0],
        slope_w: cw[1] / cw[0],
        lead_wr: 4.0 * cr[0],
        slope_wr: cr[1] / cr[0],
        lead_u: cu[0],
        slope_u: cu[1],
        kappa: ori * sig.polar_curvature(foot) / mu,
    }))
}

/// Fits of `W`, `W_R` against the distance `r` to `Σ`, and of `W_R` against
/// `u_max - u`, on each radial line near the max curve.
///
/// Expected: `W = 4r²(1 + κ r)`, `W_R = 4r²(1 + (κ/3 ∓ 2/(3R)) r)` and
/// `W_R = 4(u_max - u) ∓ 8/(3R) (u_max - u)^{3/2}`, upper signs for
/// `τ̄(N) < √2`.
pub fn check_w_expansion_near_sigma(region: &RegionView, opts: &CheckOptions) -> Result<CheckReport> {
    let name = format!("w_expansion[{}]", region.side.label());
    let Some(sig) = region.sigma() else {
        return Ok(CheckReport::not_applicable(name, "maximum set is not a curve"));
    };
    if region.branch == BranchKind::Critical {
        return Ok(CheckReport::not_applicable(name, "NWSS at the threshold sqrt(2): no comparison model"));
    }
    let r = region.r();
    let sign = if region.branch == BranchKind::Outer { -1.0 } else { 1.0 };
    let field = region.field;
    let window = opts.expansion_window * r / region.scale;
    let mut worst_rel = 0.0f64;
    let mut worst_lead = 0.0f64;
    let mut fitted = 0usize;
    let mut samples = Vec::new();
    let (mut c_mean, mut k_mean) = (0.0, 0.0);
    for m in 0..field.n_theta() {
        let Some(f) = fit_line(region, &sig, m, 16, window)? else { continue };
        fitted += 1;
        let want_wr = f.kappa / 3.0 + sign * 2.0 / (3.0 * r);
        let want_u = sign * 8.0 / (3.0 * r);
        let rel = |got: f64, want: f64| (got - want).abs() / want.abs().max(1e-12);
        worst_rel = worst_rel.max(rel(f.slope_w, f.kappa)).max(rel(f.slope_wr, want_wr)).max(rel(f.slope_u, want_u));
        worst_lead =
            worst_lead.max((f.lead_w - 4.0).abs()).max((f.lead_wr - 4.0).abs()).max((f.lead_u - 4.0).abs());
        c_mean += f.slope_w;
        k_mean += f.kappa;
        samples.push(vec![field.geom.theta[m], f.kappa, f.slope_w, f.slope_wr, want_wr, f.lead_u, f.slope_u]);
    }
    if fitted == 0 {
        return Ok(CheckReport::not_applicable(name, "fit window leaves the region on every line"));
    }
    let mut rep = CheckReport::new(name, worst_rel, opts.expansion_rel_tol);
    rep.diag("lines_fitted", fitted as f64);
    rep.diag("leading_coefficient_error", worst_lead);
    rep.diag("mean_cubic_coefficient", c_mean / fitted as f64);
    rep.diag("mean_curvature", k_mean / fitted as f64);
    if worst_lead > 1e-3 {
        rep.pass = false;
        rep.note(format!("leading coefficient off by {worst_lead:.3e} > 1e-3"));
    }
    // level curves close to Σ approach its length
    let eps = 1e-8 * region.u_max();
    if let Some(cs) = contours_at(region, region.u_max() - eps) {
        let level_len: f64 = cs.iter().map(|c| c.length()).sum();
        rep.diag("level_length_gap", region.scale * (level_len - sig.length()));
    }
    rep.sample_columns =
        ["theta", "kappa", "c_W", "c_WR", "c_WR_expected", "lead_u", "slope_u"].map(String::from).to_vec();
    rep.samples = samples;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_family::inner_radius;
    use crate::pseudo_radial::{Branch, PseudoRadialBranch};
    use crate::solver::{solve_poisson, RingDomain, SolveOptions};
    use std::f64::consts::PI;

    fn model(n_theta: usize, n_r: usize) -> crate::solver::Field {
        let ri = inner_radius(0.5).unwrap();
        solve_poisson(&RingDomain::annulus(ri).unwrap(), &SolveOptions::new(n_theta, n_r)).unwrap()
    }

    #[test]
    fn u_profile_matches_closed_form_on_the_model() {
        let f = model(32, 40);
        let regs = RegionView::regions(&f).unwrap();
        let opts = CheckOptions::default();
        for reg in &regs {
            let levels = uniform_levels(reg.u_max(), 40, opts.level_margin);
            let b = if reg.side == Side::OuterRegion { Branch::Plus } else { Branch::Minus };
            let p = PseudoRadialBranch::new(crate::model_family::CoreRadius::new(0.5).unwrap(), b).unwrap();
            let prof = contour_u_profile(reg, &levels);
            assert_eq!(prof.len(), 40);
            for (t, u) in prof {
                let psi = p.psi(t).unwrap();
                let want = 2.0 * PI * (psi * psi - 0.25).abs() / (p.u_max() - t);
                assert!((u - want).abs() < 1e-6 * want, "{t} {u} {want}");
            }
            let rep = check_u_monotone(reg, &levels, &opts).unwrap();
            assert!(!rep.applicable);
            // U increases on ring domains
            assert!(rep.worst_violation.unwrap() > 0.0);
        }
    }

    #[test]
    fn gradient_estimate_is_saturated_on_the_model() {
        let f = model(32, 40);
        for reg in RegionView::regions(&f).unwrap() {
            let rep = check_gradient_estimate(&reg, &CheckOptions::default().with_tolerance(1e-8)).unwrap();
            assert!(rep.pass, "{rep:?}");
            assert_eq!(rep.rigidity, Some(true));
            let div = check_divergence_inequality(&reg, &CheckOptions::default()).unwrap();
            assert!(!div.applicable && div.diagnostics["min_value"] > -1e-9);
        }
    }

    #[test]
    fn expansions_near_sigma_on_the_model() {
        let f = model(32, 48);
        for reg in RegionView::regions(&f).unwrap() {
            let rep = check_w_expansion_near_sigma(&reg, &CheckOptions::default()).unwrap();
            assert!(rep.pass, "{:?}", rep.diagnostics);
            let k = rep.diagnostics["mean_curvature"];
            let want = if reg.side == Side::OuterRegion { -2.0 } else { 2.0 };
            assert!((k - want).abs() < 1e-8);
            assert!(rep.diagnostics["level_length_gap"].abs() < 1e-2);
        }
    }
}
