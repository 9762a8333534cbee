//! Detection of the maximum set `{u = u_max}`.

use serde::{Deserialize, Serialize};

use super::fourier::refine_max;
use super::Field;
use crate::roots::bisect;

/// Default `ε_loc / u_max`.
pub const EPS_LOC_REL: f64 = 1e-8;

/// Per-θ maximum of `u` along each radial line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ridge {
    /// Location `s*(θ_m)` of the radial maximum.
    pub s: Vec<f64>,
    /// `u(s*(θ_m), θ_m)`.
    pub value: Vec<f64>,
    /// Global maximum, refined in θ by trigonometric interpolation.
    pub u_max: f64,
    pub theta_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaxSetKind {
    /// The near-maximal set spans every θ.
    Curve,
    /// Only some radial lines reach the maximum.
    Points,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxSetEstimate {
    pub kind: MaxSetKind,
    /// Ridge points `(x, y)` whose value is within `eps_loc` of `u_max`.
    pub samples: Vec<[f64; 2]>,
    pub u_max: f64,
    pub eps_loc: f64,
    /// Fraction of θ nodes whose ridge value is within `eps_loc` of `u_max`.
    pub theta_fraction: f64,
    /// Set when the fraction is neither clearly a curve nor isolated points.
    pub ambiguous: bool,
    pub ridge: Ridge,
}

/// Radial maximum on line `m`: root of `∂u/∂s` near the best node.
fn line_max(field: &Field, m: usize) -> (f64, f64) {
    let col = field.u.column(m);
    let n = field.n_r();
    let (jb, _) = col
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
    let lo = field.grid.s[jb.saturating_sub(1)];
    let hi = field.grid.s[(jb + 1).min(n - 1)];
    let us = |s: f64| field.u_s_at(s, m);
    let s_star = match bisect(us, lo, hi, 1e-15) {
        Ok(s) => s,
        Err(_) => field.grid.s[jb],
    };
    (s_star, field.value_at(s_star, m))
}

pub fn ridge(field: &Field) -> Ridge {
    let nt = field.n_theta();
    let (s, value): (Vec<f64>, Vec<f64>) = (0..nt).map(|m| line_max(field, m)).unzip();
    let (theta_max, u_max) = refine_max(&field.per, &value);
    let node_max = value.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ridge { s, value, u_max: u_max.max(node_max), theta_max }
}

/// Locate the maximum set with `ε_loc = EPS_LOC_REL · u_max`.
pub fn locate_max_set(field: &Field) -> MaxSetEstimate {
    locate_max_set_with(field, EPS_LOC_REL)
}

pub fn locate_max_set_with(field: &Field, eps_rel: f64) -> MaxSetEstimate {
    let ridge = ridge(field);
    let eps_loc = eps_rel * ridge.u_max;
    let mut samples = Vec::new();
    for (m, (&s, &v)) in ridge.s.iter().zip(&ridge.value).enumerate() {
        if v >= ridge.u_max - eps_loc {
            let r = field.geom.radius(s, m);
            let t = field.geom.theta[m];
            samples.push([r * t.cos(), r * t.sin()]);
        }
    }
    let frac = samples.len() as f64 / field.n_theta() as f64;
    let kind = if samples.len() == field.n_theta() { MaxSetKind::Curve } else { MaxSetKind::Points };
    let ambiguous = frac > 0.1 && frac < 0.9;
    if ambiguous {
        log::warn!("max-set classification ambiguous: {:.0}% of radial lines qualify", 100.0 * frac);
    }
    MaxSetEstimate { kind, samples, u_max: ridge.u_max, eps_loc, theta_fraction: frac, ambiguous, ridge }
}

/// Parameters `s` where `u = level` on radial line `m`, inside and outside
/// the ridge at `s_ridge`.
pub fn level_crossings(field: &Field, m: usize, level: f64, s_ridge: f64) -> (Option<f64>, Option<f64>) {
    let f = |s: f64| field.value_at(s, m) - level;
    let inner = bisect(f, 0.0, s_ridge, 1e-15).ok();
    let outer = bisect(f, s_ridge, 1.0, 1e-15).ok();
    (inner, outer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_family::{inner_radius, model_umax};
    use crate::solver::{solve_poisson, FourierSeries, RingDomain, SolveOptions};

    #[test]
    fn annulus_has_circle_of_maxima() {
        let ri = inner_radius(0.5).unwrap();
        let f = solve_poisson(&RingDomain::annulus(ri).unwrap(), &SolveOptions::new(64, 48)).unwrap();
        let ms = locate_max_set(&f);
        assert_eq!(ms.kind, MaxSetKind::Curve);
        assert!(!ms.ambiguous);
        assert!((ms.u_max - model_umax(0.5)).abs() < 1e-10);
        for p in &ms.samples {
            assert!((p[0].hypot(p[1]) - 0.5).abs() < 1e-4);
        }
        let (a, b) = level_crossings(&f, 3, ms.u_max * 0.5, ms.ridge.s[3]);
        assert!(a.unwrap() < ms.ridge.s[3] && b.unwrap() > ms.ridge.s[3]);
    }

    #[test]
    fn small_perturbation_isolates_maxima() {
        let ri = inner_radius(0.5).unwrap();
        let d = RingDomain::new(ri, FourierSeries::cosine(2, 1e-3), FourierSeries::zero()).unwrap();
        let f = solve_poisson(&d, &SolveOptions::new(64, 48)).unwrap();
        let ms = locate_max_set(&f);
        assert!(ms.u_max > 0.0);
        assert_eq!(ms.kind, MaxSetKind::Points);
        for p in &ms.samples {
            assert!((p[0].hypot(p[1]) - 0.5).abs() < 1e-2);
        }
        for (m, &s) in ms.ridge.s.iter().enumerate() {
            assert!((f.geom.radius(s, m) - 0.5).abs() < 5e-3);
        }
    }
}
