//! Connected components of `Ω \ MAX(u)` and the model they are compared to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_family::{expected_core_radius, inner_radius, model_umax, BranchKind, CoreRadius, NwssValue};
use crate::pseudo_radial::{Branch, PseudoRadialBranch};
use crate::solver::fourier::refine_max;
use crate::solver::{
    boundary_normal_derivative, locate_max_set, BoundaryTrace, Field, MaxSetEstimate, MaxSetKind, NormalConvention,
    Wall,
};

use super::contour::SigmaCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Between the inner wall and the max curve.
    InnerRegion,
    /// Between the max curve and the outer wall.
    OuterRegion,
    /// All of `Ω`, used when `MAX(u)` is a finite set of points.
    Whole,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::InnerRegion => "inner",
            Side::OuterRegion => "outer",
            Side::Whole => "whole",
        }
    }

    pub fn walls(self) -> &'static [Wall] {
        match self {
            Side::InnerRegion => &[Wall::Inner],
            Side::OuterRegion => &[Wall::Outer],
            Side::Whole => &[Wall::Inner, Wall::Outer],
        }
    }
}

/// Maximal wall shear stress of one boundary component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallNwss {
    pub wall: Wall,
    /// `max |∇u|`, refined between nodes.
    pub max_gradient: f64,
    pub theta_max: f64,
    /// `max |∇u| / √(2 u_max)`.
    pub tau: f64,
}

/// Measure both walls of a field.
pub fn wall_nwss(field: &Field, u_max: f64) -> [WallNwss; 2] {
    [Wall::Inner, Wall::Outer].map(|wall| {
        let t = boundary_normal_derivative(field, wall, NormalConvention::Outward);
        let (theta_max, g) = refine_max(&field.per, &t.gradient_norm);
        let g = g.max(t.max_gradient());
        WallNwss { wall, max_gradient: g, theta_max, tau: g / (2.0 * u_max).sqrt() }
    })
}

/// A region `N` together with its expected core radius and normalization.
#[derive(Debug, Clone)]
pub struct RegionView<'a> {
    pub field: &'a Field,
    pub side: Side,
    pub max_set: MaxSetEstimate,
    /// Components of `Γ_N`.
    pub walls: Vec<WallNwss>,
    /// `τ̄(N)`: the largest NWSS among the components of `Γ_N`.
    pub tau: f64,
    pub branch: BranchKind,
    pub r_expected: CoreRadius<f64>,
    /// `μ = √(u_max(R)/u_max)`; lengths scale by `μ`, `u` and `|∇u|²` by `μ²`.
    pub scale: f64,
}

impl<'a> RegionView<'a> {
    pub fn new(field: &'a Field, side: Side) -> Result<Self> {
        let ms = locate_max_set(field);
        Self::from_max_set(field, &ms, side)
    }

    pub fn from_max_set(field: &'a Field, max_set: &MaxSetEstimate, side: Side) -> Result<Self> {
        match (max_set.kind, side) {
            (MaxSetKind::Curve, Side::Whole) => {
                return Err(Error::Precondition("the maximum set is a curve; pick the inner or outer region".into()))
            }
            (MaxSetKind::Points, Side::InnerRegion | Side::OuterRegion) => {
                return Err(Error::Precondition(
                    "the maximum set is a finite set of points; Ω \\ MAX(u) is connected".into(),
                ))
            }
            _ => {}
        }
        let u_max = max_set.u_max;
        let all = wall_nwss(field, u_max);
        let walls: Vec<WallNwss> = all.into_iter().filter(|w| side.walls().contains(&w.wall)).collect();
        let tau = walls.iter().map(|w| w.tau).fold(f64::NEG_INFINITY, f64::max);
        let branch = NwssValue::new(tau)?.branch();
        let r_expected = expected_core_radius(NwssValue::new(tau)?)?;
        let scale = (model_umax(r_expected.value()) / u_max).sqrt();
        Ok(Self { field, side, max_set: max_set.clone(), walls, tau, branch, r_expected, scale })
    }

    /// The regions of `Ω \ MAX(u)`: inner and outer around a max curve, or
    /// the whole domain around isolated maxima.
    pub fn regions(field: &'a Field) -> Result<Vec<Self>> {
        let ms = locate_max_set(field);
        Self::regions_from(field, &ms)
    }

    pub fn regions_from(field: &'a Field, ms: &MaxSetEstimate) -> Result<Vec<Self>> {
        match ms.kind {
            MaxSetKind::Curve => Ok(vec![
                Self::from_max_set(field, ms, Side::InnerRegion)?,
                Self::from_max_set(field, ms, Side::OuterRegion)?,
            ]),
            MaxSetKind::Points => Ok(vec![Self::from_max_set(field, ms, Side::Whole)?]),
        }
    }

    pub fn r(&self) -> f64 {
        self.r_expected.value()
    }

    pub fn u_max(&self) -> f64 {
        self.max_set.u_max
    }

    /// `u_max` after normalization, i.e. `u_max(R)`.
    pub fn normalized_u_max(&self) -> f64 {
        model_umax(self.r())
    }

    /// `r_i(R)` of the comparison model.
    pub fn model_inner_radius(&self) -> Result<f64> {
        inner_radius(self.r())
    }

    /// Parameter range `[lo, hi]` of radial line `m` inside the region.
    pub fn s_range(&self, m: usize) -> (f64, f64) {
        let s = self.max_set.ridge.s[m];
        match self.side {
            Side::InnerRegion => (0.0, s),
            Side::OuterRegion => (s, 1.0),
            Side::Whole => (0.0, 1.0),
        }
    }

    /// Whether grid node `(j, m)` lies in the closure of the region.
    pub fn contains(&self, j: usize, m: usize) -> bool {
        let (lo, hi) = self.s_range(m);
        let s = self.field.grid.s[j];
        s >= lo && s <= hi
    }

    /// Whether node `(j, m)` is an interior node of the region away from the
    /// walls and the max curve.
    pub fn is_interior(&self, j: usize, m: usize) -> bool {
        let n = self.field.n_r();
        if j == 0 || j + 1 == n || !self.contains(j, m) {
            return false;
        }
        match self.side {
            Side::Whole => true,
            _ => {
                let s = self.field.grid.s[j];
                (s - self.max_set.ridge.s[m]).abs() > 1e-12
            }
        }
    }

    /// Pseudo-radial branch of the region, `None` at the threshold.
    pub fn pseudo(&self) -> Option<PseudoRadialBranch<f64>> {
        let b = match self.branch {
            BranchKind::Outer => Branch::Plus,
            BranchKind::Inner => Branch::Minus,
            BranchKind::Critical => return None,
        };
        PseudoRadialBranch::new(self.r_expected, b).ok()
    }

    /// Raw potential value mapped to the normalized scale, clamped to the
    /// range of the pseudo-radial function.
    pub fn normalized_u(&self, u: f64) -> f64 {
        (self.scale * self.scale * u).clamp(0.0, self.normalized_u_max())
    }

    /// Wall traces of `Γ_N` with exterior normals.
    pub fn wall_traces(&self) -> Vec<BoundaryTrace> {
        self.walls
            .iter()
            .map(|w| boundary_normal_derivative(self.field, w.wall, NormalConvention::Outward))
            .collect()
    }

    /// Smoothed max curve, when the maximum set is a curve.
    pub fn sigma(&self) -> Option<SigmaCurve> {
        match self.max_set.kind {
            MaxSetKind::Curve => Some(SigmaCurve::fit(self.field, &self.max_set.ridge)),
            MaxSetKind::Points => None,
        }
    }

    /// Sign turning the polar curvature of `Σ` into the curvature with
    /// respect to the normal exterior to `N`.
    pub fn sigma_orientation(&self) -> f64 {
        match self.side {
            Side::OuterRegion => -1.0,
            _ => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_family::{inner_radius, tau_inner, tau_outer};
    use crate::solver::{solve_poisson, FourierSeries, RingDomain, SolveOptions};

    #[test]
    fn model_regions_recover_core_radius() {
        let ri = inner_radius(0.5).unwrap();
        let f = solve_poisson(&RingDomain::annulus(ri).unwrap(), &SolveOptions::new(32, 32)).unwrap();
        let regs = RegionView::regions(&f).unwrap();
        assert_eq!(regs.len(), 2);
        let (inner, outer) = (&regs[0], &regs[1]);
        assert_eq!(inner.branch, BranchKind::Inner);
        assert_eq!(outer.branch, BranchKind::Outer);
        assert!((inner.tau - tau_inner(0.5).unwrap()).abs() < 1e-9);
        assert!((outer.tau - tau_outer(0.5).unwrap()).abs() < 1e-9);
        for r in &regs {
            assert!((r.r() - 0.5).abs() < 1e-8);
            assert!((r.scale - 1.0).abs() < 1e-9);
        }
        for m in 0..32 {
            for j in 0..32 {
                let r = f.radius(j, m);
                if r > 0.5 + 1e-9 {
                    assert!(outer.contains(j, m) && !inner.contains(j, m));
                } else if r < 0.5 - 1e-9 {
                    assert!(inner.contains(j, m) && !outer.contains(j, m));
                }
            }
        }
        assert!(RegionView::new(&f, Side::Whole).is_err());
    }

    #[test]
    fn perturbed_domain_has_one_region() {
        let d = RingDomain::new(0.3, FourierSeries::cosine(2, 0.02), FourierSeries::zero()).unwrap();
        let f = solve_poisson(&d, &SolveOptions::new(32, 32)).unwrap();
        let regs = RegionView::regions(&f).unwrap();
        assert_eq!(regs.len(), 1);
        assert_eq!(regs[0].side, Side::Whole);
        assert_eq!(regs[0].walls.len(), 2);
        assert!(RegionView::new(&f, Side::OuterRegion).is_err());
    }
}
