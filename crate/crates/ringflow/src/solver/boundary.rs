//! Wall traces: normal derivatives, curvature and arclength.

use serde::{Deserialize, Serialize};

use super::domain::RingDomain;
use super::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Wall {
    Inner,
    Outer,
}

/// Which normal `∂u/∂ν` uses, relative to the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalConvention {
    /// Exterior normal of the domain (into the hole on the inner wall).
    Outward,
    /// Interior normal.
    Inward,
}

/// Samples of one wall at the θ nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub wall: Wall,
    pub convention: NormalConvention,
    pub theta: Vec<f64>,
    /// Wall radius `ρ(θ)`.
    pub rho: Vec<f64>,
    pub normal_derivative: Vec<f64>,
    pub gradient_norm: Vec<f64>,
    /// Curvature with respect to the exterior normal of the domain.
    pub curvature: Vec<f64>,
    /// `dσ/dθ = √(ρ² + ρ'²)`.
    pub arclength_element: Vec<f64>,
    /// `⟨x, ν⟩ dσ/dθ` with `ν` the exterior normal: `±ρ²`.
    pub support_element: Vec<f64>,
}

impl BoundaryTrace {
    /// `|Γ|` by the trapezoid rule.
    pub fn length(&self) -> f64 {
        let n = self.theta.len() as f64;
        2.0 * std::f64::consts::PI * self.arclength_element.iter().sum::<f64>() / n
    }

    /// `∮ f dσ` for samples `f` at the nodes.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let n = self.theta.len() as f64;
        2.0 * std::f64::consts::PI * f.iter().zip(&self.arclength_element).map(|(a, b)| a * b).sum::<f64>() / n
    }

    pub fn max_gradient(&self) -> f64 {
        self.gradient_norm.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min` of `|∇u|`.
    pub fn gradient_spread_abs(&self) -> f64 {
        self.max_gradient() - self.gradient_norm.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Relative spread `(max - min) / mean` of `|∇u|`.
    pub fn gradient_spread(&self) -> f64 {
        let max = self.max_gradient();
        let min = self.gradient_norm.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = self.gradient_norm.iter().sum::<f64>() / self.gradient_norm.len() as f64;
        (max - min) / mean
    }
}

fn wall_radius(domain: &RingDomain, wall: Wall, theta: f64, d: u32) -> f64 {
    match wall {
        Wall::Inner => {
            let v = domain.v_inner.eval_derivative(theta, d);
            if d == 0 {
                domain.lambda + v
            } else {
                v
            }
        }
        Wall::Outer => {
            let v = domain.v_outer.eval_derivative(theta, d);
            if d == 0 {
                1.0 - v
            } else {
                -v
            }
        }
    }
}

/// Curvature of a wall at `theta` with respect to the exterior normal of the
/// domain: `±(ρ² + 2ρ'² - ρρ'')/(ρ² + ρ'²)^{3/2}`, plus on the outer wall.
pub fn wall_curvature(domain: &RingDomain, wall: Wall, theta: f64) -> f64 {
    let r = wall_radius(domain, wall, theta, 0);
    let r1 = wall_radius(domain, wall, theta, 1);
    let r2 = wall_radius(domain, wall, theta, 2);
    let k = polar_curvature(r, r1, r2);
    match wall {
        Wall::Outer => k,
        Wall::Inner => -k,
    }
}

/// Signed curvature of a polar curve, positive for circles about the origin.
pub fn polar_curvature(r: f64, r1: f64, r2: f64) -> f64 {
    (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5)
}

/// Curvature samples at `thetas`.
pub fn boundary_curvature(domain: &RingDomain, wall: Wall, thetas: &[f64]) -> Vec<f64> {
    thetas.iter().map(|&t| wall_curvature(domain, wall, t)).collect()
}

/// Normal derivative, gradient norm and geometry of one wall.
pub fn boundary_normal_derivative(field: &Field, wall: Wall, convention: NormalConvention) -> BoundaryTrace {
    let g = &field.geom;
    let nt = field.n_theta();
    let j = match wall {
        Wall::Inner => 0,
        Wall::Outer => field.n_r() - 1,
    };
    let s = field.grid.s[j];
    let mut out = BoundaryTrace {
        wall,
        convention,
        theta: g.theta.clone(),
        rho: Vec::with_capacity(nt),
        normal_derivative: Vec::with_capacity(nt),
        gradient_norm: Vec::with_capacity(nt),
        curvature: Vec::with_capacity(nt),
        arclength_element: Vec::with_capacity(nt),
        support_element: Vec::with_capacity(nt),
    };
    for m in 0..nt {
        let (rho, rho1, rho2) = match wall {
            Wall::Inner => (g.a[m], g.a1[m], g.a2[m]),
            Wall::Outer => (g.b[m], g.b1[m], g.b2[m]),
        };
        let h = g.h(m);
        let sigma = g.sigma(s, m);
        let us = field.u_s[(j, m)];
        let ds = (rho * rho + rho1 * rho1).sqrt();
        // derivative along the normal pointing away from the origin
        let d_away = us * (rho / h - rho1 * sigma / rho) / ds;
        let exterior = match wall {
            Wall::Outer => d_away,
            Wall::Inner => -d_away,
        };
        let nd = match convention {
            NormalConvention::Outward => exterior,
            NormalConvention::Inward => -exterior,
        };
        let kp = polar_curvature(rho, rho1, rho2);
        let (kappa, support) = match wall {
            Wall::Outer => (kp, rho * rho),
            Wall::Inner => (-kp, -rho * rho),
        };
        out.rho.push(rho);
        out.normal_derivative.push(nd);
        out.gradient_norm.push(us.abs() * ((1.0 / h).powi(2) + (sigma / rho).powi(2)).sqrt());
        out.curvature.push(kappa);
        out.arclength_element.push(ds);
        out.support_element.push(support);
    }
    out
}

/// `max |∇u| / √(2 u_max)` over a wall.
pub fn nwss_of_boundary(field: &Field, wall: Wall) -> f64 {
    let t = boundary_normal_derivative(field, wall, NormalConvention::Outward);
    t.max_gradient() / (2.0 * field.report.u_max).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_family::{inner_radius, tau_inner, tau_outer};
    use crate::solver::{solve_poisson, FourierSeries, SolveOptions};

    #[test]
    fn annulus_traces() {
        let ri = inner_radius(0.5).unwrap();
        let f = solve_poisson(&RingDomain::annulus(ri).unwrap(), &SolveOptions::new(64, 48)).unwrap();
        let outer = boundary_normal_derivative(&f, Wall::Outer, NormalConvention::Outward);
        let inner = boundary_normal_derivative(&f, Wall::Inner, NormalConvention::Inward);
        let ci = (0.25 - ri * ri) / ri;
        for m in 0..64 {
            assert!((outer.normal_derivative[m] + 0.75).abs() < 1e-8);
            assert!((inner.normal_derivative[m] - ci).abs() < 1e-8);
            assert!((outer.curvature[m] - 1.0).abs() < 1e-14);
            assert!((inner.curvature[m] + 1.0 / ri).abs() < 1e-12);
        }
        assert!(outer.gradient_spread() < 1e-8 && inner.gradient_spread() < 1e-8);
        assert!((nwss_of_boundary(&f, Wall::Outer) - tau_outer(0.5).unwrap()).abs() < 1e-8);
        assert!((nwss_of_boundary(&f, Wall::Inner) - tau_inner(0.5).unwrap()).abs() < 1e-8);
        assert!((outer.length() - 2.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn curvature_of_trefoil_like_wall() {
        let d = RingDomain::new(0.5, FourierSeries::cosine(3, 0.05), FourierSeries::zero()).unwrap();
        for &t in &[0.0, 0.3, 1.1] {
            let r = 0.5 + 0.05 * (3.0f64 * t).cos();
            let r1 = -0.15 * (3.0f64 * t).sin();
            let r2 = -0.45 * (3.0f64 * t).cos();
            let want = -(r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1).powf(1.5);
            assert!((wall_curvature(&d, Wall::Inner, t) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn even_perturbation_gives_even_trace() {
        let d = RingDomain::new(0.4, FourierSeries::cosine(2, 0.02), FourierSeries::zero()).unwrap();
        let f = solve_poisson(&d, &SolveOptions::new(32, 24)).unwrap();
        let t = boundary_normal_derivative(&f, Wall::Inner, NormalConvention::Inward);
        for m in 1..32 {
            assert!((t.normal_derivative[m] - t.normal_derivative[32 - m]).abs() < 1e-10);
        }
    }
}
