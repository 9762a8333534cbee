//! Level curves and the smoothed max curve, both star-shaped about the origin
//! and parameterized by the polar angle.

use std::f64::consts::PI;

use crate::roots::bisect;
use crate::solver::cheb::{clenshaw_curtis, lobatto_nodes};
use crate::solver::fourier::real_coefficients;
use crate::solver::{boundary::polar_curvature, Field, Ridge};

/// One closed level curve `{u = t}`, sampled on every radial line.
#[derive(Debug, Clone)]
pub struct LevelContour {
    pub level: f64,
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub gradient: Vec<f64>,
    /// `dσ/dθ = √(ρ² + ρ_θ²)`.
    pub arclength_element: Vec<f64>,
}

impl LevelContour {
    /// Extract `{u = level}` with one crossing per line in `[lo_m, hi_m]`.
    /// Returns `None` when some line has no sign change.
    pub fn extract(field: &Field, level: f64, lo: &[f64], hi: &[f64]) -> Option<Self> {
        let nt = field.n_theta();
        let mut s = Vec::with_capacity(nt);
        for m in 0..nt {
            let f = |x: f64| field.value_at(x, m) - level;
            s.push(bisect(f, lo[m], hi[m], 1e-15).ok()?);
        }
        Some(Self::from_parameters(field, level, s))
    }

    pub(crate) fn from_parameters(field: &Field, level: f64, s: Vec<f64>) -> Self {
        let nt = field.n_theta();
        let rho: Vec<f64> = (0..nt).map(|m| field.geom.radius(s[m], m)).collect();
        let rho1 = field.per.derivative(&rho, 1);
        let gradient = (0..nt).map(|m| field.grad_sq_at(s[m], m).max(0.0).sqrt()).collect();
        let arclength_element = rho.iter().zip(&rho1).map(|(r, r1)| r.hypot(*r1)).collect();
        Self { level, s, rho, gradient, arclength_element }
    }

    /// `∮ f dσ` for samples `f` on the lines.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let n = self.s.len() as f64;
        2.0 * PI * f.iter().zip(&self.arclength_element).map(|(a, b)| a * b).sum::<f64>() / n
    }

    pub fn length(&self) -> f64 {
        let n = self.s.len() as f64;
        2.0 * PI * self.arclength_element.iter().sum::<f64>() / n
    }

    pub fn min_gradient(&self) -> f64 {
        self.gradient.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Truncated Fourier fit `ρ(θ)` of the ridge radius.
#[derive(Debug, Clone)]
pub struct SigmaCurve {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    /// Raw ridge radii at the θ nodes.
    pub samples: Vec<f64>,
}

impl SigmaCurve {
    /// Keep `n_θ/4` modes.
    pub fn fit(field: &Field, ridge: &Ridge) -> Self {
        let nt = field.n_theta();
        let samples: Vec<f64> = (0..nt).map(|m| field.geom.radius(ridge.s[m], m)).collect();
        let (mut a, mut b) = real_coefficients(&field.per, &samples);
        let k = nt / 4;
        a.truncate(k + 1);
        b.truncate(k + 1);
        Self { cos: a, sin: b, samples }
    }

    /// `d`-th derivative of `ρ` at `theta`.
    pub fn radius(&self, theta: f64, d: u32) -> f64 {
        let mut acc = if d == 0 { self.cos[0] } else { 0.0 };
        for q in 1..self.cos.len() {
            let w = q as f64;
            let (s, c) = (w * theta).sin_cos();
            let (dc, ds) = match d % 4 {
                0 => (c, s),
                1 => (-s, c),
                2 => (-c, -s),
                _ => (s, -c),
            };
            acc += w.powi(d as i32) * (self.cos[q] * dc + self.sin[q] * ds);
        }
        acc
    }

    /// Curvature of the curve about the origin (positive for circles).
    pub fn polar_curvature(&self, theta: f64) -> f64 {
        polar_curvature(self.radius(theta, 0), self.radius(theta, 1), self.radius(theta, 2))
    }

    pub fn point(&self, theta: f64) -> [f64; 2] {
        let r = self.radius(theta, 0);
        [r * theta.cos(), r * theta.sin()]
    }

    /// Length by the trapezoid rule on `4n` samples.
    pub fn length(&self) -> f64 {
        let n = 4 * self.samples.len().max(16);
        let h = 2.0 * PI / n as f64;
        (0..n)
            .map(|i| {
                let t = i as f64 * h;
                self.radius(t, 0).hypot(self.radius(t, 1))
            })
            .sum::<f64>()
            * h
    }

    /// Largest deviation of the fit from the raw samples.
    pub fn fit_residual(&self, thetas: &[f64]) -> f64 {
        thetas.iter().zip(&self.samples).map(|(&t, &r)| (self.radius(t, 0) - r).abs()).fold(0.0, f64::max)
    }

    /// Distance from `x` to the curve and the angle of the foot point,
    /// by Newton's method started at `theta0`.
    pub fn distance(&self, x: [f64; 2], theta0: f64) -> (f64, f64) {
        let mut t = theta0;
        for _ in 0..50 {
            let (r, r1, r2) = (self.radius(t, 0), self.radius(t, 1), self.radius(t, 2));
            let (s, c) = t.sin_cos();
            let g = [r * c, r * s];
            let g1 = [r1 * c - r * s, r1 * s + r * c];
            let g2 = [r2 * c - 2.0 * r1 * s - r * c, r2 * s + 2.0 * r1 * c - r * s];
            let d = [x[0] - g[0], x[1] - g[1]];
            let f1 = -(d[0] * g1[0] + d[1] * g1[1]);
            let f2 = g1[0] * g1[0] + g1[1] * g1[1] - (d[0] * g2[0] + d[1] * g2[1]);
            if f2 <= 0.0 {
                break;
            }
            let step = f1 / f2;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let p = self.point(t);
        ((x[0] - p[0]).hypot(x[1] - p[1]), t)
    }
}

/// Clenshaw–Curtis quadrature of `f` on `[a, b]` with `n` nodes.
pub fn line_quadrature<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    if b <= a {
        return 0.0;
    }
    let nodes = lobatto_nodes(n);
    let w = clenshaw_curtis(n);
    let len = b - a;
    nodes.iter().zip(&w).map(|(&t, &wt)| wt * f(a + len * t)).sum::<f64>() * len
}
