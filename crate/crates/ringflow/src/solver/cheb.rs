//! Radial discretizations on `s ∈ [0, 1]`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Radial scheme used by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RadialScheme {
    /// Chebyshev–Lobatto collocation.
    #[default]
    Chebyshev,
    /// Uniform grid with fourth-order finite differences (one-sided near the walls).
    FiniteDifference4,
}

/// Nodes, differentiation matrices and quadrature weights in `s`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub scheme: RadialScheme,
    pub s: Vec<f64>,
    pub d1: DMatrix<f64>,
    pub d2: DMatrix<f64>,
    /// Quadrature weights on `[0, 1]`.
    pub weights: Vec<f64>,
}

impl RadialGrid {
    pub fn new(scheme: RadialScheme, n: usize) -> Self {
        match scheme {
            RadialScheme::Chebyshev => {
                let s = lobatto_nodes(n);
                let d1 = cheb_diff(&s);
                let d2 = &d1 * &d1;
                Self { scheme, weights: clenshaw_curtis(n), s, d1, d2 }
            }
            RadialScheme::FiniteDifference4 => {
                let s: Vec<f64> = (0..n).map(|j| j as f64 / (n - 1) as f64).collect();
                let (d1, d2) = fd4_matrices(n);
                Self { scheme, weights: trapezoid_weights(n), s, d1, d2 }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Value at `x` of the interpolant through `values` at the nodes.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        match self.scheme {
            RadialScheme::Chebyshev => barycentric(&self.s, values, x),
            RadialScheme::FiniteDifference4 => local_quartic(&self.s, values, x),
        }
    }

    /// `∫_a^b f(s) ds` for the interpolant through `values`.
    pub fn integrate_between(&self, values: &[f64], a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let m = self.len().max(9);
        let nodes = lobatto_nodes(m);
        let w = clenshaw_curtis(m);
        let len = b - a;
        nodes.iter().zip(&w).map(|(&t, &wt)| wt * self.interpolate(values, a + len * t)).sum::<f64>()
            * len
    }
}

/// Chebyshev–Lobatto nodes mapped to `[0, 1]`, increasing, `s_0 = 0`.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    let nn = (n - 1) as f64;
    (0..n).map(|j| 0.5 * (1.0 - (PI * j as f64 / nn).cos())).collect()
}

fn bary_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * sign
            } else {
                sign
            }
        })
        .collect()
}

/// First-derivative collocation matrix on Lobatto nodes in `s`.
fn cheb_diff(s: &[f64]) -> DMatrix<f64> {
    let n = s.len();
    let w = bary_weights(n);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (s[i] - s[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        // negative-sum trick keeps D·1 = 0 exactly
        d[(i, i)] = diag;
    }
    d
}

/// Barycentric interpolation on Lobatto nodes.
pub fn barycentric(s: &[f64], values: &[f64], x: f64) -> f64 {
    let w = bary_weights(s.len());
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..s.len() {
        let dx = x - s[j];
        if dx == 0.0 {
            return values[j];
        }
        let t = w[j] / dx;
        num += t * values[j];
        den += t;
    }
    num / den
}

/// Clenshaw–Curtis weights for Lobatto nodes on `[0, 1]`.
pub fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let nn = n - 1;
    let nf = nn as f64;
    let theta: Vec<f64> = (0..n).map(|j| PI * j as f64 / nf).collect();
    let mut w = vec![0.0; n];
    let mut v = vec![1.0; n];
    if nn % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[nn] = w[0];
        for k in 1..nn / 2 {
            let kf = k as f64;
            for j in 1..nn {
                v[j] -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for j in 1..nn {
            v[j] -= (nf * theta[j]).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[nn] = w[0];
        for k in 1..=(nn - 1) / 2 {
            let kf = k as f64;
            for j in 1..nn {
                v[j] -= 2.0 * (2.0 * kf * theta[j]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for j in 1..nn {
        w[j] = 2.0 * v[j] / nf;
    }
    // [-1, 1] -> [0, 1]
    w.iter().map(|x| 0.5 * x).collect()
}

/// Chebyshev coefficients of the interpolant through Lobatto samples.
pub fn cheb_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let nn = (n - 1) as f64;
    (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for (j, &f) in values.iter().enumerate() {
                let half = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                acc += half * f * (PI * (j * k) as f64 / nn).cos();
            }
            let c = 2.0 * acc / nn;
            if k == 0 || k == n - 1 {
                0.5 * c
            } else {
                c
            }
        })
        .collect()
}

fn trapezoid_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    (0..n).map(|j| if j == 0 || j == n - 1 { 0.5 * h } else { h }).collect()
}

/// Fourth-order finite-difference matrices on a uniform grid of `[0, 1]`.
fn fd4_matrices(n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    assert!(n >= 7, "fourth-order stencils need at least 7 nodes");
    let h = 1.0 / (n - 1) as f64;
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    let c1 = 1.0 / (12.0 * h);
    let c2 = 1.0 / (12.0 * h * h);
    let one_sided_1 = [[-25.0, 48.0, -36.0, 16.0, -3.0, 0.0], [-3.0, -10.0, 18.0, -6.0, 1.0, 0.0]];
    let one_sided_2 =
        [[45.0, -154.0, 214.0, -156.0, 61.0, -10.0], [10.0, -15.0, -4.0, 14.0, -6.0, 1.0]];
    for (row, (s1, s2)) in one_sided_1.iter().zip(&one_sided_2).enumerate() {
        for k in 0..6 {
            d1[(row, k)] = s1[k] * c1;
            d2[(row, k)] = s2[k] * c2;
            // mirrored rows at the far wall: first derivative flips sign
            d1[(n - 1 - row, n - 1 - k)] = -s1[k] * c1;
            d2[(n - 1 - row, n - 1 - k)] = s2[k] * c2;
        }
    }
    for i in 2..n - 2 {
        for (off, (a, b)) in [(-2i64, (1.0, -1.0)), (-1, (-8.0, 16.0)), (0, (0.0, -30.0)), (1, (8.0, 16.0)), (2, (-1.0, -1.0))] {
            let j = (i as i64 + off) as usize;
            d1[(i, j)] = a * c1;
            d2[(i, j)] = b * c2;
        }
    }
    (d1, d2)
}

/// Five-point Lagrange interpolation centred on the nearest node.
fn local_quartic(s: &[f64], values: &[f64], x: f64) -> f64 {
    let n = s.len();
    let h = s[1] - s[0];
    let c = ((x - s[0]) / h).round() as i64;
    let start = (c - 2).clamp(0, n as i64 - 5) as usize;
    let mut acc = 0.0;
    for i in start..start + 5 {
        let mut l = 1.0;
        for j in start..start + 5 {
            if i != j {
                l *= (x - s[j]) / (s[i] - s[j]);
            }
        }
        acc += l * values[i];
    }
    acc
}
