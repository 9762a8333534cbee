//! Fourier-perturbed annuli `{λ + v₁(θ) < |x| < 1 - v₂(θ)}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used to check the domain invariants between grid nodes.
const DENSE_SAMPLES: usize = 4096;

/// Real trigonometric series `Σ_q a_q cos qθ + b_q sin qθ`, `q = 0, 1, …`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FourierSeries {
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl FourierSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn cosine(q: usize, amplitude: f64) -> Self {
        let mut cos = vec![0.0; q + 1];
        cos[q] = amplitude;
        Self { cos, sin: Vec::new() }
    }

    pub fn sine(q: usize, amplitude: f64) -> Self {
        let mut sin = vec![0.0; q + 1];
        sin[q] = amplitude;
        Self { cos: Vec::new(), sin }
    }

    pub fn plus(mut self, other: &FourierSeries) -> Self {
        let grow = |v: &mut Vec<f64>, w: &[f64]| {
            if v.len() < w.len() {
                v.resize(w.len(), 0.0);
            }
            v.iter_mut().zip(w).for_each(|(a, b)| *a += b);
        };
        grow(&mut self.cos, &other.cos);
        grow(&mut self.sin, &other.sin);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// Highest frequency with a nonzero coefficient.
    pub fn max_frequency(&self) -> usize {
        let top = |v: &[f64]| v.iter().rposition(|&c| c != 0.0).unwrap_or(0);
        top(&self.cos).max(top(&self.sin))
    }

    /// Derivative of order `d` in `θ`, evaluated at `theta`.
    pub fn eval_derivative(&self, theta: f64, d: u32) -> f64 {
        let mut acc = 0.0;
        for (q, &a) in self.cos.iter().enumerate() {
            if a != 0.0 {
                acc += a * trig_derivative(q as f64, theta, d, true);
            }
        }
        for (q, &b) in self.sin.iter().enumerate() {
            if b != 0.0 && q > 0 {
                acc += b * trig_derivative(q as f64, theta, d, false);
            }
        }
        acc
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_derivative(theta, 0)
    }

    /// Rotate the series by `phi`: returns `v(θ - φ)`.
    pub fn rotated(&self, phi: f64) -> Self {
        let n = self.cos.len().max(self.sin.len());
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for q in 0..n {
            let a = self.cos.get(q).copied().unwrap_or(0.0);
            let b = self.sin.get(q).copied().unwrap_or(0.0);
            let (s, c) = (q as f64 * phi).sin_cos();
            cos[q] = a * c - b * s;
            sin[q] = a * s + b * c;
        }
        Self { cos, sin }
    }
}

/// `d`-th derivative of `cos(qθ)` (or `sin(qθ)`).
fn trig_derivative(q: f64, theta: f64, d: u32, is_cos: bool) -> f64 {
    // cos^{(d)}(x) = cos(x + dπ/2)
    let shift = d as f64 * std::f64::consts::FRAC_PI_2;
    let phase = q * theta + shift;
    let scale = q.powi(d as i32);
    if is_cos {
        scale * phase.cos()
    } else {
        scale * phase.sin()
    }
}

/// Annulus with Fourier-perturbed walls: inner radius `λ + v₁(θ)`, outer
/// radius `1 - v₂(θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingDomain {
    pub lambda: f64,
    #[serde(default)]
    pub v_inner: FourierSeries,
    #[serde(default)]
    pub v_outer: FourierSeries,
}

impl RingDomain {
    pub fn new(lambda: f64, v_inner: FourierSeries, v_outer: FourierSeries) -> Result<Self> {
        let d = Self { lambda, v_inner, v_outer };
        d.validate()?;
        Ok(d)
    }

    /// The exact annulus `λ < |x| < 1`.
    pub fn annulus(lambda: f64) -> Result<Self> {
        Self::new(lambda, FourierSeries::zero(), FourierSeries::zero())
    }

    pub fn is_annulus(&self) -> bool {
        self.v_inner.is_zero() && self.v_outer.is_zero()
    }

    pub fn inner_radius(&self, theta: f64) -> f64 {
        self.lambda + self.v_inner.eval(theta)
    }

    pub fn outer_radius(&self, theta: f64) -> f64 {
        1.0 - self.v_outer.eval(theta)
    }

    /// Check `0 < λ + v₁ < 1 - v₂` on a dense θ sample.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidDomain(format!("lambda {} not in (0, 1)", self.lambda)));
        }
        let all = self.v_inner.cos.iter().chain(&self.v_inner.sin);
        if all.chain(self.v_outer.cos.iter().chain(&self.v_outer.sin)).any(|c| !c.is_finite()) {
            return Err(Error::InvalidDomain("non-finite Fourier coefficient".into()));
        }
        for m in 0..DENSE_SAMPLES {
            let t = 2.0 * std::f64::consts::PI * m as f64 / DENSE_SAMPLES as f64;
            let a = self.inner_radius(t);
            let b = self.outer_radius(t);
            if a <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "inner wall does not enclose the origin at θ = {t:.6}"
                )));
            }
            if a >= b {
                return Err(Error::InvalidDomain(format!("walls cross at θ = {t:.6}")));
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)?;
        d.validate()?;
        Ok(d)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rotate both walls by `phi`.
    pub fn rotated(&self, phi: f64) -> Self {
        Self {
            lambda: self.lambda,
            v_inner: self.v_inner.rotated(phi),
            v_outer: self.v_outer.rotated(phi),
        }
    }
}
