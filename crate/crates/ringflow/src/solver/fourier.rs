//! Periodic helpers on equispaced `θ` samples.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached FFT plans for one grid size.
#[derive(Clone)]
pub struct Periodic {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Periodic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Periodic").field("n", &self.n).finish()
    }
}

impl Periodic {
    pub fn new(n: usize) -> Self {
        assert!(n >= 4 && n % 2 == 0, "even number of samples required");
        let mut planner = FftPlanner::new();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|m| 2.0 * PI * m as f64 / self.n as f64).collect()
    }

    /// Signed wavenumber of FFT bin `q`.
    pub fn wavenumber(&self, q: usize) -> i64 {
        if q <= self.n / 2 {
            q as i64
        } else {
            q as i64 - self.n as i64
        }
    }

    /// Normalized coefficients `c_q` with `f(θ_m) = Σ c_q e^{i q θ_m}`.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.fwd.process(&mut buf);
        let inv_n = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= inv_n);
        buf
    }

    /// Real part of the inverse transform of normalized coefficients.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
        let inv_n = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= inv_n);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
    }

    /// Spectral derivative of order 1 or 2. The Nyquist mode is dropped for
    /// odd orders.
    pub fn derivative(&self, samples: &[f64], order: u32) -> Vec<f64> {
        let mut c = self.forward(samples);
        for (q, cq) in c.iter_mut().enumerate() {
            let k = self.wavenumber(q) as f64;
            if order % 2 == 1 && q == self.n / 2 {
                *cq = Complex64::new(0.0, 0.0);
                continue;
            }
            *cq *= Complex64::new(0.0, k).powu(order);
        }
        self.inverse(&c)
    }

    /// Evaluate the trigonometric interpolant at `theta`.
    pub fn eval(&self, coeffs: &[Complex64], theta: f64) -> f64 {
        let half = self.n / 2;
        let mut acc = coeffs[0].re;
        for q in 1..half {
            let e = Complex64::from_polar(1.0, q as f64 * theta);
            acc += 2.0 * (coeffs[q] * e).re;
        }
        acc + coeffs[half].re * (half as f64 * theta).cos()
    }

    /// Evaluate the interpolant keeping only modes `|q| <= k_max`.
    pub fn eval_truncated(&self, coeffs: &[Complex64], theta: f64, k_max: usize) -> f64 {
        let half = self.n / 2;
        let top = k_max.min(half - 1);
        let mut acc = coeffs[0].re;
        for q in 1..=top {
            let e = Complex64::from_polar(1.0, q as f64 * theta);
            acc += 2.0 * (coeffs[q] * e).re;
        }
        acc
    }

    /// `∫_0^{2π} f dθ` by the trapezoid rule.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        2.0 * PI * samples.iter().sum::<f64>() / self.n as f64
    }
}

/// Cosine and sine coefficients `(a_q, b_q)` of real samples, `q = 0..n/2`,
/// with `f = Σ a_q cos qθ + b_q sin qθ`.
pub fn real_coefficients(p: &Periodic, samples: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let c = p.forward(samples);
    let half = p.len() / 2;
    let mut a = vec![0.0; half + 1];
    let mut b = vec![0.0; half + 1];
    a[0] = c[0].re;
    for q in 1..half {
        a[q] = 2.0 * c[q].re;
        b[q] = -2.0 * c[q].im;
    }
    a[half] = c[half].re;
    (a, b)
}

/// Maximize a periodic interpolant near the best sample by golden-section search.
pub fn refine_max(p: &Periodic, samples: &[f64]) -> (f64, f64) {
    let coeffs = p.forward(samples);
    let (m, _) = samples
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let h = 2.0 * PI / p.len() as f64;
    let center = m as f64 * h;
    let (t, v) = golden_max(|t| p.eval(&coeffs, t), center - h, center + h);
    let best = samples[m];
    if v >= best {
        (t.rem_euclid(2.0 * PI), v)
    } else {
        (center, best)
    }
}

/// Golden-section maximization on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}
