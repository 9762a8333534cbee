//! Linearized spectrum of the shooting map around the radial solutions.
//!
//! For the annulus `{λ < |x| < 1}` and mode `cos kθ` the linearization acts
//! on the pair of boundary perturbations through a 2×2 matrix
//! `M_{λ,k} = M̃_{λ,k} - 2I`. Its eigenvalues `μ₁ < μ₂` decide where
//! non-radial solutions branch off: `λ_k` is the unique zero of `μ₁(·, k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_family::core_radius_sq;
use crate::report::CheckReport;
use crate::roots::bisect;
use crate::scalar::Real;

/// Spacing of the uniqueness scan in `find_bifurcation_point`.
pub const SCAN_STEP: f64 = 1e-3;
/// Tolerance on the algebraic zero condition at `λ_k`.
pub const ZERO_CONDITION_TOL: f64 = 1e-8;

/// Everything the spectrum needs at one `(λ, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint<T> {
    pub lambda: T,
    pub k: T,
    /// Core radius `R`, from `R² = (1 - λ²) / (-2 log λ)`.
    pub r: T,
    pub r_sq: T,
    /// `e^ω = λ^{-k}`; zero for `k = 0`.
    pub omega: T,
    /// `|∇u|` on the inner wall, `(R² - λ²) / λ`.
    pub c_i: T,
    /// `|∇u|` on the outer wall, `1 - R²`.
    pub c_o: T,
    pub trace: T,
    pub det: T,
    pub mu1: T,
    pub mu2: T,
    /// Entries of `M = M̃ - 2I`, row major.
    pub m_entries: [[T; 2]; 2],
}

/// `k coth ω` and `k / sinh ω` in power form; `k = 0` gives the common
/// limit `-1/log λ`.
struct Hyperbolic<T> {
    k_coth: T,
    k_csch: T,
}

fn hyperbolic<T: Real>(lambda: T, k: T) -> Hyperbolic<T> {
    let ln_l = lambda.ln();
    if k == T::zero() {
        let v = -T::one() / ln_l;
        return Hyperbolic { k_coth: v, k_csch: v };
    }
    let two = T::lit(2.0);
    let p = (two * k * ln_l).exp(); // λ^{2k}
    let one_minus_p = -(two * k * ln_l).exp_m1();
    let half_p = (k * ln_l).exp(); // λ^k
    let coth = (T::one() + p) / one_minus_p;
    let csch = two * half_p / one_minus_p;
    Hyperbolic { k_coth: k * coth, k_csch: k * csch }
}

fn clamp_lambda<T: Real>(lambda: T) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::Domain(format!("lambda {:?} not in (0, 1)", lambda)));
    }
    let lo = T::lit(1e-9);
    let hi = (T::one() - T::lit(1e-9)).min(T::one() - T::lit(4.0) * T::epsilon());
    Ok(lambda.max(lo).min(hi))
}

fn check_k<T: Real>(k: T) -> Result<()> {
    if !(k >= T::zero()) || !k.is_finite() {
        return Err(Error::Domain(format!("mode number {:?} must be finite and >= 0", k)));
    }
    Ok(())
}

/// Entries of `M̃_{λ,k}`.
fn m_tilde<T: Real>(lambda: T, k: T, r_sq: T, h: &Hyperbolic<T>) -> [[T; 2]; 2] {
    let l2 = lambda * lambda;
    let sl = lambda.sqrt();
    let c_o = T::one() - r_sq;
    let c_i = (r_sq - l2) / lambda;
    if k == T::zero() {
        // k coth ω and k / sinh ω both tend to -1/log λ
        let q = h.k_coth;
        return [
            [(r_sq - l2) / l2 * (q - T::one()), -c_o * q / sl],
            [-c_i * q / sl, c_o * (q + T::one())],
        ];
    }
    [
        [(r_sq - l2) / l2 * (h.k_coth - T::one()), -h.k_csch * c_o / sl],
        [-h.k_csch * c_i / sl, c_o * (h.k_coth + T::one())],
    ]
}

/// Trace and determinant of `M̃_{λ,k}` in closed form.
pub fn trace_det<T: Real>(lambda: T, k: T) -> Result<(T, T)> {
    check_k(k)?;
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let h = hyperbolic(lambda, k);
    Ok(trace_det_inner(lambda, k, r_sq, &h))
}

fn trace_det_inner<T: Real>(lambda: T, k: T, r_sq: T, h: &Hyperbolic<T>) -> (T, T) {
    let l2 = lambda * lambda;
    let two = T::lit(2.0);
    let t = two + r_sq / l2 * ((T::one() - l2) * h.k_coth - T::one() - l2);
    let d = (r_sq / l2 - T::one()) * (T::one() - r_sq) * (k * k - T::one());
    (t, d)
}

/// `T² - 4D` as `(M̃₁₁ - M̃₂₂)² + 4 M̃₁₂ M̃₂₁`, a sum of nonnegative terms.
pub fn discriminant<T: Real>(lambda: T, k: T) -> Result<T> {
    let sp = spectral_point(lambda, k)?;
    Ok(discriminant_of_entries(&sp.m_entries))
}

fn discriminant_of_entries<T: Real>(m: &[[T; 2]; 2]) -> T {
    let diff = m[0][0] - m[1][1];
    diff * diff + T::lit(4.0) * m[0][1] * m[1][0]
}

/// The two pieces of `T² - 4D`: the squared bracket and the cross term
/// `4 k² c_i c_o / (λ sinh² ω)`.
///
/// The bracket is `(R²/λ² - 1)(k coth ω - 1) - (1 - R²)(k coth ω + 1)`.
pub fn discriminant_terms<T: Real>(lambda: T, k: T) -> Result<(T, T)> {
    check_k(k)?;
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let h = hyperbolic(lambda, k);
    let l2 = lambda * lambda;
    let brace = (r_sq / l2 - T::one()) * (h.k_coth - T::one())
        - (T::one() - r_sq) * (h.k_coth + T::one());
    let c_i = (r_sq - l2) / lambda;
    let c_o = T::one() - r_sq;
    let cross = T::lit(4.0) * h.k_csch * h.k_csch * c_i * c_o / lambda;
    Ok((brace * brace, cross))
}

/// Eigenvalues `(μ₁, μ₂)` of `M` from `T`, `D` and a discriminant `Δ ≥ 0`.
fn eigen_pair<T: Real>(t: T, d: T, disc: T) -> (T, T) {
    let two = T::lit(2.0);
    let sq = disc.max(T::zero()).sqrt();
    let (a, b) = if t > T::zero() {
        let big = (t + sq) / two;
        (two * d / (t + sq), big)
    } else if t < T::zero() {
        let small = (t - sq) / two;
        (small, two * d / (t - sq))
    } else {
        (-sq / two, sq / two)
    };
    (a - two, b - two)
}

pub fn spectral_point<T: Real>(lambda: T, k: T) -> Result<SpectralPoint<T>> {
    check_k(k)?;
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let h = hyperbolic(lambda, k);
    let mt = m_tilde(lambda, k, r_sq, &h);
    let (t, d) = trace_det_inner(lambda, k, r_sq, &h);
    let (mu1, mu2) = eigen_pair(t, d, discriminant_of_entries(&mt));
    let two = T::lit(2.0);
    let omega = if k == T::zero() { T::zero() } else { -k * lambda.ln() };
    Ok(SpectralPoint {
        lambda,
        k,
        r: r_sq.sqrt(),
        r_sq,
        omega,
        c_i: (r_sq - lambda * lambda) / lambda,
        c_o: T::one() - r_sq,
        trace: t,
        det: d,
        mu1,
        mu2,
        m_entries: [[mt[0][0] - two, mt[0][1]], [mt[1][0], mt[1][1] - two]],
    })
}

pub fn mu1<T: Real>(lambda: T, k: T) -> Result<T> {
    Ok(spectral_point(lambda, k)?.mu1)
}

pub fn mu2<T: Real>(lambda: T, k: T) -> Result<T> {
    Ok(spectral_point(lambda, k)?.mu2)
}

/// `dR²/dλ = 2R²(R² - λ²) / (λ(1 - λ²))`.
pub fn dr_sq_dlambda<T: Real>(lambda: T) -> Result<T> {
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let l2 = lambda * lambda;
    Ok(T::lit(2.0) * r_sq * (r_sq - l2) / (lambda * (T::one() - l2)))
}

/// `(T', D')`, derivatives of trace and determinant along `λ` with `R = R(λ)`.
pub fn trace_det_derivatives<T: Real>(lambda: T, k: T) -> Result<(T, T)> {
    check_k(k)?;
    if k == T::zero() {
        return Err(Error::Domain("derivatives need k > 0".into()));
    }
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let h = hyperbolic(lambda, k);
    let l2 = lambda * lambda;
    let one_l2 = T::one() - l2;
    let two = T::lit(2.0);
    let pre = r_sq / (lambda * l2 * one_l2);
    let tp = pre
        * (one_l2 * one_l2 * h.k_csch * h.k_csch
            + two * (r_sq - l2 - T::one()) * one_l2 * h.k_coth
            + two * (T::one() - r_sq - r_sq * l2 + l2 * l2));
    let a = r_sq - l2;
    let b = T::one() - r_sq;
    let dp = -two * pre * (k * k - T::one()) * (a * a + b * b);
    Ok((tp, dp))
}

/// `∂μ₁/∂λ` from the closed-form `T'` and `D'`.
pub fn dmu1_dlambda<T: Real>(lambda: T, k: T) -> Result<T> {
    let sp = spectral_point(lambda, k)?;
    let (tp, dp) = trace_det_derivatives(lambda, k)?;
    let disc = discriminant_of_entries(&sp.m_entries);
    let sq = disc.sqrt();
    let two = T::lit(2.0);
    Ok((tp - (sp.trace * tp - two * dp) / sq) / two)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint<T> {
    pub k: u32,
    pub lambda_k: T,
    pub dmu1_dlambda: T,
}

/// Unique zero of `μ₁(·, k)` on `(0, 1)`.
///
/// A scan on a `1e-3` grid must see exactly one sign change; the bracket
/// is then bisected and polished with Newton steps.
pub fn find_bifurcation_point<T: Real>(k: u32) -> Result<BifurcationPoint<T>> {
    if k < 2 {
        return Err(Error::Domain(format!("bifurcation needs k >= 2, got {k}")));
    }
    let kk = T::from_u32(k).unwrap();
    let n = (1.0 / SCAN_STEP).round() as usize;
    let grid: Vec<T> = (1..n).map(|i| T::lit(i as f64 * SCAN_STEP)).collect();
    let vals: Vec<T> = grid.iter().map(|&l| mu1(l, kk)).collect::<Result<_>>()?;
    let crossings: Vec<usize> = (0..vals.len() - 1)
        .filter(|&i| (vals[i] > T::zero()) != (vals[i + 1] > T::zero()))
        .collect();
    if crossings.len() != 1 {
        return Err(Error::SignScan { k, crossings: crossings.len() });
    }
    let i = crossings[0];
    let f = |l: T| mu1(l, kk).unwrap_or(T::nan());
    let mut l = bisect(f, grid[i], grid[i + 1], T::root_tol())?;
    for _ in 0..3 {
        let v = f(l);
        if v == T::zero() {
            break;
        }
        let step = v / dmu1_dlambda(l, kk)?;
        let next = l - step;
        if !(next > grid[i] && next < grid[i + 1]) || f(next).abs() > v.abs() {
            break;
        }
        l = next;
    }
    Ok(BifurcationPoint { k, lambda_k: l, dmu1_dlambda: dmu1_dlambda(l, kk)? })
}

/// `λ_k` for `k = 2..=k_max`, computed in parallel.
pub fn bifurcation_table(k_max: u32) -> Result<Vec<BifurcationPoint<f64>>> {
    use rayon::prelude::*;
    (2..=k_max).into_par_iter().map(find_bifurcation_point::<f64>).collect()
}

/// `μ₁` and `μ₂` strictly increasing along `k_grid` at fixed `λ`, plus
/// `μ_i(λ, k + 1e-4) > μ_i(λ, k)` at each grid point.
pub fn verify_monotone_in_k<T: Real>(lambda: T, k_grid: &[T]) -> Result<CheckReport> {
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition("k grid must be strictly increasing".into()));
    }
    let h = T::lit(1e-4);
    let mut worst = f64::NEG_INFINITY;
    let mut samples = Vec::with_capacity(k_grid.len());
    let mut prev: Option<(T, T)> = None;
    for &k in k_grid {
        let sp = spectral_point(lambda, k)?;
        let up = spectral_point(lambda, k + h)?;
        // violation = -(increment), so any nonpositive increment fails
        let local = (sp.mu1 - up.mu1).max(sp.mu2 - up.mu2).to_f64_lossy();
        worst = worst.max(local);
        if let Some((p1, p2)) = prev {
            worst = worst.max((p1 - sp.mu1).max(p2 - sp.mu2).to_f64_lossy());
        }
        prev = Some((sp.mu1, sp.mu2));
        samples.push(vec![k.to_f64_lossy(), sp.mu1.to_f64_lossy(), sp.mu2.to_f64_lossy()]);
    }
    // strict increase: worst must be negative
    let mut r = CheckReport::new("monotone_in_k", worst, 0.0);
    r.pass = worst < 0.0;
    r.diag("lambda", lambda.to_f64_lossy());
    r.sample_columns = vec!["k".into(), "mu1".into(), "mu2".into()];
    r.samples = samples;
    Ok(r)
}

/// `(lim T/k, lim D/T²)` as `k -> ∞`.
pub fn asymptotic_slopes<T: Real>(lambda: T) -> Result<(T, T)> {
    let lambda = clamp_lambda(lambda)?;
    let r_sq = core_radius_sq(lambda);
    let l2 = lambda * lambda;
    let one_l2 = T::one() - l2;
    let t_slope = r_sq * one_l2 / l2;
    let d_ratio = l2 * (r_sq - l2) * (T::one() - r_sq) / (r_sq * r_sq * one_l2 * one_l2);
    Ok((t_slope, d_ratio))
}

/// Limits of `μ₁/k` and `μ₂/k` as `k -> ∞`, from [`asymptotic_slopes`].
pub fn asymptotic_mu_slopes<T: Real>(lambda: T) -> Result<(T, T)> {
    let (s, q) = asymptotic_slopes(lambda)?;
    let two = T::lit(2.0);
    let root = (T::one() - T::lit(4.0) * q).sqrt();
    Ok((s * (T::one() - root) / two, s * (T::one() + root) / two))
}

/// Algebraic conditions at `λ_k`: residual of the vanishing of `μ₁` and the
/// strict inequality that makes `∂μ₁/∂λ < 0`.
pub fn verify_zero_condition<T: Real>(point: &BifurcationPoint<T>) -> Result<CheckReport> {
    let k = T::from_u32(point.k).unwrap();
    let lambda = clamp_lambda(point.lambda_k)?;
    let r_sq = core_radius_sq(lambda);
    let h = hyperbolic(lambda, k);
    let l2 = lambda * lambda;
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let r4 = r_sq * r_sq;
    let lhs = two * r_sq * (one - l2) * h.k_coth;
    let rhs = (r_sq - l2) * (one - r_sq) * k * k + (r_sq + l2) * (one + r_sq);
    let residual = (lhs - rhs).abs().to_f64_lossy();
    let cond5 = (lhs + l2 - three * r4 - three * r_sq * l2 - three * r_sq).to_f64_lossy();
    let cond4 = (two * k * k * (lhs + l2 - three * r4 - three * r_sq * l2 - three * r_sq)
        + three * r4
        + r_sq * l2
        + r_sq
        - l2)
        .to_f64_lossy();
    let coth_bound = ((r_sq + l2) / (l2 * (one - r_sq))).to_f64_lossy();
    let worst = residual.max(-cond5);
    let mut r = CheckReport::new(format!("zero_condition_k{}", point.k), worst, ZERO_CONDITION_TOL);
    r.pass = residual < ZERO_CONDITION_TOL && cond5 > 0.0;
    r.diag("lambda_k", lambda.to_f64_lossy());
    r.diag("cond3_residual", residual);
    r.diag("cond5_margin", cond5);
    r.diag("cond4_value", cond4);
    r.diag("k_coth_omega", h.k_coth.to_f64_lossy());
    r.diag("k_coth_lower_estimate", coth_bound);
    r.diag("dmu1_dlambda", point.dmu1_dlambda.to_f64_lossy());
    if cond5 <= 0.0 {
        r.note("strict inequality fails at this lambda_k");
    }
    if h.k_coth.to_f64_lossy() <= coth_bound {
        r.note("k coth omega lower estimate does not hold at this lambda_k");
    }
    Ok(r)
}

/// One row of a `(λ, k)` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub lambda: f64,
    pub k: f64,
    #[serde(rename = "T")]
    pub trace: f64,
    #[serde(rename = "D")]
    pub det: f64,
    pub mu1: f64,
    pub mu2: f64,
}

/// Evaluate the spectrum on the product grid, `λ` outer and `k` inner.
pub fn spectrum_grid(lambdas: &[f64], ks: &[f64]) -> Result<Vec<SpectrumRow>> {
    use rayon::prelude::*;
    let pairs: Vec<(f64, f64)> =
        lambdas.iter().flat_map(|&l| ks.iter().map(move |&k| (l, k))).collect();
    pairs
        .into_par_iter()
        .map(|(l, k)| {
            let sp = spectral_point(l, k)?;
            Ok(SpectrumRow { lambda: l, k, trace: sp.trace, det: sp.det, mu1: sp.mu1, mu2: sp.mu2 })
        })
        .collect()
}

pub fn write_spectrum_csv<W: std::io::Write>(rows: &[SpectrumRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for row in rows {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

/// Number of sign changes of `μ₁(·, k)` along an increasing `λ` grid.
pub fn count_mu1_sign_changes(k: f64, lambdas: &[f64]) -> Result<usize> {
    let vals: Vec<f64> = lambdas.iter().map(|&l| mu1(l, k)).collect::<Result<_>>()?;
    Ok(vals.windows(2).filter(|w| (w[0] > 0.0) != (w[1] > 0.0)).count())
}

/// Fraction of consecutive grid pairs on which `μ₁(·, k)` decreases.
pub fn mu1_decreasing_fraction(k: f64, lambdas: &[f64]) -> Result<f64> {
    let vals: Vec<f64> = lambdas.iter().map(|&l| mu1(l, k)).collect::<Result<_>>()?;
    if vals.len() < 2 {
        return Ok(1.0);
    }
    let dec = vals.windows(2).filter(|w| w[1] < w[0]).count();
    Ok(dec as f64 / (vals.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const ORACLE: [(u32, f64); 9] = [
        (2, 0.22743364671493239),
        (3, 0.41910699613645156),
        (4, 0.533792988271318),
        (5, 0.61029008983371415),
        (6, 0.66507005874775585),
        (7, 0.706278080507182),
        (8, 0.73842175465718127),
        (9, 0.76420475142331671),
        (10, 0.78534978091110408),
    ];

    fn grid(n: usize) -> Vec<f64> {
        (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
    }

    #[test]
    fn mode_one_is_degenerate() {
        for l in grid(50) {
            let sp = spectral_point(l, 1.0).unwrap();
            assert!((sp.mu1 + 2.0).abs() < 1e-12, "lambda {l}: {}", sp.mu1);
            assert!(sp.mu2.abs() < 1e-12, "lambda {l}: {}", sp.mu2);
        }
    }

    #[test]
    fn entries_match_trace_and_det() {
        let sp = spectral_point(0.5f64, 3.0).unwrap();
        let m = sp.m_entries;
        let tr = m[0][0] + m[1][1];
        let det_t = (m[0][0] + 2.0) * (m[1][1] + 2.0) - m[0][1] * m[1][0];
        assert_relative_eq!(tr, sp.trace - 4.0, epsilon = 1e-12);
        assert_relative_eq!(det_t, sp.det, max_relative = 1e-12);
        let det_m = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr - 4.0 * det_m).sqrt();
        assert_relative_eq!((tr - disc) / 2.0, sp.mu1, epsilon = 1e-10);
        assert_relative_eq!((tr + disc) / 2.0, sp.mu2, epsilon = 1e-10);
    }

    #[test]
    fn k_zero_is_the_limit() {
        let a = spectral_point(0.5f64, 0.0).unwrap().m_entries;
        let b = spectral_point(0.5f64, 1e-8).unwrap().m_entries;
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[i][j] - b[i][j]).abs() < 1e-6, "{i}{j}: {} vs {}", a[i][j], b[i][j]);
            }
        }
    }

    #[test]
    fn endpoint_limits() {
        // the approach to k - 1 is logarithmic: μ₁ = k - 1 - R²(k + 1)
        for k in 2..=6 {
            let kf = k as f64;
            let mut prev_gap = f64::INFINITY;
            for &l in &[1e-3, 1e-6, 1e-9] {
                let m = mu1(l, kf).unwrap();
                let gap = (kf - 1.0) - m;
                assert_relative_eq!(gap, core_radius_sq(l) * (kf + 1.0), max_relative = 1e-8);
                assert!(gap > 0.0 && gap < prev_gap);
                prev_gap = gap;
            }
            let m1 = mu1(1.0 - 1e-6, kf).unwrap();
            assert!((m1 + 2.0).abs() < 1e-3, "k {k}: {m1}");
        }
    }

    #[test]
    fn mu2_positive_for_k_at_least_two() {
        for l in grid(60) {
            for k in 2..=10 {
                assert!(mu2(l, k as f64).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn bifurcation_points_match_oracle() {
        let mut prev = 0.0;
        for (k, want) in ORACLE {
            let p = find_bifurcation_point::<f64>(k).unwrap();
            assert!((p.lambda_k - want).abs() < 1e-12, "k {k}: {} vs {want}", p.lambda_k);
            assert!(mu1(p.lambda_k, k as f64).unwrap().abs() < 1e-12);
            assert!(p.dmu1_dlambda < 0.0);
            assert!(p.lambda_k > prev);
            prev = p.lambda_k;
        }
        assert!(find_bifurcation_point::<f64>(1).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let h = 1e-6;
        let fd = (mu1(0.5 + h, 3.0).unwrap() - mu1(0.5 - h, 3.0).unwrap()) / (2.0 * h);
        assert_relative_eq!(dmu1_dlambda(0.5, 3.0).unwrap(), fd, max_relative = 1e-5);
        let fd_r = (core_radius_sq(0.5 + h) - core_radius_sq(0.5 - h)) / (2.0 * h);
        assert_relative_eq!(dr_sq_dlambda(0.5).unwrap(), fd_r, max_relative = 1e-7);
        let (tp, dp) = trace_det_derivatives(0.4, 5.0).unwrap();
        let (t1, d1) = trace_det(0.4 + h, 5.0).unwrap();
        let (t0, d0) = trace_det(0.4 - h, 5.0).unwrap();
        assert_relative_eq!(tp, (t1 - t0) / (2.0 * h), max_relative = 1e-6);
        assert_relative_eq!(dp, (d1 - d0) / (2.0 * h), max_relative = 1e-6);
    }

    #[test]
    fn discriminant_decomposition() {
        for l in grid(40) {
            for j in 0..40 {
                let k = j as f64 * 0.25;
                let (t, d) = trace_det(l, k).unwrap();
                let (sq, cross) = discriminant_terms(l, k).unwrap();
                let direct = t * t - 4.0 * d;
                assert!(direct > 0.0);
                assert!(((sq + cross) - direct).abs() <= 1e-10 * direct.abs().max(1.0), "{l} {k}");
            }
        }
    }

    #[test]
    fn printed_bracket_sign_does_not_decompose() {
        // (R²/λ² - 1)(k coth ω + 1) - (1 - R²)(k coth ω - 1)
        let (l, k) = (0.5f64, 3.0f64);
        let r2 = core_radius_sq(l);
        let kc = hyperbolic(l, k).k_coth;
        let printed = (r2 / (l * l) - 1.0) * (kc + 1.0) - (1.0 - r2) * (kc - 1.0);
        let (_, cross) = discriminant_terms(l, k).unwrap();
        let (t, d) = trace_det(l, k).unwrap();
        assert!((printed * printed + cross - (t * t - 4.0 * d)).abs() > 1e-3);
    }

    #[test]
    fn zero_condition_residual_small_and_k2_margin_negative() {
        for (k, _) in ORACLE {
            let p = find_bifurcation_point::<f64>(k).unwrap();
            let r = verify_zero_condition(&p).unwrap();
            assert!(r.diagnostics["cond3_residual"] < 1e-8, "k {k}");
            if k >= 3 {
                assert!(r.pass, "k {k}");
            }
        }
        let p2 = find_bifurcation_point::<f64>(2).unwrap();
        let r2 = verify_zero_condition(&p2).unwrap();
        assert!((r2.diagnostics["cond5_margin"] + 0.045041).abs() < 1e-5);
        assert!(r2.diagnostics["cond4_value"] > 0.0);
        assert!(!r2.pass);
    }

    #[test]
    fn monotone_in_k_at_half() {
        let ks: Vec<f64> = (2..=20).map(|i| i as f64 * 0.5).collect();
        let r = verify_monotone_in_k(0.5, &ks).unwrap();
        assert!(r.pass, "{:?}", r.worst_violation);
    }

    #[test]
    fn large_k_slopes() {
        let (s, _) = asymptotic_slopes(0.5f64).unwrap();
        let (t, _) = trace_det(0.5f64, 1e3).unwrap();
        assert!((t / 1e3 - s).abs() < 1e-3);
        for &l in &[0.3f64, 0.5, 0.7] {
            let (s, _) = asymptotic_slopes(l).unwrap();
            let errs: Vec<f64> = [1e1, 1e2, 1e3]
                .iter()
                .map(|&k| (trace_det(l, k).unwrap().0 / k - s).abs())
                .collect();
            assert!(errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 1e-2);
            let (m1, m2) = asymptotic_mu_slopes(l).unwrap();
            assert!(m1 > 0.0 && m2 > m1);
            let sp = spectral_point(l, 1e3f64).unwrap();
            assert!((sp.mu1 / 1e3 - m1).abs() < 1e-2 * m1.max(1.0));
            assert!((sp.mu2 / 1e3 - m2).abs() < 1e-2 * m2.max(1.0));
        }
    }

    #[test]
    fn crossing_structure_per_mode() {
        let ls: Vec<f64> = (1..1000).map(|i| i as f64 * 1e-3).collect();
        assert_eq!(count_mu1_sign_changes(1.0, &ls).unwrap(), 0);
        for k in 2..=10 {
            assert_eq!(count_mu1_sign_changes(k as f64, &ls).unwrap(), 1, "k {k}");
        }
    }

    #[test]
    fn stable_and_naive_forms_agree() {
        for l in grid(30) {
            for k in 2..=10 {
                let (t, d) = trace_det(l, k as f64).unwrap();
                let naive = (t - (t * t - 4.0 * d).sqrt()) / 2.0 - 2.0;
                let m = mu1(l, k as f64).unwrap();
                if (naive + 2.0).abs() > 1e-3 * t.abs() {
                    assert!((naive - m).abs() <= 1e-9 * m.abs().max(1.0), "{l} {k}");
                }
            }
        }
    }

    #[test]
    fn single_precision_point() {
        let sp = spectral_point(0.5f32, 3.0f32).unwrap();
        assert!((sp.mu1 - mu1(0.5f64, 3.0).unwrap() as f32).abs() < 1e-4);
    }

    #[test]
    fn csv_dump_has_header() {
        let rows = spectrum_grid(&[0.3, 0.6], &[2.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&rows, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("lambda,k,T,D,mu1,mu2\n"));
        assert_eq!(s.lines().count(), 5);
    }

    proptest! {
        #[test]
        fn eigenvalues_ordered(l in 0.01f64..0.99, k in 0.0f64..30.0) {
            let sp = spectral_point(l, k).unwrap();
            prop_assert!(sp.mu1 < sp.mu2);
            prop_assert!(discriminant(l, k).unwrap() > 0.0);
        }

        #[test]
        fn not_both_cross_together(l in 0.01f64..0.99, k in 2.0f64..12.0) {
            let sp = spectral_point(l, k).unwrap();
            prop_assert!(sp.mu2 > 0.0);
        }
    }
}
