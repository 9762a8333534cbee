//! Rotationally symmetric ring-shaped solutions of `Δu = -2`.
//!
//! For a core radius `R ∈ (0, 1)` the model potential is
//! `u_R(r) = (1 - r²)/2 + R² log r` on the annulus `r_i(R) < r < 1`. It vanishes
//! on both circles and peaks on `|x| = R`. `R = 0` is the disk solution
//! `(1 - r²)/2`, treated as its own case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, bisect_newton};
use crate::scalar::{gap_fn, gap_fn_prime, two_umax_of_sq, Real};

/// Default tolerance for classifying an NWSS as critical (`τ = √2`).
pub const CRITICAL_TOL: f64 = 1e-9;

/// Inversion inputs are clamped to `[CLAMP_LO, 1 - CLAMP_LO]`.
pub const CLAMP_LO: f64 = 1e-8;

/// Core radius `R ∈ [0, 1)`. Zero is the disk solution.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoreRadius<T>(T);

impl<T: Real> CoreRadius<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r >= T::zero() && r < T::one()) {
            return Err(Error::Domain(format!("core radius {:?} not in [0, 1)", r)));
        }
        Ok(Self(r))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_serrin(self) -> bool {
        self.0 == T::zero()
    }
}

/// Normalised wall shear stress `max |∇u| / √(2 u_max)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NwssValue<T>(T);

impl<T: Real> NwssValue<T> {
    /// Any finite positive value is accepted; the expected-core-radius map is
    /// where values below one get rejected.
    pub fn new(tau: T) -> Result<Self> {
        if !(tau.is_finite() && tau > T::zero()) {
            return Err(Error::Range(format!("NWSS {:?} must be finite and positive", tau)));
        }
        Ok(Self(tau))
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn branch(self) -> BranchKind {
        BranchKind::classify(self.0, T::lit(CRITICAL_TOL))
    }
}

/// Which side of the threshold `√2` an NWSS lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Outer,
    Inner,
    Critical,
}

impl BranchKind {
    pub fn classify<T: Real>(tau: T, tol: T) -> Self {
        let s = T::SQRT_2();
        if (tau - s).abs() <= tol {
            BranchKind::Critical
        } else if tau < s {
            BranchKind::Outer
        } else {
            BranchKind::Inner
        }
    }
}

/// Closed-form data of the model with core radius `R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSolution<T> {
    pub core_radius: T,
    /// `None` for the disk solution.
    pub r_inner: Option<T>,
    pub u_max: T,
    pub c_inner: Option<T>,
    pub c_outer: T,
    pub tau_inner: Option<T>,
    pub tau_outer: T,
}

impl<T: Real> ModelSolution<T> {
    pub fn new(r: CoreRadius<T>) -> Result<Self> {
        let big_r = r.value();
        let u_max = model_umax(big_r);
        let c_outer = T::one() - big_r * big_r;
        let tau_outer = tau_outer(big_r)?;
        if r.is_serrin() {
            return Ok(Self {
                core_radius: big_r,
                r_inner: None,
                u_max,
                c_inner: None,
                c_outer,
                tau_inner: None,
                tau_outer,
            });
        }
        let t = ln_inner_ratio(big_r)?;
        let r_i = big_r * t.exp();
        let c_i = T::lit(2.0) * big_r * (-t).sinh();
        Ok(Self {
            core_radius: big_r,
            r_inner: Some(r_i),
            u_max,
            c_inner: Some(c_i),
            c_outer,
            tau_inner: Some(c_i / (T::lit(2.0) * u_max).sqrt()),
            tau_outer,
        })
    }
}

/// `u_max(R) = (1 - R²)/2 + R² log R`, with `u_max(0) = 1/2`.
pub fn model_umax<T: Real>(r: T) -> T {
    two_umax_of_sq(r * r) / T::lit(2.0)
}

/// `t_i = log(r_i / R) < 0`, the log-ratio of inner to core radius.
///
/// Solves `gap_fn(t) = u_max / R²`; never underflows, unlike `r_i` itself.
pub fn ln_inner_ratio<T: Real>(r: T) -> Result<T> {
    if !(r > T::zero() && r < T::one()) {
        return Err(Error::Domain(format!("inner radius needs R in (0, 1), got {:?}", r)));
    }
    let target = model_umax(r) / (r * r);
    // gap_fn(t) >= -t - 1/2 for t < 0, so this bracket always has a sign change.
    let lo = -(target + T::one());
    bisect_newton(
        |t| gap_fn(t) - target,
        gap_fn_prime,
        lo,
        T::zero(),
        T::root_tol(),
        3,
    )
}

/// Smallest positive zero of `1 - ρ² + 2R² log ρ`.
///
/// Underflows to zero for `R` below about `0.027`; use [`ln_inner_radius`] there.
pub fn inner_radius<T: Real>(r: T) -> Result<T> {
    Ok(r * ln_inner_ratio(r)?.exp())
}

/// `log r_i(R)`, finite for every `R ∈ (0, 1)`.
pub fn ln_inner_radius<T: Real>(r: T) -> Result<T> {
    Ok(r.ln() + ln_inner_ratio(r)?)
}

/// Core radius paired with inner radius `λ`: `R² = (1 - λ²) / (-2 log λ)`.
pub fn lambda_to_core_radius<T: Real>(lambda: T) -> Result<CoreRadius<T>> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::Domain(format!("lambda {:?} not in (0, 1)", lambda)));
    }
    let r2 = core_radius_sq(lambda);
    CoreRadius::new(r2.sqrt())
}

/// `R²(λ)` without the square root; accurate as `λ -> 1`.
pub fn core_radius_sq<T: Real>(lambda: T) -> T {
    let l2 = lambda * lambda;
    // (1 - λ²) / (-ln λ²) with ln via ln_1p near 1
    let y = l2 - T::one();
    let den = if l2 > T::lit(0.5) { -y.ln_1p() } else { -l2.ln() };
    -y / den
}

fn check_r_in_annulus<T: Real>(r_core: T, r: T) -> Result<()> {
    if !(r_core >= T::zero() && r_core < T::one()) {
        return Err(Error::Domain(format!("core radius {:?} not in [0, 1)", r_core)));
    }
    let lo = if r_core == T::zero() { T::zero() } else { inner_radius(r_core)? };
    let slack = T::lit(64.0) * T::epsilon();
    if !(r >= lo * (T::one() - slack) && r <= T::one() + slack) {
        return Err(Error::Domain(format!(
            "radius {:?} outside [{:?}, 1] for R = {:?}",
            r, lo, r_core
        )));
    }
    Ok(())
}

/// `u_R(r) = (1 - r²)/2 + R² log r` on `[r_i, 1]`.
pub fn model_potential<T: Real>(r_core: T, r: T) -> Result<T> {
    check_r_in_annulus(r_core, r)?;
    if r_core == T::zero() {
        return Ok((T::one() - r * r) / T::lit(2.0));
    }
    Ok((T::one() - r * r) / T::lit(2.0) + r_core * r_core * r.ln())
}

/// `|∇u_R|(r) = |r² - R²| / r`.
pub fn model_gradient_norm<T: Real>(r_core: T, r: T) -> Result<T> {
    check_r_in_annulus(r_core, r)?;
    Ok((r * r - r_core * r_core).abs() / r)
}

/// Outer-boundary NWSS of the model, `τ_o(R) ∈ [1, √2)`.
pub fn tau_outer<T: Real>(r: T) -> Result<T> {
    if !(r >= T::zero() && r < T::one()) {
        return Err(Error::Domain(format!("tau_outer needs R in [0, 1), got {:?}", r)));
    }
    if r == T::zero() {
        return Ok(T::one());
    }
    let x = r * r;
    Ok((T::one() - x) / two_umax_of_sq(x).sqrt())
}

/// Inner-boundary NWSS of the model, `τ_i(R) ∈ [√2, ∞)`.
pub fn tau_inner<T: Real>(r: T) -> Result<T> {
    if !(r > T::zero() && r <= T::one()) {
        return Err(Error::Domain(format!("tau_inner needs R in (0, 1], got {:?}", r)));
    }
    if r == T::one() {
        return Ok(T::SQRT_2());
    }
    let t = ln_inner_ratio(r)?;
    let c_i = T::lit(2.0) * r * (-t).sinh();
    Ok(c_i / two_umax_of_sq(r * r).sqrt())
}

/// Inverse of [`tau_outer`] on `[1, √2)`.
pub fn invert_tau_outer<T: Real>(tau: T) -> Result<T> {
    if !(tau >= T::one() && tau < T::SQRT_2()) {
        return Err(Error::Range(format!("tau_outer^-1 needs tau in [1, sqrt 2), got {:?}", tau)));
    }
    if tau == T::one() {
        return Ok(T::zero());
    }
    let hi = T::one() - T::lit(CLAMP_LO).max(T::epsilon() * T::lit(4.0));
    if tau_outer(hi)? <= tau {
        return Ok(hi);
    }
    bisect(|r| tau_outer(r).unwrap() - tau, T::zero(), hi, T::root_tol())
}

/// Inverse of [`tau_inner`] on `[√2, ∞)`.
pub fn invert_tau_inner<T: Real>(tau: T) -> Result<T> {
    if !(tau >= T::SQRT_2()) {
        return Err(Error::Range(format!("tau_inner^-1 needs tau >= sqrt 2, got {:?}", tau)));
    }
    if tau == T::SQRT_2() {
        return Ok(T::one());
    }
    let lo = T::lit(CLAMP_LO);
    let hi = T::one() - T::lit(CLAMP_LO).max(T::epsilon() * T::lit(4.0));
    if tau_inner(hi)? >= tau {
        return Ok(hi);
    }
    if tau_inner(lo)? <= tau {
        return Ok(lo);
    }
    bisect(|r| tau_inner(r).unwrap() - tau, lo, hi, T::root_tol())
}

/// Expected core radius of a boundary component with NWSS `tau`.
pub fn expected_core_radius<T: Real>(tau: NwssValue<T>) -> Result<CoreRadius<T>> {
    let t = tau.value();
    if t < T::one() {
        return Err(Error::Range(format!(
            "NWSS {:?} < 1: the expected core radius is well defined and nonnegative only for NWSS >= 1",
            t
        )));
    }
    let r = if t < T::SQRT_2() { invert_tau_outer(t)? } else { invert_tau_inner(t)? };
    // τ = √2 maps to the degenerate endpoint R = 1; keep it representable.
    if r >= T::one() {
        return Ok(CoreRadius(r));
    }
    CoreRadius::new(r)
}

/// `√(u_max(R)) / R`, the curvature scale in the pinching estimate.
pub fn pinch_scale<T: Real>(r: T) -> T {
    model_umax(r).sqrt() / r
}

/// One row of the model table; absent inner quantities (disk) are empty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTableRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub r_i: Option<f64>,
    pub u_max: f64,
    pub c_inner: Option<f64>,
    pub c_outer: f64,
    pub tau_i: Option<f64>,
    pub tau_o: f64,
}

impl From<ModelSolution<f64>> for ModelTableRow {
    fn from(m: ModelSolution<f64>) -> Self {
        Self {
            r: m.core_radius,
            r_i: m.r_inner,
            u_max: m.u_max,
            c_inner: m.c_inner,
            c_outer: m.c_outer,
            tau_i: m.tau_inner,
            tau_o: m.tau_outer,
        }
    }
}

pub fn model_table(grid: &[f64]) -> Result<Vec<ModelTableRow>> {
    grid.iter().map(|&r| Ok(ModelSolution::new(CoreRadius::new(r)?)?.into())).collect()
}

pub fn write_model_table_csv<W: std::io::Write>(rows: &[ModelTableRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for row in rows {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_model_table_csv<R: std::io::Read>(r: R) -> Result<Vec<ModelTableRow>> {
    csv::Reader::from_reader(r).deserialize().map(|row| Ok(row?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const RI_05: f64 = 0.140_809_805_346_710_19;

    #[test]
    fn inner_radius_oracle() {
        let r = inner_radius(0.5).unwrap();
        assert!((r - RI_05).abs() < 1e-14);
        for k in 1..10 {
            let big_r = k as f64 / 10.0;
            let ri = inner_radius(big_r).unwrap();
            let res = 1.0 - ri * ri + 2.0 * big_r * big_r * ri.ln();
            assert!(res.abs() < 1e-12, "R = {big_r}: {res}");
            assert!(ri > 0.0 && ri < big_r);
        }
    }

    #[test]
    fn inner_radius_collapses_to_origin() {
        let mut prev = f64::INFINITY;
        let mut prev_ln = f64::INFINITY;
        for e in 1..=4 {
            let big_r = 10f64.powi(-e);
            let ri = inner_radius(big_r).unwrap();
            let lri = ln_inner_radius(big_r).unwrap();
            assert!(ri <= prev);
            assert!(lri < prev_ln);
            prev = ri;
            prev_ln = lri;
        }
        assert_eq!(prev, 0.0);
    }

    #[test]
    fn lambda_map() {
        let r = lambda_to_core_radius(RI_05).unwrap().value();
        assert!((r - 0.5).abs() < 1e-10);
        let r = lambda_to_core_radius(0.5f64).unwrap().value();
        assert!((r - 0.735_534_255_037_358_05).abs() < 1e-15);
        let mut prev = 0.0;
        for e in 1..8 {
            let r = lambda_to_core_radius(1.0 - 10f64.powi(-e)).unwrap().value();
            assert!(r > prev && r < 1.0);
            prev = r;
        }
        assert!(1.0 - prev < 1e-6);
        assert!(lambda_to_core_radius(1.0).is_err());
    }

    #[test]
    fn potential_and_gradient() {
        assert_eq!(model_potential(0.5, 1.0).unwrap(), 0.0);
        let m = ModelSolution::new(CoreRadius::new(0.5).unwrap()).unwrap();
        assert_relative_eq!(model_potential(0.5, 0.5).unwrap(), m.u_max, epsilon = 1e-16);
        assert_relative_eq!(model_potential(0.5, 0.75).unwrap(), 0.146_829_481_887_054_77, epsilon = 1e-16);
        assert!(model_potential(0.5, 0.1).is_err());
        assert_eq!(model_gradient_norm(0.5, 0.5).unwrap(), 0.0);
        assert_relative_eq!(model_gradient_norm(0.5, 1.0).unwrap(), 0.75);
        let ri = inner_radius(0.5).unwrap();
        assert_relative_eq!(
            model_gradient_norm(0.5, ri).unwrap(),
            (0.25 - ri * ri) / ri,
            max_relative = 1e-15
        );
    }

    #[test]
    fn nwss_endpoints_and_oracles() {
        assert_eq!(tau_outer(0.0).unwrap(), 1.0);
        assert_eq!(tau_inner(1.0).unwrap(), std::f64::consts::SQRT_2);
        assert!((tau_inner(0.5f64).unwrap() - 2.573_585_258_728_969_8).abs() < 1e-13);
        let mut prev = 0.0;
        for e in 1..8 {
            let t = tau_outer(1.0 - 10f64.powi(-e)).unwrap();
            assert!(t > prev && t < std::f64::consts::SQRT_2);
            prev = t;
        }
        assert!(std::f64::consts::SQRT_2 - prev < 1e-6);
    }

    #[test]
    fn nwss_monotone_on_grid() {
        let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        for w in grid.windows(2) {
            assert!(tau_outer(w[1]).unwrap() > tau_outer(w[0]).unwrap());
            if w[0] > 0.0 {
                assert!(tau_inner(w[1]).unwrap() < tau_inner(w[0]).unwrap());
            }
        }
        // blow-up as R -> 0
        let mut prev = 0.0;
        for &r in &[0.5, 0.3, 0.2, 0.1, 0.05] {
            let t = tau_inner(r).unwrap();
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn inversion_oracles() {
        assert_eq!(invert_tau_outer(1.0).unwrap(), 0.0);
        assert!((invert_tau_outer(1.2f64).unwrap() - 0.542_052_310_871_917_47).abs() < 1e-12);
        assert_eq!(invert_tau_inner(std::f64::consts::SQRT_2).unwrap(), 1.0);
        assert!((invert_tau_inner(3.0f64).unwrap() - 0.466_177_495_681_618_66).abs() < 1e-12);
        assert!(invert_tau_outer(1.5).is_err());
        assert!(invert_tau_inner(1.2).is_err());
    }

    #[test]
    fn expected_core_radius_dispatch() {
        let nw = |t: f64| NwssValue::new(t).unwrap();
        assert_eq!(expected_core_radius(nw(1.0)).unwrap().value(), 0.0);
        assert_eq!(expected_core_radius(nw(std::f64::consts::SQRT_2)).unwrap().value(), 1.0);
        let t = tau_inner(0.7).unwrap();
        assert!((expected_core_radius(nw(t)).unwrap().value() - 0.7).abs() < 1e-10);
        let err = expected_core_radius(nw(0.9)).unwrap_err().to_string();
        assert!(err.contains("well defined and nonnegative"));
    }

    #[test]
    fn branch_kind_threshold() {
        assert_eq!(BranchKind::classify(1.2, 1e-9), BranchKind::Outer);
        assert_eq!(BranchKind::classify(2.0, 1e-9), BranchKind::Inner);
        assert_eq!(BranchKind::classify(std::f64::consts::SQRT_2 + 1e-10, 1e-9), BranchKind::Critical);
    }

    #[test]
    fn serrin_is_distinguished() {
        let m = ModelSolution::new(CoreRadius::new(0.0).unwrap()).unwrap();
        assert_eq!(m.u_max, 0.5);
        assert_eq!(m.tau_outer, 1.0);
        assert!(m.r_inner.is_none() && m.tau_inner.is_none());
        assert!(tau_inner(0.0).is_err());
    }

    #[test]
    fn model_solution_invariants() {
        for k in 1..10 {
            let r = k as f64 / 10.0;
            let m = ModelSolution::new(CoreRadius::new(r).unwrap()).unwrap();
            let ri = m.r_inner.unwrap();
            assert_relative_eq!(m.u_max, (1.0 - r * r) / 2.0 + r * r * r.ln(), max_relative = 1e-13);
            assert_relative_eq!(m.c_inner.unwrap(), (r * r - ri * ri) / ri, max_relative = 1e-12);
            assert_relative_eq!(m.c_outer, 1.0 - r * r);
            assert_relative_eq!(m.tau_outer, m.c_outer / (2.0 * m.u_max).sqrt(), max_relative = 1e-14);
            assert!(m.tau_outer < std::f64::consts::SQRT_2 && m.tau_inner.unwrap() > std::f64::consts::SQRT_2);
        }
    }

    #[test]
    fn pinch_scale_nonincreasing() {
        let grid: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        for w in grid.windows(2) {
            assert!(pinch_scale(w[1]) <= pinch_scale(w[0]));
        }
    }

    #[test]
    fn single_precision_instantiation() {
        let r: f32 = inner_radius(0.5f32).unwrap();
        assert!((r as f64 - RI_05).abs() < 1e-6);
        let t: f32 = tau_outer(0.3f32).unwrap();
        assert!((invert_tau_outer(t).unwrap() - 0.3).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn outer_round_trip(r in 0.0f64..0.95) {
            let back = invert_tau_outer(tau_outer(r).unwrap()).unwrap();
            prop_assert!((back - r).abs() < 1e-10);
        }

        #[test]
        fn inner_round_trip(r in 0.05f64..1.0) {
            let back = invert_tau_inner(tau_inner(r).unwrap()).unwrap();
            prop_assert!((back - r).abs() < 1e-10);
        }

        #[test]
        fn lambda_round_trip(r in 0.05f64..0.99) {
            let back = lambda_to_core_radius(inner_radius(r).unwrap()).unwrap().value();
            prop_assert!((back - r).abs() < 1e-10);
        }

        #[test]
        fn thresholds_separate_branches(r in 1e-3f64..0.999) {
            prop_assert!(tau_outer(r).unwrap() < std::f64::consts::SQRT_2);
            prop_assert!(std::f64::consts::SQRT_2 < tau_inner(r).unwrap());
        }

        #[test]
        fn potential_peaks_at_core(r in 0.1f64..0.9, f in 0.0f64..1.0) {
            let ri = inner_radius(r).unwrap();
            let x = ri + f * (1.0 - ri);
            let m = model_umax(r);
            prop_assert!(model_potential(r, x).unwrap() <= m + 1e-15);
        }
    }

    #[test]
    fn model_table_round_trip() {
        let grid: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let rows = model_table(&grid).unwrap();
        assert_eq!(rows[0].tau_o, 1.0);
        assert!(rows[0].tau_i.is_none());
        let mut buf = Vec::new();
        write_model_table_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("R,r_i,u_max,c_inner,c_outer,tau_i,tau_o\n"));
        assert_eq!(read_model_table_csv(buf.as_slice()).unwrap(), rows);
    }
}
