//! Pseudo-radial functions: inverting the model potential branch by branch.
//!
//! On the model with core radius `R`, `u = (1 - ψ² + 2R² log ψ)/2`. For each
//! `u ∈ [0, u_max]` there is one `ψ₊ ∈ [R, 1]` and one `ψ₋ ∈ [r_i, R]`.
//! Internally we solve for `t = log(ψ/R)`, since `u_max - u = R² (e^{2t} - 1 - 2t)/2`
//! is free of cancellation near the core circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstsq::lstsq;
use crate::model_family::{ln_inner_ratio, model_umax, CoreRadius};
use crate::roots::bisect_newton;
use crate::scalar::{gap_fn, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// Outer branch, values in `[R, 1]`.
    Plus,
    /// Inner branch, values in `[r_i, R]`.
    Minus,
}

impl Branch {
    fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

/// One branch of the pseudo-radial inversion for a fixed core radius.
#[derive(Debug, Clone, Copy)]
pub struct PseudoRadialBranch<T> {
    r: T,
    branch: Branch,
    u_max: T,
    /// `log(ψ/R)` at `u = 0` on this branch.
    t_end: T,
}

impl<T: Real> PseudoRadialBranch<T> {
    /// `R = 0` is allowed only on the plus branch (the disk).
    pub fn new(r: CoreRadius<T>, branch: Branch) -> Result<Self> {
        let rv = r.value();
        if r.is_serrin() {
            if branch == Branch::Minus {
                return Err(Error::Domain("the disk solution has no inner branch".into()));
            }
            return Ok(Self { r: rv, branch, u_max: T::lit(0.5), t_end: T::infinity() });
        }
        let t_end = match branch {
            Branch::Plus => -rv.ln(),
            Branch::Minus => ln_inner_ratio(rv)?,
        };
        Ok(Self { r: rv, branch, u_max: model_umax(rv), t_end })
    }

    pub fn core_radius(&self) -> T {
        self.r
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn u_max(&self) -> T {
        self.u_max
    }

    fn check_u(&self, u: T) -> Result<()> {
        if !(u >= T::zero() && u <= self.u_max) {
            return Err(Error::Domain(format!("u = {:?} outside [0, {:?}]", u, self.u_max)));
        }
        Ok(())
    }

    /// `t = log(ψ(u)/R)`, solved on the signed square root of the gap so the
    /// root stays simple at `u = u_max`.
    fn log_ratio(&self, u: T) -> Result<T> {
        self.check_u(u)?;
        let gap = self.u_max - u;
        if gap == T::zero() {
            return Ok(T::zero());
        }
        if u == T::zero() {
            return Ok(self.t_end);
        }
        let q = (gap / (self.r * self.r)).sqrt();
        let g = |t: T| -> T {
            let h = gap_fn(t).max(T::zero()).sqrt();
            if t < T::zero() {
                -h
            } else {
                h
            }
        };
        let dg = |t: T| -> T {
            let h = gap_fn(t).max(T::min_positive_value()).sqrt();
            let d = (T::lit(2.0) * t).exp_m1();
            let v = d / (T::lit(2.0) * h);
            if t < T::zero() {
                -v
            } else {
                v
            }
        };
        let target = self.branch.sign::<T>() * q;
        let (lo, hi) = match self.branch {
            Branch::Plus => (T::zero(), self.t_end),
            Branch::Minus => (self.t_end, T::zero()),
        };
        bisect_newton(|t| g(t) - target, dg, lo, hi, T::lit(1e-6), 5)
    }

    /// `ψ(u)` on this branch; exactly `R` at `u = u_max`.
    pub fn psi(&self, u: T) -> Result<T> {
        if self.r == T::zero() {
            self.check_u(u)?;
            return Ok((T::one() - T::lit(2.0) * u).sqrt());
        }
        if u == self.u_max {
            return Ok(self.r);
        }
        Ok(self.r * self.log_ratio(u)?.exp())
    }

    /// `ψ̇ = -ψ/(ψ² - R²)`; singular at `u_max`.
    pub fn psi_dot(&self, u: T) -> Result<T> {
        self.check_u(u)?;
        if u >= self.u_max {
            return Err(Error::Singularity(format!("psi_dot diverges at u_max = {:?}", self.u_max)));
        }
        if self.r == T::zero() {
            return Ok(-T::one() / self.psi(u)?);
        }
        let t = self.log_ratio(u)?;
        if t == T::zero() {
            return Err(Error::Singularity("psi_dot diverges at the core circle".into()));
        }
        Ok(-T::one() / (T::lit(2.0) * self.r * t.sinh()))
    }

    /// `ψ̈ = 2ψ̇³ + ψ̇²/ψ`; singular at `u_max`.
    pub fn psi_ddot(&self, u: T) -> Result<T> {
        let d = self.psi_dot(u)?;
        let p = self.psi(u)?;
        Ok(T::lit(2.0) * d * d * d + d * d / p)
    }

    /// Model squared gradient through the inversion, `W_R = ((ψ² - R²)/ψ)²`.
    pub fn w_model(&self, u: T) -> Result<T> {
        if self.r == T::zero() {
            self.check_u(u)?;
            return Ok(T::one() - T::lit(2.0) * u);
        }
        let t = self.log_ratio(u)?;
        let s = t.sinh();
        Ok(T::lit(4.0) * self.r * self.r * s * s)
    }

    /// Evaluate `ψ` on a whole field of potential values.
    pub fn psi_field(&self, u: &[T]) -> Result<Vec<T>> {
        u.iter().map(|&x| self.psi(x)).collect()
    }

    /// Fit `W_R ≈ a₀τ + a₁τ^{3/2} + a₂τ²` for `τ = u_max - u ∈ (0, δ]`.
    ///
    /// `a₂` only absorbs the next order.
    pub fn expansion_check(&self, delta: T, samples: usize) -> Result<ExpansionReport<T>> {
        if self.r == T::zero() {
            return Err(Error::Fit("no core circle for R = 0".into()));
        }
        if !(delta > T::zero()) || samples < 8 {
            return Err(Error::Fit("need delta > 0 and at least 8 samples".into()));
        }
        // expansion parameter is z/R² ≈ 2√τ / R
        if T::lit(2.0) * delta.sqrt() / self.r > T::lit(0.5) {
            return Err(Error::Fit(format!(
                "delta = {:?} is outside the asymptotic regime for R = {:?}",
                delta, self.r
            )));
        }
        let mut rows = Vec::with_capacity(samples);
        let mut rhs = Vec::with_capacity(samples);
        for j in 1..=samples {
            let x = T::from_usize(j).unwrap() / T::from_usize(samples).unwrap();
            let tau = delta * x;
            let w = self.w_model(self.u_max - tau)?;
            rows.push(vec![x, x * x.sqrt(), x * x]);
            rhs.push(w / delta);
        }
        let c = lstsq(&rows, &rhs)?;
        let a0 = c[0];
        let a1 = c[1] / delta.sqrt();
        let expected_a1 = -self.branch.sign::<T>() * T::lit(8.0) / (T::lit(3.0) * self.r);
        Ok(ExpansionReport {
            a0,
            a1,
            expected_a1,
            a0_deviation: (a0 - T::lit(4.0)).abs(),
            a1_relative_deviation: ((a1 - expected_a1) / expected_a1).abs(),
        })
    }
}

/// Result of [`PseudoRadialBranch::expansion_check`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExpansionReport<T> {
    pub a0: T,
    pub a1: T,
    pub expected_a1: T,
    pub a0_deviation: T,
    pub a1_relative_deviation: T,
}
