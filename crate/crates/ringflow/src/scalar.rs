//! Scalar abstraction for the closed-form parts of the library.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type usable by the closed-form modules.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Send + Sync + 'static {
    /// Convert an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Absolute tolerance for bracketing root finders: `1e-14`, or a few ulps
    /// when the type cannot resolve that.
    #[inline]
    fn root_tol() -> Self {
        Self::lit(1e-14).max(Self::epsilon() * Self::lit(8.0))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `(e^{2t} - 1 - 2t) / 2`, accurate for small `|t|`.
///
/// With `psi = R e^t` this is `(u_max - u) / R^2` on the model family.
pub fn gap_fn<T: Real>(t: T) -> T {
    let two = T::lit(2.0);
    if t.abs() < T::lit(0.1) {
        // sum_{n>=2} 2^{n-1} t^n / n!
        let mut term = two * t * t / two; // n = 2: 2 t^2 / 2
        let mut sum = term;
        let mut n = 2u32;
        loop {
            n += 1;
            term = term * two * t / T::from_u32(n).unwrap();
            sum = sum + term;
            if term.abs() <= T::epsilon() * sum.abs() {
                break;
            }
            if n > 60 {
                break;
            }
        }
        sum
    } else {
        ((two * t).exp_m1() - two * t) / two
    }
}

/// Derivative of [`gap_fn`]: `e^{2t} - 1`.
pub fn gap_fn_prime<T: Real>(t: T) -> T {
    (T::lit(2.0) * t).exp_m1()
}

/// `1 - x + x ln x` for `x = R^2`, accurate as `x -> 1` (it equals `2 u_max`).
pub fn two_umax_of_sq<T: Real>(x: T) -> T {
    let y = T::one() - x;
    if y.abs() < T::lit(0.1) {
        // sum_{n>=2} y^n / (n (n-1))
        let mut pow = y * y;
        let mut sum = pow / T::lit(2.0);
        let mut n = 2u32;
        loop {
            n += 1;
            pow = pow * y;
            let nn = T::from_u32(n * (n - 1)).unwrap();
            let term = pow / nn;
            sum = sum + term;
            if term.abs() <= T::epsilon() * sum.abs() || n > 80 {
                break;
            }
        }
        sum
    } else if x == T::zero() {
        T::one()
    } else {
        y + x * x.ln()
    }
}
