//! Small dense least squares via Householder QR.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimise `|A x - b|` for a tall `A` given row by row.
///
/// Columns are rescaled to unit norm before factorising.
pub fn lstsq<T: Real>(rows: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let m = rows.len();
    if m == 0 || b.len() != m {
        return Err(Error::Fit("empty or mismatched least-squares system".into()));
    }
    let n = rows[0].len();
    if m < n {
        return Err(Error::Fit(format!("{m} samples for {n} unknowns")));
    }
    // column-major copy
    let mut a: Vec<Vec<T>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut scale = vec![T::one(); n];
    for (j, col) in a.iter_mut().enumerate() {
        let nrm = col.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
        if nrm == T::zero() {
            return Err(Error::Fit(format!("column {j} is identically zero")));
        }
        scale[j] = nrm;
        col.iter_mut().for_each(|v| *v = *v / nrm);
    }
    let mut rhs = b.to_vec();
    for k in 0..n {
        let norm = (k..m).fold(T::zero(), |acc, i| acc + a[k][i] * a[k][i]).sqrt();
        if norm <= T::epsilon() {
            return Err(Error::Fit("rank-deficient design matrix".into()));
        }
        let alpha = if a[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = (k..m).map(|i| a[k][i]).collect();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for col in a.iter_mut().skip(k) {
            let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * col[i]);
            let f = two * dot / vnorm2;
            for i in k..m {
                col[i] = col[i] - f * v[i - k];
            }
        }
        let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * rhs[i]);
        let f = two * dot / vnorm2;
        for i in k..m {
            rhs[i] = rhs[i] - f * v[i - k];
        }
    }
    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s = s - a[j][k] * x[j];
        }
        x[k] = s / a[k][k];
    }
    Ok(x.iter().zip(&scale).map(|(&xi, &s)| xi / s).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_polynomial() {
        let xs: Vec<f64> = (1..=30).map(|i| i as f64 / 30.0).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x.powf(1.5), x * x]).collect();
        let b: Vec<f64> = xs.iter().map(|&x| 4.0 * x - 0.3 * x.powf(1.5) + 0.01 * x * x).collect();
        let c = lstsq(&rows, &b).unwrap();
        assert!((c[0] - 4.0).abs() < 1e-10);
        assert!((c[1] + 0.3).abs() < 1e-10);
        assert!((c[2] - 0.01).abs() < 1e-10);
    }

    #[test]
    fn rejects_underdetermined() {
        assert!(lstsq(&[vec![1.0, 2.0]], &[1.0]).is_err());
    }
}
