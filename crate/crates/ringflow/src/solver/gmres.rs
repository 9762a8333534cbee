//! Restarted GMRES with right preconditioning.

/// Convergence record of one GMRES run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresStats {
    pub iterations: usize,
    /// Final residual 2-norm from the Arnoldi recurrence.
    pub residual_norm: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solve `A x = b` starting from `x`, with `A` applied as `apply(v, out)` and
/// the right preconditioner as `precond(v, out)`.
///
/// Stops when the residual norm drops below `abs_tol`, or after `max_iter`
/// inner iterations in total.
pub fn gmres<A, P>(
    mut apply: A,
    mut precond: P,
    b: &[f64],
    x: &mut [f64],
    restart: usize,
    abs_tol: f64,
    max_iter: usize,
) -> GmresStats
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut total = 0;
    let mut tmp = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut r = vec![0.0; n];
    let mut res_norm;
    loop {
        apply(x, &mut tmp);
        for i in 0..n {
            r[i] = b[i] - tmp[i];
        }
        let beta = norm(&r);
        res_norm = beta;
        if beta <= abs_tol || total >= max_iter {
            return GmresStats { iterations: total, residual_norm: beta, converged: beta <= abs_tol };
        }
        let m = restart.min(max_iter - total).max(1);
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        v.push(r.iter().map(|x| x / beta).collect());
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut cs = vec![0.0; m];
        let mut sn = vec![0.0; m];
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            precond(&v[k], &mut z);
            let mut w = vec![0.0; n];
            apply(&z, &mut w);
            // modified Gram-Schmidt, applied twice for stability
            for _ in 0..2 {
                for (j, vj) in v.iter().enumerate() {
                    let hij = dot(&w, vj);
                    h[j][k] += hij;
                    for i in 0..n {
                        w[i] -= hij * vj[i];
                    }
                }
            }
            let hn = norm(&w);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = h[k][k].hypot(h[k + 1][k]);
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = denom;
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            total += 1;
            k_used = k + 1;
            res_norm = g[k + 1].abs();
            if res_norm <= abs_tol || hn == 0.0 {
                break;
            }
            v.push(w.iter().map(|x| x / hn).collect());
        }
        // back substitution for the Krylov coefficients
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut upd = vec![0.0; n];
        for (j, yj) in y.iter().enumerate() {
            for i in 0..n {
                upd[i] += yj * v[j][i];
            }
        }
        precond(&upd, &mut z);
        for i in 0..n {
            x[i] += z[i];
        }
        if res_norm <= abs_tol || total >= max_iter {
            apply(x, &mut tmp);
            let true_res = norm(&b.iter().zip(&tmp).map(|(a, c)| a - c).collect::<Vec<_>>());
            return GmresStats {
                iterations: total,
                residual_norm: true_res,
                converged: res_norm <= abs_tol,
            };
        }
    }
}
