//! Collocation Laplacian in boundary-fitted coordinates.
//!
//! With `r = a(θ) + s h(θ)`, `h = b - a`, and
//! `σ = ∂s/∂θ|_r = -(a' + s h')/h`,
//!
//! ```text
//! Δu = U_ss (1/h² + σ²/r²) + U_s (1/(h r) + (σ_θ + σ σ_s)/r²)
//!      + 2σ U_sθ / r² + U_θθ / r²
//! ```
//!
//! where `σ_s = -h'/h` and `σ_θ = -(a'' + s h'')/h + (a' + s h') h'/h²`
//! are derivatives at fixed `s`.

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;

use super::cheb::RadialGrid;
use super::fourier::Periodic;
use crate::error::{Error, Result};

/// Wall radii and their θ-derivatives at the θ nodes.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub theta: Vec<f64>,
    pub a: Vec<f64>,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub b: Vec<f64>,
    pub b1: Vec<f64>,
    pub b2: Vec<f64>,
}

impl Geometry {
    pub fn h(&self, m: usize) -> f64 {
        self.b[m] - self.a[m]
    }

    pub fn h1(&self, m: usize) -> f64 {
        self.b1[m] - self.a1[m]
    }

    pub fn radius(&self, s: f64, m: usize) -> f64 {
        self.a[m] + s * self.h(m)
    }

    /// `∂s/∂θ` at fixed `r`.
    pub fn sigma(&self, s: f64, m: usize) -> f64 {
        -(self.a1[m] + s * self.h1(m)) / self.h(m)
    }
}

/// Variable-coefficient operator plus its mean-annulus preconditioner.
pub struct Operator<'a> {
    pub grid: &'a RadialGrid,
    pub per: &'a Periodic,
    c_ss: DMatrix<f64>,
    c_s: DMatrix<f64>,
    c_st: DMatrix<f64>,
    c_tt: DMatrix<f64>,
    /// Whether the coefficients depend on θ at all.
    pub separable: bool,
}

impl<'a> Operator<'a> {
    pub fn new(grid: &'a RadialGrid, per: &'a Periodic, geom: &Geometry) -> Result<Self> {
        let nr = grid.len();
        let nt = per.len();
        let mut c_ss = DMatrix::zeros(nr, nt);
        let mut c_s = DMatrix::zeros(nr, nt);
        let mut c_st = DMatrix::zeros(nr, nt);
        let mut c_tt = DMatrix::zeros(nr, nt);
        let mut separable = true;
        for m in 0..nt {
            let h = geom.h(m);
            let h1 = geom.h1(m);
            let h2 = geom.b2[m] - geom.a2[m];
            if !(h > 0.0) || !(geom.a[m] > 0.0) {
                return Err(Error::SingularAssembly(format!(
                    "degenerate mapping at θ = {:.6}: inner {}, width {}",
                    geom.theta[m], geom.a[m], h
                )));
            }
            if geom.a1[m] != 0.0 || h1 != 0.0 || geom.a[m] != geom.a[0] || h != geom.h(0) {
                separable = false;
            }
            for (j, &s) in grid.s.iter().enumerate() {
                let r = geom.a[m] + s * h;
                let p = geom.a1[m] + s * h1;
                let sigma = -p / h;
                let sigma_s = -h1 / h;
                let sigma_t = -(geom.a2[m] + s * h2) / h + p * h1 / (h * h);
                let ir2 = 1.0 / (r * r);
                c_ss[(j, m)] = 1.0 / (h * h) + sigma * sigma * ir2;
                c_s[(j, m)] = 1.0 / (h * r) + (sigma_t + sigma * sigma_s) * ir2;
                c_st[(j, m)] = 2.0 * sigma * ir2;
                c_tt[(j, m)] = ir2;
            }
        }
        Ok(Self { grid, per, c_ss, c_s, c_st, c_tt, separable })
    }

    pub fn n_interior(&self) -> usize {
        (self.grid.len() - 2) * self.per.len()
    }

    /// Embed interior unknowns (θ-major, `m * (n_r - 2) + j - 1`) into a full
    /// grid with zero walls.
    pub fn embed(&self, x: &[f64]) -> DMatrix<f64> {
        let nr = self.grid.len();
        let ni = nr - 2;
        let mut u = DMatrix::zeros(nr, self.per.len());
        for m in 0..self.per.len() {
            for j in 0..ni {
                u[(j + 1, m)] = x[m * ni + j];
            }
        }
        u
    }

    pub fn restrict(&self, u: &DMatrix<f64>, out: &mut [f64]) {
        let ni = self.grid.len() - 2;
        for m in 0..self.per.len() {
            for j in 0..ni {
                out[m * ni + j] = u[(j + 1, m)];
            }
        }
    }

    /// `(∂_θ U, ∂²_θ U)` row by row.
    pub fn theta_derivatives(&self, u: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let nr = u.nrows();
        let nt = self.per.len();
        let mut ut = DMatrix::zeros(nr, nt);
        let mut utt = DMatrix::zeros(nr, nt);
        let mut buf = vec![Complex64::new(0.0, 0.0); nt];
        let mut b2 = vec![Complex64::new(0.0, 0.0); nt];
        for j in 0..nr {
            if (0..nt).all(|m| u[(j, m)] == 0.0) {
                continue;
            }
            for m in 0..nt {
                buf[m] = Complex64::new(u[(j, m)], 0.0);
            }
            self.per.forward_in_place(&mut buf);
            for q in 0..nt {
                let k = self.per.wavenumber(q) as f64;
                b2[q] = buf[q] * (-k * k);
                buf[q] = if q == nt / 2 { Complex64::new(0.0, 0.0) } else { buf[q] * Complex64::new(0.0, k) };
            }
            self.per.inverse_in_place(&mut buf);
            self.per.inverse_in_place(&mut b2);
            for m in 0..nt {
                ut[(j, m)] = buf[m].re;
                utt[(j, m)] = b2[m].re;
            }
        }
        (ut, utt)
    }

    /// `Δ_h U` at every node for a full-grid field.
    pub fn laplacian(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        let us = &self.grid.d1 * u;
        let uss = &self.grid.d2 * u;
        let mut out = self.c_ss.component_mul(&uss) + self.c_s.component_mul(&us);
        let (ut, utt) = self.theta_derivatives(u);
        out += self.c_tt.component_mul(&utt);
        if !self.separable {
            let ust = &self.grid.d1 * &ut;
            out += self.c_st.component_mul(&ust);
        }
        out
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let u = self.embed(x);
        let lu = self.laplacian(&u);
        self.restrict(&lu, out);
    }

    /// Dense matrix of the interior operator, column by column.
    pub fn assemble_dense(&self) -> DMatrix<f64> {
        let n = self.n_interior();
        let mut a = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for k in 0..n {
            e[k] = 1.0;
            self.apply(&e, &mut col);
            a.set_column(k, &DVector::from_column_slice(&col));
            e[k] = 0.0;
        }
        a
    }
}

/// Exact inverse of the Laplacian on the annulus `{a₀ < r < b₀}`, mode by mode.
pub struct ModePreconditioner<'a> {
    per: &'a Periodic,
    ni: usize,
    lus: Vec<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl<'a> ModePreconditioner<'a> {
    pub fn new(grid: &RadialGrid, per: &'a Periodic, a0: f64, b0: f64) -> Result<Self> {
        let nr = grid.len();
        let ni = nr - 2;
        let h0 = b0 - a0;
        let mut base = DMatrix::zeros(ni, ni);
        let mut inv_r2 = vec![0.0; ni];
        for i in 0..ni {
            let r = a0 + grid.s[i + 1] * h0;
            inv_r2[i] = 1.0 / (r * r);
            for j in 0..ni {
                base[(i, j)] = grid.d2[(i + 1, j + 1)] / (h0 * h0) + grid.d1[(i + 1, j + 1)] / (h0 * r);
            }
        }
        let mut lus = Vec::with_capacity(per.len() / 2 + 1);
        for q in 0..=per.len() / 2 {
            let mut a = base.clone();
            let q2 = (q * q) as f64;
            for i in 0..ni {
                a[(i, i)] -= q2 * inv_r2[i];
            }
            let lu = a.lu();
            if !lu.is_invertible() {
                return Err(Error::SingularAssembly(format!("mode {q} block is singular")));
            }
            lus.push(lu);
        }
        Ok(Self { per, ni, lus })
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let nt = self.per.len();
        let ni = self.ni;
        // spectra[j][q]
        let mut spectra: Vec<Vec<Complex64>> = (0..ni)
            .map(|j| {
                let mut row: Vec<Complex64> = (0..nt).map(|m| Complex64::new(x[m * ni + j], 0.0)).collect();
                self.per.forward_in_place(&mut row);
                row
            })
            .collect();
        let mut rhs = DMatrix::zeros(ni, 2);
        for q in 0..nt {
            let k = self.per.wavenumber(q).unsigned_abs() as usize;
            for j in 0..ni {
                rhs[(j, 0)] = spectra[j][q].re;
                rhs[(j, 1)] = spectra[j][q].im;
            }
            self.lus[k].solve_mut(&mut rhs);
            for j in 0..ni {
                spectra[j][q] = Complex64::new(rhs[(j, 0)], rhs[(j, 1)]);
            }
        }
        for (j, row) in spectra.iter_mut().enumerate() {
            self.per.inverse_in_place(row);
            for m in 0..nt {
                out[m * ni + j] = row[m].re;
            }
        }
    }
}
