//! Shooting residual of the overdetermined problem on perturbed annuli, its
//! finite-difference linearization, and Newton continuation of the
//! non-radial branches that bifurcate from the radial solutions at `λ_k`.
//!
//! Perturbations are `v = (v₁, v₂)`: the inner wall sits at `λ + v₁(θ)`, the
//! outer one at `1 - v₂(θ)`. The residual is
//! `F_λ(v) = (∂_ν u - c_λ^i, ∂_ν u - c_λ^o)` with `ν` the inward normal.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifurcation::{find_bifurcation_point, spectral_point, BifurcationPoint};
use crate::error::{Error, Result};
use crate::model_family::{core_radius_sq, expected_core_radius, BranchKind, NwssValue};
use crate::solver::fourier::real_coefficients;
use crate::solver::{
    boundary_normal_derivative, locate_max_set, solve_poisson, Field, FourierSeries, NormalConvention, RingDomain,
    SolveOptions, Wall,
};
use crate::theorem_checks::{run_suite, CheckOptions, SuiteReport};

/// Checks run by `certify_branch_point`; the rest of the suite is recorded.
pub const CERTIFIED_CHECKS: [&str; 4] = ["gradient_estimate", "pohozaev", "length_bounds", "core_radius_pinch"];

/// Cyclic-dihedral symmetry restricting perturbations to `cos(i g θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryGroup {
    pub generator: usize,
}

impl Default for SymmetryGroup {
    fn default() -> Self {
        Self { generator: 2 }
    }
}

impl SymmetryGroup {
    pub fn new(generator: usize) -> Result<Self> {
        if generator < 2 {
            return Err(Error::Domain(format!("group generator {generator} must be >= 2")));
        }
        Ok(Self { generator })
    }

    /// `i g`.
    pub fn frequency(&self, i: usize) -> usize {
        i * self.generator
    }

    /// `σ_i = (i g)²`.
    pub fn eigenvalue(&self, i: usize) -> f64 {
        (self.frequency(i) as f64).powi(2)
    }

    pub fn frequencies(&self, m_trunc: usize) -> Vec<usize> {
        (0..m_trunc).map(|i| self.frequency(i)).collect()
    }

    pub fn admits(&self, q: usize) -> bool {
        q % self.generator == 0
    }
}

/// Cosine coefficients of `(v₁, v₂)` at a list of frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationVector {
    pub frequencies: Vec<usize>,
    pub coeffs_inner: Vec<f64>,
    pub coeffs_outer: Vec<f64>,
}

impl PerturbationVector {
    pub fn zeros(frequencies: Vec<usize>) -> Self {
        let n = frequencies.len();
        Self { frequencies, coeffs_inner: vec![0.0; n], coeffs_outer: vec![0.0; n] }
    }

    /// `a cos qθ` on the inner wall and `b cos qθ` on the outer one.
    pub fn single(q: usize, a: f64, b: f64) -> Self {
        Self { frequencies: vec![q], coeffs_inner: vec![a], coeffs_outer: vec![b] }
    }

    /// Upper bound `max(Σ|a_q|, Σ|b_q|)` for the sup norm.
    pub fn norm(&self) -> f64 {
        let l1 = |v: &[f64]| v.iter().map(|c| c.abs()).sum::<f64>();
        l1(&self.coeffs_inner).max(l1(&self.coeffs_outer))
    }

    pub fn series(&self) -> (FourierSeries, FourierSeries) {
        let top = self.frequencies.iter().copied().max().unwrap_or(0);
        let mut a = vec![0.0; top + 1];
        let mut b = vec![0.0; top + 1];
        for (i, &q) in self.frequencies.iter().enumerate() {
            a[q] += self.coeffs_inner[i];
            b[q] += self.coeffs_outer[i];
        }
        (FourierSeries { cos: a, sin: Vec::new() }, FourierSeries { cos: b, sin: Vec::new() })
    }

    pub fn domain(&self, lambda: f64) -> Result<RingDomain> {
        let (a, b) = self.series();
        RingDomain::new(lambda, a, b)
    }

    /// Coefficient pair at frequency `q`, zero when absent.
    pub fn mode(&self, q: usize) -> (f64, f64) {
        self.frequencies
            .iter()
            .position(|&f| f == q)
            .map(|i| (self.coeffs_inner[i], self.coeffs_outer[i]))
            .unwrap_or((0.0, 0.0))
    }

    /// Same perturbation on another frequency list; dropped modes must be zero
    /// for this to be lossless.
    pub fn on_frequencies(&self, frequencies: &[usize]) -> Self {
        let mut out = Self::zeros(frequencies.to_vec());
        for (i, &q) in frequencies.iter().enumerate() {
            let (a, b) = self.mode(q);
            out.coeffs_inner[i] = a;
            out.coeffs_outer[i] = b;
        }
        out
    }

    /// `⟨v, w⟩_λ = λ ∮ v₁w₁ + ∮ v₂w₂` on the unit circle.
    pub fn scalar_product(&self, other: &Self, lambda: f64) -> f64 {
        let mut acc = 0.0;
        for (i, &q) in self.frequencies.iter().enumerate() {
            let (a, b) = other.mode(q);
            let w = if q == 0 { 2.0 * PI } else { PI };
            acc += w * (lambda * self.coeffs_inner[i] * a + self.coeffs_outer[i] * b);
        }
        acc
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            frequencies: self.frequencies.clone(),
            coeffs_inner: self.coeffs_inner.iter().map(|c| c * s).collect(),
            coeffs_outer: self.coeffs_outer.iter().map(|c| c * s).collect(),
        }
    }

    /// Rotation by `π/k`: the coefficient at `q` picks up `cos(qπ/k)`, exact
    /// when `k` divides every frequency.
    pub fn half_turn_of_mode(&self, k: usize) -> Self {
        let mut out = self.clone();
        for (i, &q) in self.frequencies.iter().enumerate() {
            let c = (q as f64 * PI / k as f64).cos();
            out.coeffs_inner[i] *= c;
            out.coeffs_outer[i] *= c;
        }
        out
    }

    fn to_vector(&self) -> Vec<f64> {
        self.coeffs_inner.iter().chain(&self.coeffs_outer).copied().collect()
    }

    fn from_vector(frequencies: &[usize], x: &[f64]) -> Self {
        let n = frequencies.len();
        Self { frequencies: frequencies.to_vec(), coeffs_inner: x[..n].to_vec(), coeffs_outer: x[n..2 * n].to_vec() }
    }
}

/// `F_λ(v)` sampled at the θ nodes, with its cosine projections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingResidual {
    pub lambda: f64,
    pub theta: Vec<f64>,
    pub inner: Vec<f64>,
    pub outer: Vec<f64>,
    pub frequencies: Vec<usize>,
    /// Coefficients of `cos qθ` in the two components.
    pub proj_inner: Vec<f64>,
    pub proj_outer: Vec<f64>,
    /// Sup over the nodes of what the projections miss.
    pub tail: f64,
    pub sup: f64,
    pub solve_residual: f64,
    pub u_max: f64,
    /// `max |∇u| / √(2 u_max)` on the inner and outer wall.
    pub tau_inner: f64,
    pub tau_outer: f64,
}

fn project(field: &Field, samples: &[f64], frequencies: &[usize]) -> (Vec<f64>, f64) {
    let (a, _) = real_coefficients(&field.per, samples);
    let proj: Vec<f64> = frequencies.iter().map(|&q| a.get(q).copied().unwrap_or(0.0)).collect();
    let tail = field
        .theta()
        .iter()
        .zip(samples)
        .map(|(&t, &f)| {
            let kept: f64 = frequencies.iter().zip(&proj).map(|(&q, c)| c * (q as f64 * t).cos()).sum();
            (f - kept).abs()
        })
        .fold(0.0, f64::max);
    (proj, tail)
}

/// Model boundary gradients `(c_λ^i, c_λ^o)`.
pub fn model_constants(lambda: f64) -> (f64, f64) {
    let r2 = core_radius_sq(lambda);
    ((r2 - lambda * lambda) / lambda, 1.0 - r2)
}

fn residual_of_field(field: &Field, lambda: f64, frequencies: &[usize]) -> ShootingResidual {
    let (ci, co) = model_constants(lambda);
    let ti = boundary_normal_derivative(field, Wall::Inner, NormalConvention::Inward);
    let to = boundary_normal_derivative(field, Wall::Outer, NormalConvention::Inward);
    let inner: Vec<f64> = ti.normal_derivative.iter().map(|d| d - ci).collect();
    let outer: Vec<f64> = to.normal_derivative.iter().map(|d| d - co).collect();
    let (proj_inner, tail_i) = project(field, &inner, frequencies);
    let (proj_outer, tail_o) = project(field, &outer, frequencies);
    let sup = inner.iter().chain(&outer).map(|f| f.abs()).fold(0.0, f64::max);
    let u_max = locate_max_set(field).u_max;
    let norm = (2.0 * u_max).sqrt();
    ShootingResidual {
        lambda,
        theta: field.theta().to_vec(),
        inner,
        outer,
        frequencies: frequencies.to_vec(),
        proj_inner,
        proj_outer,
        tail: tail_i.max(tail_o),
        sup,
        solve_residual: field.report.residual_estimate,
        u_max,
        tau_inner: ti.max_gradient() / norm,
        tau_outer: to.max_gradient() / norm,
    }
}

fn shoot(lambda: f64, v: &PerturbationVector, opts: &SolveOptions) -> Result<(ShootingResidual, Field)> {
    let field = solve_poisson(&v.domain(lambda)?, opts)?;
    Ok((residual_of_field(&field, lambda, &v.frequencies), field))
}

/// Solve on `Ω_λ^v` and return `F_λ(v)`, projected on the frequencies of `v`.
pub fn shooting_residual(lambda: f64, v: &PerturbationVector, opts: &SolveOptions) -> Result<ShootingResidual> {
    Ok(shoot(lambda, v, opts)?.0)
}

/// `L_λ` restricted to `span{e₁, e₂}`, `e₁ = (Y/√λ, 0)`, `e₂ = (0, Y)`,
/// `Y = cos kθ / √π`, by central differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdLinearization {
    pub lambda: f64,
    pub k: usize,
    pub step: f64,
    pub matrix: [[f64; 2]; 2],
    /// Largest forward/backward disagreement relative to the largest entry.
    pub one_sided_gap: f64,
    pub warning: Option<String>,
}

impl FdLinearization {
    /// `(μ₁, μ₂)` of the 2×2 matrix, ascending; `None` if complex.
    pub fn eigenvalues(&self) -> Option<(f64, f64)> {
        let [[a, b], [c, d]] = self.matrix;
        let disc = (a - d).powi(2) + 4.0 * b * c;
        if disc < 0.0 {
            return None;
        }
        let (t, r) = (0.5 * (a + d), 0.5 * disc.sqrt());
        Some((t - r, t + r))
    }
}

fn unit_cosine(k: usize) -> f64 {
    if k == 0 {
        1.0 / (2.0 * PI).sqrt()
    } else {
        1.0 / PI.sqrt()
    }
}

pub fn fd_linearization(lambda: f64, k: usize, h: f64, opts: &SolveOptions) -> Result<FdLinearization> {
    if !(1e-5..=1e-3).contains(&h) {
        return Err(Error::Precondition(format!("step {h:e} outside [1e-5, 1e-3]")));
    }
    let y = unit_cosine(k);
    let sl = lambda.sqrt();
    let basis = [PerturbationVector::single(k, y / sl, 0.0), PerturbationVector::single(k, 0.0, y)];
    // ⟨F, e₁⟩_λ = √λ ∮ F₁ Y and ⟨F, e₂⟩_λ = ∮ F₂ Y
    let coords = |r: &ShootingResidual| -> [f64; 2] {
        let w = if k == 0 { 2.0 * PI } else { PI };
        [sl * w * y * r.proj_inner[0], w * y * r.proj_outer[0]]
    };
    let base = coords(&shooting_residual(lambda, &PerturbationVector::zeros(vec![k]), opts)?);
    let runs: Vec<Result<([f64; 2], [f64; 2])>> = basis
        .par_iter()
        .map(|e| {
            let p = coords(&shooting_residual(lambda, &e.scaled(h), opts)?);
            let m = coords(&shooting_residual(lambda, &e.scaled(-h), opts)?);
            Ok((p, m))
        })
        .collect();
    let mut matrix = [[0.0; 2]; 2];
    let mut gap = 0.0f64;
    for (col, run) in runs.into_iter().enumerate() {
        let (p, m) = run?;
        for row in 0..2 {
            matrix[row][col] = (p[row] - m[row]) / (2.0 * h);
            let fwd = (p[row] - base[row]) / h;
            let bwd = (base[row] - m[row]) / h;
            gap = gap.max((fwd - bwd).abs());
        }
    }
    let scale = matrix.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
    let one_sided_gap = gap / scale.max(f64::MIN_POSITIVE);
    let warning = (one_sided_gap > 1e-3)
        .then(|| format!("one-sided estimates disagree by {one_sided_gap:.2e} relative: step {h:e} is degenerate"));
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    Ok(FdLinearization { lambda, k, step: h, matrix, one_sided_gap, warning })
}

/// Kernel direction `z_{k,1}` of the linearization at `λ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullVector {
    pub k: usize,
    pub lambda_k: f64,
    pub mu1: f64,
    /// Coordinates in `(e₁, e₂)`, unit length.
    pub basis: [f64; 2],
    /// `z` as a perturbation supported on frequency `k`.
    pub direction: PerturbationVector,
    /// `|M z - μ₁ z|_∞`.
    pub eigen_residual: f64,
}

/// Unit eigenvector of `M_{λ_k, k}` for `μ₁`, oriented so its inner
/// component is positive.
pub fn null_eigenvector(bp: &BifurcationPoint<f64>) -> Result<NullVector> {
    let k = bp.k as usize;
    let sp = spectral_point(bp.lambda_k, k as f64)?;
    let [[a, b], [c, d]] = sp.m_entries;
    let mu = sp.mu1;
    // (M - μ I) z = 0 from whichever row is larger
    let r1 = [b, mu - a];
    let r2 = [mu - d, c];
    let mut z = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) { r1 } else { r2 };
    let n = z[0].hypot(z[1]);
    if n == 0.0 {
        return Err(Error::Singularity(format!("M at λ_{k} is a multiple of the identity")));
    }
    z = [z[0] / n, z[1] / n];
    if z[0] < 0.0 {
        z = [-z[0], -z[1]];
    }
    let eigen_residual = (a * z[0] + b * z[1] - mu * z[0]).abs().max((c * z[0] + d * z[1] - mu * z[1]).abs());
    let y = unit_cosine(k);
    let direction = PerturbationVector::single(k, z[0] * y / bp.lambda_k.sqrt(), z[1] * y);
    Ok(NullVector { k, lambda_k: bp.lambda_k, mu1: mu, basis: z, direction, eigen_residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub group: SymmetryGroup,
    pub k: usize,
    pub n_steps: usize,
    pub ds: f64,
    /// Number of admitted frequencies `0, g, …, (m_trunc - 1) g`.
    pub m_trunc: usize,
    /// Convergence when the nodal sup of `F` is below this.
    pub tol_newton: f64,
    pub max_iter: usize,
    /// Finite-difference step of the Jacobian columns.
    pub fd_step: f64,
    /// Step halvings allowed when a Newton update leaves the admissible domains.
    pub max_halvings: usize,
    pub solve: SolveOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            group: SymmetryGroup::default(),
            k: 2,
            n_steps: 3,
            ds: 1e-2,
            m_trunc: 8,
            tol_newton: 1e-8,
            max_iter: 12,
            fd_step: 1e-6,
            max_halvings: 6,
            solve: SolveOptions::new(96, 64),
        }
    }
}

/// A converged solution on the branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub s: f64,
    pub lambda: f64,
    pub v: PerturbationVector,
    pub residual_sup: f64,
    pub tail_residual: f64,
    /// `‖P_k v‖_{λ_k}` with the sign of `⟨v, z⟩_{λ_k}`, `P_k` the projection on
    /// frequency `k`.
    pub mode_amplitude: f64,
    pub nwss_inner: NwssValue<f64>,
    pub nwss_outer: NwssValue<f64>,
    pub u_max: f64,
    pub newton_iterations: usize,
}

impl BranchPoint {
    pub fn domain(&self) -> Result<RingDomain> {
        self.v.domain(self.lambda)
    }

    /// Expected core radii `(R(Γ_i), R(Γ_o))`, when the NWSS lie in range.
    pub fn core_radii(&self) -> (Option<f64>, Option<f64>) {
        let r = |t: NwssValue<f64>| expected_core_radius(t).ok().map(|c| c.value());
        (r(self.nwss_inner), r(self.nwss_outer))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub k: usize,
    pub group: SymmetryGroup,
    pub lambda_k: f64,
    pub null: NullVector,
    /// Sorted by `s`, including the trivial point `s = 0`.
    pub points: Vec<BranchPoint>,
    /// Why either side stopped early.
    pub truncated: Vec<String>,
}

impl Branch {
    pub fn is_truncated(&self) -> bool {
        !self.truncated.is_empty()
    }

    pub fn point_at(&self, s: f64) -> Option<&BranchPoint> {
        self.points.iter().find(|p| (p.s - s).abs() <= 1e-12 * s.abs().max(1.0))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn summary(&self) -> Vec<BranchRow> {
        self.points
            .iter()
            .map(|p| {
                let (ri, ro) = p.core_radii();
                BranchRow {
                    s: p.s,
                    lambda: p.lambda,
                    mode_amplitude: p.mode_amplitude,
                    residual_sup: p.residual_sup,
                    tau_i: p.nwss_inner.value(),
                    tau_o: p.nwss_outer.value(),
                    r_i: ri,
                    r_o: ro,
                }
            })
            .collect()
    }
}

/// Summary row of one branch point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRow {
    pub s: f64,
    pub lambda: f64,
    pub mode_amplitude: f64,
    pub residual_sup: f64,
    pub tau_i: f64,
    pub tau_o: f64,
    #[serde(rename = "R_i")]
    pub r_i: Option<f64>,
    #[serde(rename = "R_o")]
    pub r_o: Option<f64>,
}

pub fn write_branch_csv<W: std::io::Write>(rows: &[BranchRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for row in rows {
        wr.serialize(row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_branch_csv<R: std::io::Read>(r: R) -> Result<Vec<BranchRow>> {
    csv::Reader::from_reader(r).deserialize().map(|row| Ok(row?)).collect()
}

/// Unknowns `(y, λ)` with `v = s y`; equations `F(s y)/s` projected on the
/// admitted frequencies, plus `⟨y, z⟩_{λ_k} = 1`.
struct Corrector<'a> {
    opts: &'a ContinuationOptions,
    freqs: Vec<usize>,
    z: PerturbationVector,
    k: usize,
    lambda_k: f64,
}

struct Evaluation {
    g: Vec<f64>,
    residual: ShootingResidual,
}

impl Corrector<'_> {
    fn unpack(&self, x: &[f64]) -> (PerturbationVector, f64) {
        (PerturbationVector::from_vector(&self.freqs, x), x[x.len() - 1])
    }

    fn admissible(&self, x: &[f64], s: f64) -> bool {
        let (y, lambda) = self.unpack(x);
        lambda > 0.0 && lambda < 1.0 && y.scaled(s).domain(lambda).is_ok()
    }

    fn eval(&self, x: &[f64], s: f64) -> Result<Evaluation> {
        let (y, lambda) = self.unpack(x);
        let residual = shooting_residual(lambda, &y.scaled(s), &self.opts.solve)?;
        let mut g: Vec<f64> = residual.proj_inner.iter().chain(&residual.proj_outer).map(|f| f / s).collect();
        g.push(y.scalar_product(&self.z, self.lambda_k) - 1.0);
        Ok(Evaluation { g, residual })
    }

    fn jacobian(&self, x: &[f64], s: f64, g0: &[f64]) -> Result<DMatrix<f64>> {
        let n = x.len();
        let h = self.opts.fd_step;
        let cols: Vec<Result<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut xp = x.to_vec();
                let step = h * (1.0 + x[j].abs());
                xp[j] += step;
                let g = self.eval(&xp, s)?.g;
                Ok(g.iter().zip(g0).map(|(a, b)| (a - b) / step).collect())
            })
            .collect();
        let mut jac = DMatrix::zeros(n, n);
        for (j, c) in cols.into_iter().enumerate() {
            jac.set_column(j, &DVector::from_vec(c?));
        }
        Ok(jac)
    }

    /// Newton from `x0`; once below `tol_newton` it keeps polishing while the
    /// residual still drops by 4× and sits above the solver's own accuracy.
    fn solve(&self, x0: Vec<f64>, s: f64) -> std::result::Result<(Vec<f64>, Evaluation, usize), String> {
        let mut x = x0;
        let mut ev = self.eval(&x, s).map_err(|e| format!("s = {s}: {e}"))?;
        let mut prev_sup = f64::INFINITY;
        for it in 0..=self.opts.max_iter {
            let sup = ev.residual.sup;
            let floor = 2.0 * ev.residual.solve_residual;
            let done = sup < self.opts.tol_newton && (sup <= floor || sup > prev_sup / 4.0);
            if done {
                return Ok((x, ev, it));
            }
            if it == self.opts.max_iter {
                break;
            }
            prev_sup = sup;
            let jac = self.jacobian(&x, s, &ev.g).map_err(|e| format!("s = {s}: {e}"))?;
            let rhs = -DVector::from_column_slice(&ev.g);
            let dx = jac.lu().solve(&rhs).ok_or_else(|| format!("s = {s}: singular Jacobian"))?;
            let mut t = 1.0;
            let mut halvings = 0;
            let next = loop {
                let cand: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + t * d).collect();
                if self.admissible(&cand, s) {
                    break cand;
                }
                if halvings == self.opts.max_halvings {
                    return Err(format!("s = {s}: Newton update leaves the admissible domains"));
                }
                t *= 0.5;
                halvings += 1;
            };
            x = next;
            ev = self.eval(&x, s).map_err(|e| format!("s = {s}: {e}"))?;
        }
        Err(format!(
            "s = {s}: Newton did not reach {:.1e} in {} iterations (residual {:.3e})",
            self.opts.tol_newton, self.opts.max_iter, ev.residual.sup
        ))
    }

    fn point(&self, x: &[f64], s: f64, ev: &Evaluation, iterations: usize) -> Result<BranchPoint> {
        let (y, lambda) = self.unpack(x);
        let v = y.scaled(s);
        let (a, b) = v.mode(self.k);
        let norm_k = PerturbationVector::single(self.k, a, b);
        let amp = norm_k.scalar_product(&norm_k, self.lambda_k).sqrt();
        let sign = v.scalar_product(&self.z, self.lambda_k).signum();
        Ok(BranchPoint {
            s,
            lambda,
            residual_sup: ev.residual.sup,
            tail_residual: ev.residual.tail,
            mode_amplitude: sign * amp,
            nwss_inner: NwssValue::new(ev.residual.tau_inner)?,
            nwss_outer: NwssValue::new(ev.residual.tau_outer)?,
            u_max: ev.residual.u_max,
            newton_iterations: iterations,
            v,
        })
    }
}

/// Trace the branch through `(0, λ_k)` for `s = ±ds, ±2ds, …, ±n_steps·ds`.
///
/// Newton failures end that side of the branch; the reason is kept in
/// `Branch::truncated` and the points found so far are returned.
pub fn continue_branch(opts: &ContinuationOptions) -> Result<Branch> {
    let g = opts.group;
    if !g.admits(opts.k) || opts.k == 0 {
        return Err(Error::Precondition(format!("k = {} is not an admitted frequency of the group", opts.k)));
    }
    if opts.m_trunc < 4 || opts.k / g.generator >= opts.m_trunc {
        return Err(Error::Precondition(format!(
            "truncation {} must be >= 4 and include frequency {}",
            opts.m_trunc, opts.k
        )));
    }
    if !(opts.ds > 0.0) || opts.n_steps == 0 {
        return Err(Error::Precondition("need ds > 0 and at least one step".into()));
    }
    let bp = find_bifurcation_point::<f64>(opts.k as u32)?;
    let null = null_eigenvector(&bp)?;
    let freqs = g.frequencies(opts.m_trunc);
    let z = null.direction.on_frequencies(&freqs);
    let corr = Corrector { opts, freqs: freqs.clone(), z: z.clone(), k: opts.k, lambda_k: bp.lambda_k };

    let trivial = shooting_residual(bp.lambda_k, &PerturbationVector::zeros(freqs.clone()), &opts.solve)?;
    let mut points = vec![BranchPoint {
        s: 0.0,
        lambda: bp.lambda_k,
        v: PerturbationVector::zeros(freqs.clone()),
        residual_sup: trivial.sup,
        tail_residual: trivial.tail,
        mode_amplitude: 0.0,
        nwss_inner: NwssValue::new(trivial.tau_inner)?,
        nwss_outer: NwssValue::new(trivial.tau_outer)?,
        u_max: trivial.u_max,
        newton_iterations: 0,
    }];
    let mut truncated = Vec::new();
    for sign in [1.0, -1.0] {
        let mut x0: Vec<f64> = z.to_vector();
        x0.push(bp.lambda_k);
        let mut history: Vec<Vec<f64>> = Vec::new();
        for step in 1..=opts.n_steps {
            let s = sign * step as f64 * opts.ds;
            let guess = match history.len() {
                0 => x0.clone(),
                1 => history[0].clone(),
                n => history[n - 1].iter().zip(&history[n - 2]).map(|(a, b)| 2.0 * a - b).collect(),
            };
            match corr.solve(guess, s) {
                Ok((x, ev, it)) => {
                    points.push(corr.point(&x, s, &ev, it)?);
                    history.push(x);
                }
                Err(msg) => {
                    log::warn!("branch truncated: {msg}");
                    truncated.push(msg);
                    break;
                }
            }
        }
    }
    points.sort_by(|a, b| a.s.total_cmp(&b.s));
    Ok(Branch { k: opts.k, group: g, lambda_k: bp.lambda_k, null, points, truncated })
}

/// Independent re-check of one branch point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub s: f64,
    pub lambda: f64,
    pub base_resolution: (usize, usize),
    pub refined_resolution: (usize, usize),
    pub base_residual_sup: f64,
    pub refined_residual_sup: f64,
    /// Solver accuracy estimate of the refined solve.
    pub solve_residual: f64,
    /// `max - min` of `|∇u|` on the inner and outer wall (refined).
    pub gradient_spread: [f64; 2],
    pub spread_tolerance: f64,
    pub tau: [f64; 2],
    pub kinds: [BranchKind; 2],
    pub r_inner: Option<f64>,
    pub r_outer: Option<f64>,
    pub suite: SuiteReport,
    pub failures: Vec<String>,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// `R(Γ_o) - R(Γ_i)` when both are defined.
    pub fn radius_gap(&self) -> Option<f64> {
        Some(self.r_outer? - self.r_inner?)
    }
}

/// Re-solve at doubled resolution, check that `|∇u|` is constant on each wall
/// within 10× the solver residual, and run the check suite.
pub fn certify_branch_point(bp: &BranchPoint, base: &SolveOptions) -> Result<Certification> {
    let refined = SolveOptions { n_theta: 2 * base.n_theta, n_r: 2 * base.n_r, ..*base };
    let (r0, _) = shoot(bp.lambda, &bp.v, base)?;
    let (r1, field) = shoot(bp.lambda, &bp.v, &refined)?;
    let spread = |w: Wall| boundary_normal_derivative(&field, w, NormalConvention::Inward).gradient_spread_abs();
    let gradient_spread = [spread(Wall::Inner), spread(Wall::Outer)];
    let spread_tolerance = 10.0 * r1.solve_residual.max(r0.solve_residual);
    let mut failures = Vec::new();
    for (w, sp) in ["inner", "outer"].iter().zip(gradient_spread) {
        if sp > spread_tolerance {
            failures.push(format!("|∇u| on the {w} wall varies by {sp:.3e} > {spread_tolerance:.3e}"));
        }
    }
    let suite = run_suite(&field, &CheckOptions::default())?;
    for c in suite.failures() {
        if CERTIFIED_CHECKS.iter().any(|n| c.name.starts_with(n)) {
            failures.push(format!("{} failed (worst {:?})", c.name, c.worst_violation));
        }
    }
    let tau = [r1.tau_inner, r1.tau_outer];
    let kinds = tau.map(|t| BranchKind::classify(t, crate::model_family::CRITICAL_TOL));
    if kinds != [BranchKind::Inner, BranchKind::Outer] {
        failures.push(format!("walls classify as {kinds:?}, expected [Inner, Outer]"));
    }
    let radius = |t: f64| NwssValue::new(t).and_then(expected_core_radius).ok().map(|c| c.value());
    Ok(Certification {
        s: bp.s,
        lambda: bp.lambda,
        base_resolution: (base.n_theta, base.n_r),
        refined_resolution: (refined.n_theta, refined.n_r),
        base_residual_sup: r0.sup,
        refined_residual_sup: r1.sup,
        solve_residual: r1.solve_residual,
        gradient_spread,
        spread_tolerance,
        tau,
        kinds,
        r_inner: radius(tau[0]),
        r_outer: radius(tau[1]),
        suite: suite.without_samples(),
        failures,
    })
}
