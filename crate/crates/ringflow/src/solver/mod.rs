//! Spectral solution of `Δu = -2`, `u = 0` on perturbed annuli.
//!
//! Collocation is Fourier in `θ` and Chebyshev–Lobatto (or fourth-order
//! finite differences) in the radial coordinate `s`, with
//! `r = a(θ) + s (b(θ) - a(θ))`. The linear system is solved with GMRES,
//! right-preconditioned by the exact mode-by-mode solve on the mean annulus;
//! on an exact annulus the preconditioner is the inverse.

pub mod boundary;
pub mod cheb;
pub mod domain;
pub mod export;
pub mod fourier;
pub mod gmres;
pub mod max_set;
pub mod operator;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use boundary::{
    boundary_curvature, boundary_normal_derivative, nwss_of_boundary, BoundaryTrace, NormalConvention,
    Wall,
};
pub use cheb::{RadialGrid, RadialScheme};
pub use domain::{FourierSeries, RingDomain};
pub use max_set::{locate_max_set, MaxSetEstimate, MaxSetKind, Ridge};

use crate::error::{Error, Result};
use fourier::Periodic;
use operator::{Geometry, ModePreconditioner, Operator};

/// Linear solver for the collocation system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LinearSolver {
    #[default]
    Gmres,
    /// Dense LU of the assembled system; only sensible on small grids.
    DirectLu,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub n_theta: usize,
    pub n_r: usize,
    pub scheme: RadialScheme,
    pub linear: LinearSolver,
    /// GMRES stops at `rtol · |b|₂`.
    pub rtol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl SolveOptions {
    pub fn new(n_theta: usize, n_r: usize) -> Self {
        Self {
            n_theta,
            n_r,
            scheme: RadialScheme::Chebyshev,
            linear: LinearSolver::Gmres,
            rtol: 1e-14,
            max_iter: 300,
            restart: 60,
        }
    }

    pub fn with_scheme(mut self, scheme: RadialScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_linear(mut self, linear: LinearSolver) -> Self {
        self.linear = linear;
        self
    }
}

/// Diagnostics of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n_theta: usize,
    pub n_r: usize,
    pub scheme: RadialScheme,
    pub linear: LinearSolver,
    pub iterations: usize,
    /// `max |Δ_h u + 2|` over interior nodes.
    pub algebraic_residual: f64,
    /// Largest trailing Chebyshev/Fourier coefficient of `u`.
    pub spectral_tail: f64,
    /// `max(algebraic_residual, spectral_tail)`.
    pub residual_estimate: f64,
    pub u_max: f64,
}

/// Discrete solution on the `(s, θ)` tensor grid.
#[derive(Debug, Clone)]
pub struct Field {
    pub domain: RingDomain,
    pub grid: RadialGrid,
    pub per: Periodic,
    pub geom: Geometry,
    /// `u[(j, m)]` at `(s_j, θ_m)`.
    pub u: DMatrix<f64>,
    /// `∂u/∂s` at fixed θ.
    pub u_s: DMatrix<f64>,
    /// `∂u/∂θ` at fixed s.
    pub u_t: DMatrix<f64>,
    pub report: SolveReport,
}

pub(crate) fn geometry(domain: &RingDomain, theta: &[f64]) -> Geometry {
    let vi = &domain.v_inner;
    let vo = &domain.v_outer;
    Geometry {
        theta: theta.to_vec(),
        a: theta.iter().map(|&t| domain.lambda + vi.eval(t)).collect(),
        a1: theta.iter().map(|&t| vi.eval_derivative(t, 1)).collect(),
        a2: theta.iter().map(|&t| vi.eval_derivative(t, 2)).collect(),
        b: theta.iter().map(|&t| 1.0 - vo.eval(t)).collect(),
        b1: theta.iter().map(|&t| -vo.eval_derivative(t, 1)).collect(),
        b2: theta.iter().map(|&t| -vo.eval_derivative(t, 2)).collect(),
    }
}

fn check_options(opts: &SolveOptions) -> Result<()> {
    if opts.n_theta < 16 || opts.n_theta % 2 != 0 {
        return Err(Error::Precondition(format!("n_theta = {} must be even and >= 16", opts.n_theta)));
    }
    if opts.n_r < 16 {
        return Err(Error::Precondition(format!("n_r = {} must be >= 16", opts.n_r)));
    }
    Ok(())
}

/// Solve `Δu = -2` with zero Dirichlet data on `domain`.
pub fn solve_poisson(domain: &RingDomain, opts: &SolveOptions) -> Result<Field> {
    check_options(opts)?;
    domain.validate()?;
    let grid = RadialGrid::new(opts.scheme, opts.n_r);
    let per = Periodic::new(opts.n_theta);
    let geom = geometry(domain, &per.nodes());
    let op = Operator::new(&grid, &per, &geom)?;
    let n = op.n_interior();
    let b = vec![-2.0; n];
    let mut x = vec![0.0; n];

    let a0 = geom.a.iter().sum::<f64>() / opts.n_theta as f64;
    let b0 = geom.b.iter().sum::<f64>() / opts.n_theta as f64;
    let iterations = match opts.linear {
        LinearSolver::Gmres => {
            let pre = ModePreconditioner::new(&grid, &per, a0, b0)?;
            pre.apply(&b, &mut x);
            let bnorm = (n as f64).sqrt() * 2.0;
            let stats = gmres::gmres(
                |v, o| op.apply(v, o),
                |v, o| pre.apply(v, o),
                &b,
                &mut x,
                opts.restart,
                opts.rtol * bnorm,
                opts.max_iter,
            );
            log::debug!("gmres: {} iterations, residual {:e}", stats.iterations, stats.residual_norm);
            stats.iterations
        }
        LinearSolver::DirectLu => {
            let a = op.assemble_dense();
            let lu = a.lu();
            let sol = lu
                .solve(&DVector::from_vec(b.clone()))
                .ok_or_else(|| Error::SingularAssembly("collocation matrix is singular".into()))?;
            x.copy_from_slice(sol.as_slice());
            1
        }
    };

    let u = op.embed(&x);
    let lap = op.laplacian(&u);
    let nr = opts.n_r;
    let mut algebraic = 0.0f64;
    for m in 0..opts.n_theta {
        for j in 1..nr - 1 {
            algebraic = algebraic.max((lap[(j, m)] + 2.0).abs());
        }
    }
    if !algebraic.is_finite() {
        return Err(Error::NoConvergence("non-finite residual".into()));
    }
    let u_s = &grid.d1 * &u;
    let (u_t, _) = op.theta_derivatives(&u);
    let spectral_tail = spectral_tail(&grid, &per, &u);
    let mut field = Field {
        domain: domain.clone(),
        grid,
        per,
        geom,
        u,
        u_s,
        u_t,
        report: SolveReport {
            n_theta: opts.n_theta,
            n_r: opts.n_r,
            scheme: opts.scheme,
            linear: opts.linear,
            iterations,
            algebraic_residual: algebraic,
            spectral_tail,
            residual_estimate: algebraic.max(spectral_tail),
            u_max: 0.0,
        },
    };
    field.report.u_max = max_set::ridge(&field).u_max;
    Ok(field)
}

fn spectral_tail(grid: &RadialGrid, per: &Periodic, u: &DMatrix<f64>) -> f64 {
    let nr = u.nrows();
    let nt = u.ncols();
    let mut tail = 0.0f64;
    if grid.scheme == RadialScheme::Chebyshev {
        for m in 0..nt {
            let c = cheb::cheb_coefficients(u.column(m).as_slice());
            tail = c[nr - 3..].iter().fold(tail, |t, x| t.max(x.abs()));
        }
    }
    for j in 0..nr {
        let row: Vec<f64> = (0..nt).map(|m| u[(j, m)]).collect();
        let c = per.forward(&row);
        for q in nt / 2 - 1..=nt / 2 + 1 {
            tail = tail.max(c[q].norm());
        }
    }
    tail
}

impl Field {
    pub fn n_r(&self) -> usize {
        self.grid.len()
    }

    pub fn n_theta(&self) -> usize {
        self.per.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.geom.theta
    }

    pub fn radius(&self, j: usize, m: usize) -> f64 {
        self.geom.radius(self.grid.s[j], m)
    }

    /// `(∂u/∂r, r⁻¹ ∂u/∂θ|_r)` at node `(j, m)`.
    pub fn polar_gradient(&self, j: usize, m: usize) -> (f64, f64) {
        let s = self.grid.s[j];
        let h = self.geom.h(m);
        let r = self.geom.radius(s, m);
        let sigma = self.geom.sigma(s, m);
        let us = self.u_s[(j, m)];
        (us / h, (self.u_t[(j, m)] + sigma * us) / r)
    }

    /// `|∇u|²` at every node.
    pub fn grad_sq(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_r(), self.n_theta(), |j, m| {
            let (gr, gt) = self.polar_gradient(j, m);
            gr * gr + gt * gt
        })
    }

    /// `u` along the radial line `θ_m` at parameter `s`.
    pub fn value_at(&self, s: f64, m: usize) -> f64 {
        self.grid.interpolate(self.u.column(m).as_slice(), s)
    }

    /// `∂u/∂s` along the radial line `θ_m` at parameter `s`.
    pub fn u_s_at(&self, s: f64, m: usize) -> f64 {
        self.grid.interpolate(self.u_s.column(m).as_slice(), s)
    }

    pub fn u_t_at(&self, s: f64, m: usize) -> f64 {
        self.grid.interpolate(self.u_t.column(m).as_slice(), s)
    }

    /// `|∇u|²` off-node on the radial line `θ_m`.
    pub fn grad_sq_at(&self, s: f64, m: usize) -> f64 {
        let h = self.geom.h(m);
        let r = self.geom.radius(s, m);
        let us = self.u_s_at(s, m);
        let gt = (self.u_t_at(s, m) + self.geom.sigma(s, m) * us) / r;
        (us / h).powi(2) + gt * gt
    }

    /// Area element `r h ds dθ` factor at node `(j, m)`.
    pub fn jacobian(&self, j: usize, m: usize) -> f64 {
        self.radius(j, m) * self.geom.h(m)
    }

    /// `∬ f dμ` over the whole domain for node values `f`.
    pub fn integrate(&self, f: &DMatrix<f64>) -> f64 {
        let dth = 2.0 * std::f64::consts::PI / self.n_theta() as f64;
        let mut acc = 0.0;
        for m in 0..self.n_theta() {
            for j in 0..self.n_r() {
                acc += self.grid.weights[j] * f[(j, m)] * self.jacobian(j, m);
            }
        }
        acc * dth
    }

    /// Copy of this field rescaled by `x ↦ μ x`: `u ↦ μ² u(x/μ)`.
    ///
    /// Only the outer wall at radius one is geometrically meaningful for the
    /// rescaled copy, so this returns node data rather than a new domain.
    pub fn scaled_values(&self, mu: f64) -> ScaledView {
        ScaledView {
            factor: mu,
            u_max: mu * mu * self.report.u_max,
            u: self.u.map(|x| mu * mu * x),
            grad_sq: self.grad_sq().map(|g| mu * mu * g),
        }
    }
}

/// Node data of a field after `x ↦ μ x`.
#[derive(Debug, Clone)]
pub struct ScaledView {
    pub factor: f64,
    pub u_max: f64,
    pub u: DMatrix<f64>,
    pub grad_sq: DMatrix<f64>,
}

/// Scale factor `μ = √(u_max(R) / u_max)` that matches a field's maximum to
/// the model with core radius `R`. Lengths scale by `μ`, `u` and `|∇u|²` by
/// `μ²`, curvatures by `1/μ`.
pub fn normalize(field: &Field, r_core: f64) -> Result<ScaledView> {
    let target = crate::model_family::model_umax(r_core);
    if !(field.report.u_max > 0.0) {
        return Err(Error::Precondition("field maximum must be positive".into()));
    }
    Ok(field.scaled_values((target / field.report.u_max).sqrt()))
}
