use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ringflow::bifurcation::{bifurcation_table, spectrum_grid, verify_zero_condition, write_spectrum_csv};
use ringflow::continuation::{certify_branch_point, continue_branch, write_branch_csv, ContinuationOptions, SymmetryGroup};
use ringflow::model_family::{model_table, write_model_table_csv};
use ringflow::solver::export::{write_field_csv, write_trace_csv};
use ringflow::solver::{
    boundary_normal_derivative, solve_poisson, FourierSeries, NormalConvention, RingDomain, SolveOptions, Wall,
};
use ringflow::theorem_checks::{run_suite, CheckOptions, SuiteReport};
use ringflow::CheckReport;

use crate::args::{parse_grid, parse_resolution, BranchArgs, Cli, Command, Format, VerifyArgs};

/// Rejected input; maps to the invalid-input exit code.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(e: impl std::fmt::Display) -> anyhow::Error {
    Invalid(e.to_string()).into()
}

pub enum Status {
    Ok,
    ChecksFailed,
    Truncated,
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value).with_context(|| format!("writing {}", path.display()))?;
    writeln!(w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_with<F>(dir: &Path, name: &str, f: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> ringflow::Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    f(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn solve_options(resolution: &str) -> Result<SolveOptions> {
    let (nt, nr) = parse_resolution(resolution).map_err(invalid)?;
    if nt < 16 || nt % 2 != 0 || nr < 16 {
        return Err(invalid(format!("resolution {nt}x{nr}: n_theta must be even and >= 16, n_r >= 16")));
    }
    Ok(SolveOptions::new(nt, nr))
}

pub fn run(cli: &Cli) -> Result<Status> {
    let out = &cli.out;
    match &cli.command {
        Command::ModelTable { grid, format } => model_table_cmd(out, grid, *format),
        Command::Verify(a) => verify_cmd(out, a),
        Command::Spectrum { grid, k_grid, format } => spectrum_cmd(out, grid, k_grid, *format),
        Command::BifurcationPoints { k_max, format } => bifurcation_cmd(out, *k_max, *format),
        Command::Branch(a) => branch_cmd(out, a),
    }
}

fn model_table_cmd(out: &Path, grid: &str, format: Format) -> Result<Status> {
    let grid = parse_grid(grid).map_err(invalid)?;
    if let Some(r) = grid.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(invalid(format!("core radius {r} not in [0, 1)")));
    }
    let rows = model_table(&grid)?;
    let path = match format {
        Format::Csv => write_with(out, "model_table.csv", |w| write_model_table_csv(&rows, w))?,
        Format::Json => write_json(out, "model_table.json", &rows)?,
    };
    println!("{} rows -> {}", rows.len(), path.display());
    Ok(Status::Ok)
}

/// Small random perturbation of an annulus: modes 1..=4 on both walls with
/// amplitudes up to `0.01/q`.
pub fn random_domain(seed: u64) -> ringflow::Result<RingDomain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambda = rng.gen_range(0.3..0.6);
    let wall = |rng: &mut ChaCha8Rng| {
        let mut s = FourierSeries { cos: vec![0.0; 5], sin: vec![0.0; 5] };
        for q in 1..=4 {
            let a = 0.01 / q as f64;
            s.cos[q] = rng.gen_range(-a..a);
            s.sin[q] = rng.gen_range(-a..a);
        }
        s
    };
    let vi = wall(&mut rng);
    let vo = wall(&mut rng);
    RingDomain::new(lambda, vi, vo)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    domain: &'a RingDomain,
    solve: &'a ringflow::solver::SolveReport,
    suite: SuiteReport,
}

fn verify_cmd(out: &Path, a: &VerifyArgs) -> Result<Status> {
    let opts = solve_options(&a.resolution)?;
    if let Some(t) = a.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("tolerance {t} must be positive")));
        }
    }
    let domain = match (&a.domain, a.seed) {
        (Some(p), _) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RingDomain::from_json_str(&text).map_err(|e| invalid(format!("{}: {e}", p.display())))?
        }
        (None, Some(seed)) => random_domain(seed).map_err(invalid)?,
        (None, None) => return Err(invalid("either --domain or --seed is required")),
    };
    let field = solve_poisson(&domain, &opts)?;
    let mut copts = CheckOptions::default();
    if let Some(t) = a.tol {
        copts = copts.with_tolerance(t);
    }
    let suite = run_suite(&field, &copts)?;
    let failures: Vec<&CheckReport> = suite.failures();
    for c in &failures {
        eprintln!("FAIL {} (worst {:?}, tolerance {:e}) {}", c.name, c.worst_violation, c.tolerance, c.notes.join("; "));
    }
    let n_app = suite.checks.iter().filter(|c| c.applicable).count();
    let status = if failures.is_empty() { Status::Ok } else { Status::ChecksFailed };
    let report = VerifyOutput { domain: &domain, solve: &field.report, suite: suite.without_samples() };
    let path = write_json(out, "verify.json", &report)?;
    if a.dump {
        write_with(out, "field.csv", |w| write_field_csv(&field, w))?;
        for (wall, name) in [(Wall::Inner, "trace_inner.csv"), (Wall::Outer, "trace_outer.csv")] {
            let t = boundary_normal_derivative(&field, wall, NormalConvention::Inward);
            write_with(out, name, |w| write_trace_csv(&t, w))?;
        }
    }
    println!(
        "{} of {n_app} applicable checks passed (max set {:?}) -> {}",
        n_app - failures.len(),
        suite.max_set,
        path.display()
    );
    Ok(status)
}

fn spectrum_cmd(out: &Path, grid: &str, k_grid: &str, format: Format) -> Result<Status> {
    let lambdas = parse_grid(grid).map_err(invalid)?;
    let ks = parse_grid(k_grid).map_err(invalid)?;
    if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(invalid(format!("lambda {l} not in (0, 1)")));
    }
    if let Some(k) = ks.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(invalid(format!("mode number {k} must be >= 0")));
    }
    let rows = spectrum_grid(&lambdas, &ks)?;
    let path = match format {
        Format::Csv => write_with(out, "spectrum.csv", |w| write_spectrum_csv(&rows, w))?,
        Format::Json => write_json(out, "spectrum.json", &rows)?,
    };
    println!("{} rows -> {}", rows.len(), path.display());
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct BifurcationEntry {
    k: u32,
    lambda_k: f64,
    dmu1_dlambda: f64,
    zero_condition: CheckReport,
}

#[derive(Serialize)]
struct BifurcationCsvRow {
    k: u32,
    lambda_k: f64,
    dmu1_dlambda: f64,
    cond3_residual: f64,
    cond5_margin: f64,
    zero_condition_pass: bool,
}

fn bifurcation_cmd(out: &Path, k_max: u32, format: Format) -> Result<Status> {
    if k_max < 2 {
        return Err(invalid(format!("k_max = {k_max} must be >= 2")));
    }
    let table = bifurcation_table(k_max)?;
    let entries: Vec<BifurcationEntry> = table
        .iter()
        .map(|p| {
            Ok(BifurcationEntry {
                k: p.k,
                lambda_k: p.lambda_k,
                dmu1_dlambda: p.dmu1_dlambda,
                zero_condition: verify_zero_condition(p)?,
            })
        })
        .collect::<ringflow::Result<_>>()?;
    let path = match format {
        Format::Json => write_json(out, "bifurcation_points.json", &entries)?,
        Format::Csv => {
            let rows: Vec<BifurcationCsvRow> = entries
                .iter()
                .map(|e| BifurcationCsvRow {
                    k: e.k,
                    lambda_k: e.lambda_k,
                    dmu1_dlambda: e.dmu1_dlambda,
                    cond3_residual: e.zero_condition.diagnostics["cond3_residual"],
                    cond5_margin: e.zero_condition.diagnostics["cond5_margin"],
                    zero_condition_pass: e.zero_condition.pass,
                })
                .collect();
            write_with(out, "bifurcation_points.csv", |w| {
                let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
                for r in &rows {
                    wr.serialize(r)?;
                }
                wr.flush()?;
                Ok(())
            })?
        }
    };
    let failed: Vec<u32> = entries.iter().filter(|e| !e.zero_condition.pass).map(|e| e.k).collect();
    for e in entries.iter().filter(|e| !e.zero_condition.pass) {
        eprintln!("FAIL zero condition at k = {}: {}", e.k, e.zero_condition.notes.join("; "));
    }
    println!("{} points -> {}", entries.len(), path.display());
    Ok(if failed.is_empty() { Status::Ok } else { Status::ChecksFailed })
}

fn branch_cmd(out: &Path, a: &BranchArgs) -> Result<Status> {
    let solve = solve_options(&a.resolution)?;
    let group = SymmetryGroup::new(a.generator).map_err(invalid)?;
    if !(a.ds > 0.0 && a.ds.is_finite()) || a.steps == 0 {
        return Err(invalid("need --ds > 0 and --steps >= 1"));
    }
    if !(a.tol > 0.0) {
        return Err(invalid(format!("tolerance {} must be positive", a.tol)));
    }
    let opts = ContinuationOptions {
        group,
        k: a.k,
        n_steps: a.steps,
        ds: a.ds,
        m_trunc: a.m_trunc,
        tol_newton: a.tol,
        solve,
        ..Default::default()
    };
    let branch = continue_branch(&opts).map_err(|e| match e {
        ringflow::Error::Precondition(m) => invalid(m),
        e => e.into(),
    })?;
    let certs = branch
        .points
        .iter()
        .map(|p| certify_branch_point(p, &opts.solve))
        .collect::<ringflow::Result<Vec<_>>>()?;
    write_json(out, "branch.json", &branch)?;
    write_with(out, "branch.csv", |w| write_branch_csv(&branch.summary(), w))?;
    let path = write_json(out, "certification.json", &certs)?;
    for c in certs.iter().filter(|c| !c.passed()) {
        eprintln!("FAIL certification at s = {}: {}", c.s, c.failures.join("; "));
    }
    for t in &branch.truncated {
        eprintln!("truncated: {t}");
    }
    let certified = certs.iter().filter(|c| c.passed()).count();
    println!(
        "{} points ({} certified), lambda_k = {} -> {}",
        branch.points.len(),
        certified,
        branch.lambda_k,
        path.display()
    );
    Ok(if branch.is_truncated() {
        Status::Truncated
    } else if certified < certs.len() {
        Status::ChecksFailed
    } else {
        Status::Ok
    })
}
