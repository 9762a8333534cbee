use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ringflow", version, about = "Torsion problem on ring-shaped domains")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "RINGFLOW_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form data of the radial models on a grid of core radii.
    ModelTable {
        /// Core radii: `a,b,c` or `start:stop:step` (inclusive).
        #[arg(long, default_value = "0:0.9:0.1")]
        grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Solve on a domain and run every check.
    Verify(VerifyArgs),
    /// Eigenvalues of the linearized problem on a `(λ, k)` grid.
    Spectrum {
        /// Values of λ in (0, 1).
        #[arg(long, default_value = "0.01:0.99:0.01")]
        grid: String,
        /// Mode numbers k >= 0.
        #[arg(long, default_value = "0:10:1")]
        k_grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// The bifurcation values λ_k for k = 2..k_max.
    BifurcationPoints {
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Continue the branch bifurcating at λ_k and certify every point.
    Branch(BranchArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Domain file: `{"lambda": …, "v_inner": {"cos": […], "sin": […]}, "v_outer": …}`.
    #[arg(long, conflicts_with = "seed", required_unless_present = "seed")]
    pub domain: Option<PathBuf>,
    /// Generate a random small perturbation from this seed instead.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `n_theta x n_r`.
    #[arg(long, default_value = "96x64")]
    pub resolution: String,
    /// Absolute check tolerance; defaults to 10x the solver residual.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Also write the solution and wall traces as CSV.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Args)]
pub struct BranchArgs {
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Group generator g: perturbations use cos(i g θ).
    #[arg(long, default_value_t = 2)]
    pub generator: usize,
    #[arg(long, default_value_t = 3)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-2)]
    pub ds: f64,
    /// Admitted frequencies kept per wall.
    #[arg(long, default_value_t = 8)]
    pub m_trunc: usize,
    /// Newton tolerance on the sup of the shooting residual.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value = "96x64")]
    pub resolution: String,
}

/// `a,b,c` or inclusive `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number `{p}` in grid `{text}`")))
            .collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else {
            bail!("range grid `{text}` needs start:stop:step");
        };
        if !(step > 0.0) || stop < start {
            bail!("range grid `{text}` needs step > 0 and stop >= start");
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // integer multiples keep the nodes free of accumulated rounding
        return Ok((0..=n).map(|i| start + i as f64 * step).map(|x| (x * 1e12).round() / 1e12).collect());
    }
    text.split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad number `{p}` in grid `{text}`")))
        .collect()
}

/// `96x64` → `(96, 64)`.
pub fn parse_resolution(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text.split_once(['x', 'X']).with_context(|| format!("resolution `{text}` is not NTxNR"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}
