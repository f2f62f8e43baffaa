use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Numerical experiments on fractal uncertainty principles.
///
/// Set arguments take either `cantor:L:digits:k` (for example
/// `cantor:3:0,2:6`) or the path of a set JSON file. Frequency-side sets
/// (`weight --y`, `uc-constant --y`, `iterate --y`) given as `cantor:` specs
/// are dilated by `L^k` onto the integer frequency scale.
#[derive(Debug, Parser, Serialize)]
#[command(name = "fup-lab", version)]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, env = "FUP_LAB_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Generate a regular set.
    #[command(subcommand)]
    Gen(GenKind),
    /// Certify δ-regularity of a set on a range of scales.
    Verify(VerifyArgs),
    /// Norm of a restricted discrete Fourier transform.
    FupNorm(FupNormArgs),
    /// Norms over N = L^k for a Cantor pair, with exponent fits.
    FupScan(FupScanArgs),
    /// Restricted norm of the circle operator with a hyperbolic phase.
    HyperbolicNorm(HyperbolicArgs),
    /// Restricted norm of an oscillatory integral operator.
    PhaseNorm(PhaseArgs),
    /// Harmonic measure by Brownian walks.
    #[command(subcommand)]
    Harmonic(HarmonicKind),
    /// Build the adapted weight for a frequency set.
    Weight(WeightArgs),
    /// Unique continuation constant for a frequency set.
    UcConstant(UcArgs),
    /// Iterate the multiplier contraction.
    Iterate(IterateArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    /// Base-L Cantor set with the given digit alphabet.
    Cantor(GenCantorArgs),
    /// Cover of a Schottky limit set in the circle chart.
    Schottky(GenSchottkyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenCantorArgs {
    #[arg(long)]
    pub base: u32,
    /// Comma-separated digits below the base.
    #[arg(long)]
    pub alphabet: String,
    #[arg(long)]
    pub depth: u32,
    #[arg(long, default_value = "set.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GenSchottkyArgs {
    /// Schottky spec JSON; overrides `--radius`.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Radius of the four symmetric disks at ±1, ±3.
    #[arg(long, default_value_t = 0.3)]
    pub radius: f64,
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, default_value = "set.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub set: String,
    /// Defaults to the dimension claimed with the set.
    #[arg(long, value_parser = unit_interval)]
    pub delta: Option<f64>,
    /// Defaults to the constant claimed with the set.
    #[arg(long)]
    pub cr: Option<f64>,
    /// Smallest scale, rational; defaults to the cell width.
    #[arg(long)]
    pub alpha0: Option<String>,
    /// Largest scale, rational; defaults to 1.
    #[arg(long)]
    pub alpha1: Option<String>,
    #[arg(long, default_value = "certificate.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FupNormArgs {
    /// Instance JSON `{n, x_idx, y_idx}`.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub instance: Option<PathBuf>,
    #[arg(long, requires = "y")]
    pub x: Option<String>,
    #[arg(long, requires = "x")]
    pub y: Option<String>,
    /// Grid size; defaults to L^k of X.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value = "norm.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FupScanArgs {
    /// `L:digits` for X.
    #[arg(long)]
    pub cantor: String,
    /// `L:digits` for Y; defaults to X.
    #[arg(long)]
    pub cantor_y: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub kmin: u32,
    #[arg(long, default_value_t = 8)]
    pub kmax: u32,
    #[arg(long, default_value = "scan.csv")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct HyperbolicArgs {
    /// Limit set in the angle chart.
    #[arg(long, requires = "chi", conflicts_with = "synthetic")]
    pub set: Option<String>,
    /// Cutoff JSON `{support: {x, y}, scale}`.
    #[arg(long)]
    pub chi: Option<PathBuf>,
    /// Use the mid-third Cantor set of this depth on the arc [0, 2].
    #[arg(long)]
    pub synthetic: Option<u32>,
    /// Semiclassical parameter; defaults to 3^{-k} with `--synthetic k`.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value = "hyperbolic.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub h: f64,
    /// Phase JSON; defaults to the linear phase with a bump on (-1, 2)².
    #[arg(long)]
    pub phase: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Quadrature nodes per length h.
    #[arg(long, default_value_t = 10.0)]
    pub nodes_per_h: f64,
    #[arg(long, default_value = "phase.json")]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HarmonicKind {
    /// Compare exit statistics with closed forms and lower bounds.
    Check(HarmonicArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct HarmonicArgs {
    /// One of strip, slit-strip, slit-plane.
    #[arg(long)]
    pub domain: String,
    /// Strip half-height.
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    /// Slit endpoints `a,b`; required for the slit domains, ignored for the strip.
    #[arg(long, allow_hyphen_values = true)]
    pub slit: Option<String>,
    /// Starting point on the real axis.
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Number of walks, e.g. 1e6.
    #[arg(long, default_value = "1e5", value_parser = count)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write exit histograms as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value = "harmonic.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct WeightArgs {
    #[arg(long)]
    pub y: String,
    #[arg(long, value_parser = unit_interval)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub cr: Option<f64>,
    #[arg(long, default_value = "weight.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct UcArgs {
    #[arg(long)]
    pub y: String,
    /// Length of the window centered in each unit interval.
    #[arg(long, default_value_t = 0.25, conflicts_with = "window")]
    pub c1: f64,
    /// Explicit window `offset,length` inside [0, 1].
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub period: Option<i64>,
    #[arg(long, default_value = "uc.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct IterateArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long = "L", default_value_t = 3)]
    pub l: u32,
    #[arg(long = "T", default_value_t = 3)]
    pub t: u32,
    /// Steps requested; capped where L^{(m-1)T+1} exceeds N.
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    /// Writes the full report as JSON beside the CSV.
    #[arg(long, default_value = "steps.csv")]
    pub out: PathBuf,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
        Ok(v as usize)
    } else {
        Err(format!("{s} is not a positive integer"))
    }
}
