//! Command-line arguments. The parsed command doubles as the run config that
//! is embedded in every output file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use naqc::optimize::Family;
use naqc::{CoherenceKind, OptBudget};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "naqc", version, about = "NAQC and Bell-CHSH calculations for two-qubit states")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Haar-random local unitaries per optimization.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub haar_samples: usize,
    /// Simplex iterations per refinement start.
    #[arg(long, global = true, default_value_t = 200)]
    pub refine_iters: usize,
    /// Grid size of the command's scan (per-command default when absent).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Worker threads (default: available parallelism). Results do not
    /// depend on it.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Use 10⁷ Haar samples per optimization.
    #[arg(long, global = true)]
    pub long_run: bool,
}

impl Global {
    pub fn budget(&self) -> OptBudget {
        let haar_samples = if self.long_run { OptBudget::LONG_RUN_SAMPLES } else { self.haar_samples };
        OptBudget { haar_samples, refine_iters: self.refine_iters, seed: self.seed }
    }

    pub fn grid_or(&self, default: usize) -> usize {
        self.grid.unwrap_or(default)
    }
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// NAQC and CHSH verdicts for states read from a file.
    Evaluate(EvaluateArgs),
    /// Vertices of the M = 1 surface or of an NAQC iso-surface over the
    /// Bell-diagonal tetrahedron.
    SurfaceMesh(MeshArgs),
    /// Critical v0 of the symmetric family as a function of w0.
    V0cCurve(V0cArgs),
    /// Plain and unitary-optimized quantifiers along the Bell mixture
    /// x Φ⁺ + (1 − x) Ψ⁻.
    QCurve(QCurveArgs),
    /// Maximize NAQC over a family.
    Maximize(MaximizeArgs),
    /// Count NAQC states without CHSH violation in a sampled family.
    HierarchyScan(ScanArgs),
    /// Run acceptance suites.
    Verify(VerifyArgs),
    /// Rerun the config embedded in an output file and compare the results.
    Replay(ReplayArgs),
}

fn default_kinds() -> Vec<CoherenceKind> {
    CoherenceKind::ALL.to_vec()
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluateArgs {
    /// One state per line: 32 numbers (16 complex entries, row-major, as
    /// re,im pairs) or 15 (r, s, T row-major). '#' starts a comment.
    pub input: PathBuf,
    /// Coherence measure; repeat for several.
    #[arg(long = "kind", default_values_t = default_kinds())]
    #[serde(default = "default_kinds")]
    pub kinds: Vec<CoherenceKind>,
    /// Maximize over local unitaries before comparing with the threshold.
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    /// `M = 1`.
    Bell,
    /// NAQC iso-surface for the l1 measure.
    L1,
    /// NAQC iso-surface for the relative-entropy measure.
    Re,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshArgs {
    #[arg(long, value_enum, default_value_t = SurfaceKind::Bell)]
    pub surface: SurfaceKind,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct V0cArgs {
    #[arg(long, default_value = "l1")]
    pub kind: CoherenceKind,
    #[arg(long, default_value_t = 1.0)]
    pub w1: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub w0_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub w0_max: f64,
    #[arg(long, default_value_t = 121)]
    pub steps: usize,
    /// Bisection tolerance on v0.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QCurveArgs {
    #[arg(long, default_value_t = 0.0)]
    pub x_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximizeTarget {
    /// Symmetric family over (w0, w1) at fixed v0.
    Symmetric,
    /// Relative-entropy NAQC of rotated Bell-diagonal states with M ≤ 1.
    C4,
    /// Diagonal-T states on the line AO′ at fixed a0.
    LineAoprime,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizeArgs {
    #[arg(value_enum)]
    pub target: MaximizeTarget,
    #[arg(long, default_value = "l1")]
    pub kind: CoherenceKind,
    /// v0 of the symmetric family.
    #[arg(long, default_value_t = -std::f64::consts::FRAC_1_SQRT_2, allow_hyphen_values = true)]
    pub v0: f64,
    /// a0 on the line AO′.
    #[arg(long, default_value_t = -0.7082, allow_hyphen_values = true)]
    pub a0: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanArgs {
    #[arg(long, default_value = "diagonal-t")]
    pub family: Family,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value = "l1")]
    pub kind: CoherenceKind,
    /// Maximize over local unitaries for every state.
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// A CSV or JSON file written by an earlier run.
    pub file: PathBuf,
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(flatten)]
    pub global: Global,
    pub budget: OptBudget,
    /// Grid size actually used, when the command has one.
    pub grid_used: Option<usize>,
    pub version: String,
}
