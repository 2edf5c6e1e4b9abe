use bulsol_core::shape::uniform_grid;
use bulsol_core::Proportion;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "bulsol", version, about = "Simulate and analyse p-random q-proportion Bulgarian solitaire")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play the random game and compare the rescaled diagram with a limit shape.
    Simulate(SimulateArgs),
    /// Solve for the stationary distribution on all partitions of n.
    Exact(ExactArgs),
    /// Run the coupled pile processes and the Chernoff bound.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Compare exponential and triangular fits over a list of parameter points.
    Regimes(RegimesArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of cards.
    #[arg(long)]
    pub n: u64,
    /// Probability that a candidate card is picked.
    #[arg(long)]
    pub p: f64,
    /// Candidate proportion as "num/den".
    #[arg(long, default_value = "1/1")]
    pub q: Proportion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Exp,
    Triangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    /// a = 1/(pq).
    Theoretical,
    /// a = n/λ₁.
    FirstPart,
}

/// `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        uniform_grid(self.start, self.stop, self.step).expect("validated on parse")
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err("grid must be start:stop:step".into());
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let g = GridSpec { start: num(parts[0])?, stop: num(parts[1])?, step: num(parts[2])? };
        if g.step.is_nan() || g.step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        if !(g.start >= 0.0 && g.stop >= g.start) {
            return Err("grid needs 0 <= start <= stop".into());
        }
        Ok(g)
    }
}

/// `a,b` with `0 <= a <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval(pub f64, pub f64);

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or("interval must be a,b")?;
        let a: f64 = a.trim().parse().map_err(|e| format!("bad interval start: {e}"))?;
        let b: f64 = b.trim().parse().map_err(|e| format!("bad interval end: {e}"))?;
        if !(a >= 0.0 && a <= b) {
            return Err("interval needs 0 <= a <= b".into());
        }
        Ok(Interval(a, b))
    }
}

/// Burn-in length: a move count or `schedule` for the schedule's `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurnIn {
    Moves(u64),
    Schedule,
}

impl FromStr for BurnIn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "schedule" {
            return Ok(BurnIn::Schedule);
        }
        s.parse().map(BurnIn::Moves).map_err(|_| "burn-in must be a move count or \"schedule\"".into())
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Recorded moves after burn-in.
    #[arg(long, default_value_t = 200)]
    pub moves: u64,
    #[arg(long, default_value = "0")]
    pub burn_in: BurnIn,
    /// "triangular", "single", or explicit piles such as "3+2+1".
    #[arg(long, default_value = "triangular")]
    pub start: String,
    #[arg(long, value_enum, default_value_t = ShapeArg::Exp)]
    pub shape: ShapeArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Theoretical)]
    pub scaling: ScalingArg,
    #[arg(long, default_value = "0:3:0.01")]
    pub grid: GridSpec,
    #[arg(long, default_value = "0,3")]
    pub interval: Interval,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Master seed; chain j uses stream j.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of independent chains.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    /// Moves between snapshots (default: automatic thinning).
    #[arg(long)]
    pub stride: Option<u64>,
    /// Measure the composition in creation order instead of sorted.
    #[arg(long)]
    pub unsorted: bool,
    /// Boundary CSV of the first chain (stdout when omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Per-move pile count and new-pile size of the first chain.
    #[arg(long)]
    pub traces: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Largest n accepted.
    #[arg(long, default_value_t = bulsol_core::exact::DEFAULT_STATE_CAP)]
    pub max_n: u64,
    /// Stationary distribution CSV (stdout when omitted).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Stationary mass within eps of the shape at each grid point.
    #[arg(long)]
    pub mass_csv: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Exp)]
    pub shape: ShapeArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::FirstPart)]
    pub scaling: ScalingArg,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value = "0:3:0.1")]
    pub grid: GridSpec,
    /// Also sample the chain and report the total-variation distance.
    #[arg(long)]
    pub compare_mc: bool,
    #[arg(long, default_value_t = 2_000_000)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Check that the threshold process brackets the q-process.
    Domination(DominationArgs),
    /// Tabulate the Chernoff bound against exact binomial tails.
    Chernoff(ChernoffArgs),
    /// Trace a union of threshold chunks against exponential decay.
    Union(UnionArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DominationArgs {
    /// Enumerate every Bernoulli matrix instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 8)]
    pub max_a1: u64,
    #[arg(long, default_value_t = 4)]
    pub max_r: u64,
    /// Values used for both s and q in the exhaustive grid.
    #[arg(long, value_delimiter = ',', default_value = "1/4,1/2,3/4,1/1")]
    pub values: Vec<Proportion>,
    #[arg(long, default_value_t = 100)]
    pub a1: u64,
    #[arg(long, default_value_t = 10)]
    pub r: u64,
    #[arg(long, default_value_t = 0.1)]
    pub p: f64,
    #[arg(long, default_value = "1/2")]
    pub q: Proportion,
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    /// Sampled matrices.
    #[arg(long, default_value_t = 10_000)]
    pub runs: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ChernoffArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub p: f64,
    /// γ runs over μ·j/steps for j = 1..steps.
    #[arg(long, default_value_t = 20)]
    pub steps: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct UnionArgs {
    #[arg(long)]
    pub a1: u64,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value = "1/1")]
    pub q: Proportion,
    /// Card total used for the schedule (defaults to a1).
    #[arg(long)]
    pub n: Option<u64>,
    /// Moves per chunk (defaults to the schedule's r).
    #[arg(long)]
    pub r: Option<u64>,
    /// Threshold (defaults to the schedule's s, clamped into [0, 1]).
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub chunks: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RegimesArgs {
    /// JSON list of {"n": .., "p": .., "q": "num/den"} points.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200_000)]
    pub max_moves: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
