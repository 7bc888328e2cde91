use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "plmu", version, about = "Probabilistic modal mu-calculus toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on every state of a model.
    Eval(EvalArgs),
    /// Dump the game arena of a formula and a model.
    Arena(ArenaArgs),
    /// Estimate game values by simulating greedy strategies.
    Simulate(SimulateArgs),
    /// Compare denotational values with simulated game values.
    Equiv(EquivArgs),
    /// Play a game interactively against the greedy engine.
    Play(PlayArgs),
    /// Generate a random model and formula.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Kv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Side {
    P1,
    P2,
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Model file, then formula text (alternatives to --model/--formula).
    #[arg(value_name = "MODEL [FORMULA]", num_args = 0..=2)]
    pub positional: Vec<String>,
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,
    #[arg(long, value_name = "STR", conflicts_with = "formula_file")]
    pub formula: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub formula_file: Option<PathBuf>,
    /// Interpretation of free variables (`env X p 0.5` lines).
    #[arg(long, value_name = "PATH")]
    pub env: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FixpointArgs {
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iters: usize,
    /// Solve threshold-shaped binders by plain iteration.
    #[arg(long)]
    pub no_exact_thresholds: bool,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, default_value_t = 200_000)]
    pub nodes: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub fix: FixpointArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ArenaArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub fix: FixpointArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Start state (default: every state).
    #[arg(long)]
    pub state: Option<String>,
    /// Also probe this many seeded adversaries against greedy Player 1.
    #[arg(long, default_value_t = 0)]
    pub adversaries: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EquivArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub fix: FixpointArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, default_value_t = 0.05)]
    pub slack: f64,
    /// Run a batch of this many seeded random instances instead of the
    /// given model and formula.
    #[arg(long, value_name = "N")]
    pub random: Option<usize>,
    /// Minimum number of passing instances for a batch (default: 90%).
    #[arg(long)]
    pub min_pass: Option<usize>,
    /// Test hook: shift every denotational value by this amount.
    #[arg(long, hide = true, allow_negative_numbers = true)]
    pub inject_mismatch: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[command(flatten)]
    pub fix: FixpointArgs,
    #[arg(long)]
    pub state: Option<String>,
    /// The side played from standard input; the engine plays the other.
    #[arg(long = "as", value_enum, default_value_t = Side::P1)]
    pub side: Side,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub states: usize,
    #[arg(long, default_value_t = 2)]
    pub labels: usize,
    /// Maximum nesting depth of the generated formula.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    #[arg(long, value_name = "PATH")]
    pub model_out: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub formula_out: Option<PathBuf>,
}
