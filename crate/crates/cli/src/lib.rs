//! Command-line front end of `weqlab`.
//!
//! Every command resolves a [`RunConfig`] (defaults, then `--config`, then
//! flags), validates it, runs on a dedicated rayon pool and writes a JSON
//! envelope `{tool, version, config, status, notes, result}`. CSV is a
//! projection written on request. Exit codes: 0 success, 1 runtime failure
//! or budget exhaustion (partial results are still written and flagged),
//! 2 invalid configuration.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use weqlab_core::wstat::SampleStrategy;
use weqlab_core::{Error, Q};

mod commands;
pub mod config;
mod output;

pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "weqlab", version, about = "Finite experiments on weak equivalence of group actions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON is always written; `csv` and `both` add the CSV projection.
    #[arg(long, value_enum, global = true, default_value = "json")]
    pub format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// RunConfig JSON; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// JSON output path (default `<command>.json`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV output path; implies CSV output.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Suppress the summary table.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate SL_d(Z/nZ).
    #[command(subcommand)]
    Group(GroupCommand),
    /// Generation, Cheeger constant and spectral gap per modulus.
    Expansion(ExpansionArgs),
    /// Convolution mixing inequalities.
    Mixing(MixingArgs),
    /// W-vectors and W-sets of a finite action.
    Wstat(WstatArgs),
    /// Step-function experiments on G_n × G_m.
    #[command(subcommand)]
    Steplab(SteplabCommand),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    #[arg(long, visible_alias = "dims")]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub enumeration_budget: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum GroupCommand {
    /// Order and identity of SL_d(Z/nZ); `--elements` lists every matrix.
    Info {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        elements: bool,
    },
    /// Chinese remainder decomposition over the prime powers of n.
    Crt {
        #[command(flatten)]
        group: GroupArgs,
    },
}

#[derive(Debug, Args)]
pub struct ExpansionArgs {
    #[arg(long, visible_alias = "dims")]
    pub d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub moduli: Option<Vec<u32>>,
    /// `sanov` or matrices such as `1,2;0,1|1,0;2,1`.
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long)]
    pub enumeration_budget: Option<usize>,
    /// Local-search moves for the Cheeger upper bound on large groups.
    #[arg(long)]
    pub cheeger_budget: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MixingArgs {
    #[arg(long, visible_alias = "dims")]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Second modulus of the triple check (default n).
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Power-iteration rounds of the adversarial ratio.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub enumeration_budget: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WstatArgs {
    /// `a<n>` (translation action of G_n), a toy name such as `cycle4`,
    /// or a path to an action JSON file.
    #[arg(long)]
    pub action: Option<String>,
    /// Second factor; the W-set is then taken on the product action.
    #[arg(long)]
    pub product: Option<String>,
    #[arg(long, visible_alias = "dims")]
    pub d: Option<usize>,
    #[arg(long)]
    pub gens: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Require full enumeration of k^X.
    #[arg(long)]
    pub exhaustive: bool,
    /// Comma-separated symbol names (default: all).
    #[arg(long, value_delimiter = ',')]
    pub symbols: Option<Vec<String>>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub sample_size: Option<usize>,
    /// Maximum number of labellings enumerated.
    #[arg(long)]
    pub budget: Option<u64>,
    /// With `--product`: estimate the step-function ε-net index.
    #[arg(long, value_parser = config::parse_rational)]
    pub epsilon: Option<Q>,
    #[arg(long)]
    pub max_n: Option<usize>,
    #[arg(long)]
    pub enumeration_budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    Random,
    LocalSearch,
}

impl From<StrategyArg> for SampleStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Exhaustive => SampleStrategy::Exhaustive,
            StrategyArg::Random => SampleStrategy::Random,
            StrategyArg::LocalSearch => SampleStrategy::LocalSearch,
        }
    }
}

#[derive(Debug, Args)]
pub struct StepArgs {
    /// Step complexity N.
    #[arg(long = "step-N", visible_alias = "step-n")]
    pub step_n: Option<usize>,
    #[arg(long)]
    pub gens: Option<String>,
    /// Restarts of the local search.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Moves per restart.
    #[arg(long)]
    pub moves: Option<usize>,
    /// Largest search space enumerated exhaustively.
    #[arg(long)]
    pub step_budget: Option<u64>,
    #[arg(long)]
    pub enumeration_budget: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum SteplabCommand {
    /// One row per prime p: the (p, p) experiment.
    Report {
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[command(flatten)]
        step: StepArgs,
        /// Expansion constant for δ (default: the measured Cheeger value).
        #[arg(long, value_parser = config::parse_rational)]
        epsilon: Option<Q>,
        #[arg(long)]
        cheeger_budget: Option<usize>,
    },
    /// Best N-step approximation of u on G_n × G_m.
    Search {
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        step: StepArgs,
    },
    /// Size and status of the step-complexity bound per prime.
    Claim3 {
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u32>>,
        #[arg(long = "step-N", visible_alias = "step-n")]
        step_n: Option<usize>,
    },
}

/// Why a run stopped.
#[derive(Debug)]
pub enum Failure {
    /// Configuration or precondition violation (exit 2).
    Invalid(String),
    /// Budget exhaustion or another runtime error (exit 1).
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid configuration: {m}"),
            Failure::Runtime(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. }
            | Error::ThresholdExceeded { .. }
            | Error::NotConverged { .. }
            | Error::EmptySample => Failure::Runtime(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("weqlab: {f}");
            f.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config::set(&mut cfg.seed, cli.global.seed);
    commands::apply_flags(&cli.command, &mut cfg);
    cfg.validate()?;

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.global.threads {
        if t == 0 {
            return Err(Failure::Invalid("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| commands::dispatch(&cli.command, &cfg, &cli.global))
}
