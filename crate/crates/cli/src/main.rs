//! `nbldpc`: generate non-binary LDPC codes, encode and decode on the binary
//! erasure channel, simulate failure rates, compute density-evolution
//! thresholds and measure the inefficiency of on-the-fly decoding.

mod commands;
mod config;
mod error;
mod provenance;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nbldpc::{DegreeSpec, GroupKind};

use crate::commands::Sink;
use crate::config::{Params, Rounding};
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "nbldpc", version, about = "Non-binary LDPC codes on the binary erasure channel")]
struct Cli {
    /// JSON file of parameters; flags take precedence over its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for trial- and grid-level parallelism.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Write the artifact to this file instead of stdout.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Report progress on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a code from an ensemble and write it in labeled-alist form.
    GenCode(GenCodeArgs),
    /// Encode a message (given or random) and optionally erase bits.
    Encode(EncodeArgs),
    /// Decode a channel file or an arrival stream.
    Decode(DecodeArgs),
    /// Monte-Carlo block failure rate over a grid of erasure probabilities.
    Simulate(SimulateArgs),
    /// Density-evolution threshold of an ensemble.
    Threshold(ThresholdArgs),
    /// Thresholds over the simplex of label distributions (three labels).
    ThresholdSurface(SurfaceArgs),
    /// Inefficiency of on-the-fly decoding next to the integrated failure curve.
    Inefficiency(InefficiencyArgs),
}

#[derive(Args, Default)]
struct EnsembleArgs {
    /// Extension degree: symbols live in GF(2^p).
    #[arg(long)]
    p: Option<u8>,
    /// Label group: `field` or `matrix`.
    #[arg(long)]
    group: Option<GroupKind>,
    /// Variable degree distribution, edge perspective, e.g. "0.5@2,0.5@5".
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Check degree distribution, e.g. "1.0@6".
    #[arg(long)]
    rho: Option<String>,
    /// Label pdf: "uniform" or "value:prob,..." (matrices as row-major bits).
    #[arg(long)]
    f: Option<String>,
}

impl EnsembleArgs {
    fn apply(&self, p: &mut Params) {
        p.p = self.p;
        p.group = self.group;
        p.lambda = self.lambda.clone().map(DegreeSpec::Text);
        p.rho = self.rho.clone().map(DegreeSpec::Text);
        p.f = self.f.clone();
    }
}

#[derive(Args, Default)]
struct DeArgs {
    /// Iteration budget per density-evolution run.
    #[arg(long)]
    max_de_iters: Option<usize>,
    /// Converged once the zero-subspace mass exceeds 1 - delta.
    #[arg(long)]
    convergence_delta: Option<f64>,
    /// Stop bisecting once the bracket is this narrow.
    #[arg(long)]
    bisection_tolerance: Option<f64>,
    /// Change of the zero-subspace mass, relative to what remains, treated as no change.
    #[arg(long)]
    stagnation_tolerance: Option<f64>,
    /// Consecutive unchanged iterations after which a run stops.
    #[arg(long)]
    stagnation_window: Option<usize>,
}

impl DeArgs {
    fn apply(&self, p: &mut Params) {
        p.max_de_iters = self.max_de_iters;
        p.convergence_delta = self.convergence_delta;
        p.bisection_tolerance = self.bisection_tolerance;
        p.stagnation_tolerance = self.stagnation_tolerance;
        p.stagnation_window = self.stagnation_window;
    }
}

#[derive(Args)]
struct GenCodeArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    /// Number of variable nodes.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// How node counts are obtained when N·(fraction) is not an integer.
    #[arg(long, value_enum)]
    rounding: Option<Rounding>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    /// File of K_bin message bits (0/1); random when absent.
    #[arg(long)]
    message: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Erase each bit with this probability.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    /// Channel file: one line of p characters from {0,1,x} per symbol.
    #[arg(long, conflicts_with = "stream")]
    channel: Option<PathBuf>,
    /// Arrival stream: lines `symbol_index bit_position bit_value`.
    #[arg(long)]
    stream: Option<PathBuf>,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: Option<PathBuf>,
    /// Number of equally spaced points covering [0, 1].
    #[arg(long, conflicts_with = "eps")]
    grid: Option<usize>,
    /// Explicit erasure probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Trials per grid point.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    de: DeArgs,
    /// Track orbit-class masses instead of the full distribution (uniform f only).
    #[arg(long)]
    reduce: bool,
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    de: DeArgs,
    /// Grid points per simplex edge.
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct InefficiencyArgs {
    /// Code file; otherwise a code is sampled from the ensemble flags.
    #[arg(long)]
    code: Option<PathBuf>,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    rounding: Option<Rounding>,
    #[arg(long)]
    seed: Option<u64>,
    /// Streaming trials for the inefficiency estimate.
    #[arg(long)]
    trials: Option<usize>,
    /// Points of the erasure-probability grid for the failure integral.
    #[arg(long)]
    grid: Option<usize>,
    /// Batch-decoding trials per grid point.
    #[arg(long)]
    grid_trials: Option<usize>,
    /// Also write the per-trial inefficiencies as CSV.
    #[arg(long, value_name = "FILE")]
    mu_csv: Option<PathBuf>,
}

fn flag_params(command: &Command) -> Params {
    let mut p = Params::default();
    match command {
        Command::GenCode(a) => {
            a.ensemble.apply(&mut p);
            p.n = a.n;
            p.seed = a.seed;
            p.rounding = a.rounding;
        }
        Command::Encode(a) => {
            p.code = a.code.clone();
            p.message = a.message.clone();
            p.seed = a.seed;
            p.epsilon = a.epsilon;
        }
        Command::Decode(a) => {
            p.code = a.code.clone();
            p.channel = a.channel.clone();
            p.stream = a.stream.clone();
            p.max_iters = a.max_iters;
        }
        Command::Simulate(a) => {
            p.code = a.code.clone();
            p.grid = a.grid;
            p.eps = a.eps.clone();
            p.trials = a.trials;
            p.seed = a.seed;
        }
        Command::Threshold(a) => {
            a.ensemble.apply(&mut p);
            a.de.apply(&mut p);
            p.reduce = a.reduce.then_some(true);
        }
        Command::ThresholdSurface(a) => {
            a.ensemble.apply(&mut p);
            a.de.apply(&mut p);
            p.resolution = a.resolution;
        }
        Command::Inefficiency(a) => {
            a.ensemble.apply(&mut p);
            p.code = a.code.clone();
            p.n = a.n;
            p.rounding = a.rounding;
            p.seed = a.seed;
            p.trials = a.trials;
            p.grid = a.grid;
            p.grid_trials = a.grid_trials;
        }
    }
    p
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let file = match &cli.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    let params = file.overlay(flag_params(&cli.command));
    let sink = Sink { output: cli.output.clone(), verbose: cli.verbose };
    match &cli.command {
        Command::GenCode(_) => commands::gen_code(params, &sink),
        Command::Encode(_) => commands::encode(params, &sink),
        Command::Decode(_) => commands::decode_cmd(params, &sink),
        Command::Simulate(_) => commands::simulate_cmd(params, &sink),
        Command::Threshold(_) => commands::threshold_cmd(params, &sink),
        Command::ThresholdSurface(_) => commands::threshold_surface_cmd(params, &sink),
        Command::Inefficiency(a) => commands::inefficiency_cmd(params, &sink, a.mu_csv.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
