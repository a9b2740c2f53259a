//! `schnorr-vqe`: factor a semiprime with the lattice/VQE pipeline, or
//! generate fixtures for external cross-checking.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use schnorr_vqe::fixture::{export_fixture, parse_ratio, Fixture};
use schnorr_vqe::pipeline::{
    emit_fixtures, random_fixture, run_pipeline, ReductionSource, RunConfig, SelectionMode, Solver,
};
use schnorr_vqe::primes_lattice::FactoringInstance;
use schnorr_vqe::vqe::VqeConfig;

const EXIT_NOT_FACTORED: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "schnorr-vqe",
    version,
    about,
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write random self-contained lattice fixtures.
    GenFixtures(GenArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50)]
    count: u64,
    /// Largest lattice dimension drawn.
    #[arg(long, default_value_t = 5)]
    max_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
enum ReductionArg {
    Internal,
    Fixture(PathBuf),
}

impl FromStr for ReductionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "internal" => Ok(ReductionArg::Internal),
            Some(("fixture", path)) if !path.is_empty() => Ok(ReductionArg::Fixture(path.into())),
            _ => Err(format!("expected `internal` or `fixture:PATH`, got {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverArg {
    Vqe,
    Exact,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SelectionArg {
    Argmax,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Odd composite to factor.
    #[arg(long = "N")]
    modulus: Option<BigUint>,
    /// Dimension multiplier (1 or 2).
    #[arg(long, default_value_t = 1)]
    l: u32,
    /// Precision parameter of the rounded-log row.
    #[arg(long, default_value_t = 1.5)]
    c: f64,
    /// Number of primes in the smoothness base.
    #[arg(long, default_value_t = 15)]
    smooth_bound: usize,
    /// Master seed for diagonals and optimizer restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Round-0 diagonal as a comma list, e.g. `1,1,2`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    diagonal: Option<Vec<i64>>,
    /// Lovász parameter as `a/b`.
    #[arg(long, default_value = "3/4", value_parser = parse_delta)]
    delta: BigRational,
    /// `internal` or `fixture:PATH`.
    #[arg(long, default_value = "internal")]
    reduction: ReductionArg,
    /// Bitstring source: simulated VQE or exhaustive minimum.
    #[arg(long, value_enum, default_value_t = SolverArg::Vqe)]
    solver: SolverArg,
    /// Ansatz layers.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Optimizer iterations per restart.
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// Independent optimizer starts.
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    /// Sample the final state with this many shots.
    #[arg(long)]
    shots: Option<u64>,
    /// Maximum rounds, each with a fresh diagonal.
    #[arg(long, default_value_t = 1)]
    rounds: usize,
    /// Use only the chosen bitstring or all of them.
    #[arg(long, value_enum, default_value_t = SelectionArg::Argmax)]
    selection: SelectionArg,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    budget: Option<f64>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Include per-stage timings in JSON output.
    #[arg(long)]
    timings: bool,
    /// Write one fixture per round into this directory.
    #[arg(long)]
    emit_fixtures: Option<PathBuf>,
}

fn parse_delta(s: &str) -> Result<BigRational, String> {
    parse_ratio(s).map_err(|e| e.to_string())
}

fn run_config(args: &RunArgs) -> Result<RunConfig, String> {
    let modulus = args.modulus.clone().ok_or("--N is required")?;
    let mut instance = FactoringInstance::new(modulus, args.l, args.c, args.smooth_bound);
    instance.seed = args.seed;
    instance.diagonal_override = args.diagonal.clone();
    let reduction = match &args.reduction {
        ReductionArg::Internal => ReductionSource::Internal,
        ReductionArg::Fixture(path) => ReductionSource::Fixture(Box::new(
            Fixture::read(path).map_err(|e| format!("{}: {e}", path.display()))?,
        )),
    };
    let solver = match args.solver {
        SolverArg::Exact => Solver::Exact,
        SolverArg::Vqe => Solver::Vqe(VqeConfig {
            depth: args.depth,
            max_iterations: args.iters,
            restarts: args.restarts,
            shots: args.shots,
            ..VqeConfig::default()
        }),
    };
    let budget = match args.budget {
        Some(s) if s.is_finite() && s >= 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(format!("invalid budget {s}")),
        None => None,
    };
    Ok(RunConfig {
        instance,
        delta: args.delta.clone(),
        reduction,
        solver,
        max_rounds: args.rounds,
        selection: match args.selection {
            SelectionArg::Argmax => SelectionMode::Argmax,
            SelectionArg::All => SelectionMode::Exhaustive,
        },
        budget,
    })
}

fn run(args: &RunArgs) -> Result<ExitCode, String> {
    let config = run_config(args)?;
    let report = run_pipeline(&config).map_err(|e| e.to_string())?;
    if let Some((p, q)) = &report.factors {
        if p * q != config.instance.modulus {
            return Err(format!("reported factors {p} × {q} do not multiply to N"));
        }
    }
    if let Some(dir) = &args.emit_fixtures {
        emit_fixtures(&config, &report, dir).map_err(|e| e.to_string())?;
    }
    match args.format {
        Format::Table => print!("{}", report.to_table()),
        Format::Json => print!(
            "{}",
            report.to_json(args.timings).map_err(|e| e.to_string())?
        ),
    }
    Ok(if report.is_factored() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_FACTORED)
    })
}

fn gen_fixtures(args: &GenArgs) -> Result<ExitCode, String> {
    for i in 0..args.count {
        let fx = random_fixture(args.seed, i, args.max_dim).map_err(|e| e.to_string())?;
        export_fixture(&args.out, &format!("random-{i:03}"), &fx).map_err(|e| e.to_string())?;
    }
    println!("wrote {} fixtures to {}", args.count, args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Some(Command::GenFixtures(args)) => gen_fixtures(args),
        None => run(&cli.run),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
