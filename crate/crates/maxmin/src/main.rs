//! `cellfree-maxmin`: seeded Monte Carlo campaigns from the command line.
//!
//! Exit codes: 0 on success, 2 for configuration problems (bad flags,
//! unusable scenario files, invalid grids), 3 for numerical failures in
//! oracle mode, 1 for anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cellfree_core::error::Error;
use cellfree_core::SchemeId;
use cellfree_maxmin::campaign::{run_campaign, CampaignSpec};
use cellfree_maxmin::output::write_outcome;
use cellfree_maxmin::scenario::Scenario;
use cellfree_maxmin::setups::SetupId;

#[derive(Parser)]
#[command(
    name = "cellfree-maxmin",
    version,
    about = "Max-min SINR power control and AP clustering campaigns for cell-free massive MIMO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a campaign and write trials.csv and summary.json.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Network setup: I, II, III, or custom (grid via --scenario).
    #[arg(long, default_value = "II")]
    setup: String,

    /// Clustering schemes to run (comma-separated: fixed, add, exhaustive).
    #[arg(long = "scheme", value_delimiter = ',', default_values = ["fixed", "add", "exhaustive"])]
    schemes: Vec<String>,

    /// Candidate-set sizes (comma-separated). Defaults to the setup's size.
    #[arg(long = "candidate-size", value_delimiter = ',')]
    candidate_sizes: Vec<usize>,

    /// Number of users dropped per trial.
    #[arg(long)]
    users: Option<usize>,

    /// Number of Monte Carlo trials.
    #[arg(long, default_value_t = 200)]
    trials: u64,

    /// Per-user transmit power cap in dBm.
    #[arg(long = "pmax-dbm", default_value_t = 20.0)]
    pmax_dbm: f64,

    /// Relative convergence threshold of the fixed-point iteration.
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,

    /// Iteration cap of the fixed-point iteration.
    #[arg(long = "max-iter", default_value_t = 10_000)]
    max_iter: usize,

    /// Campaign seed; trials derive their generators from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Cross-check each in-budget instance against the spectral oracle.
    #[arg(long)]
    oracle: bool,

    /// Association-enumeration budget for the oracle.
    #[arg(long = "oracle-budget", default_value_t = 1_000_000)]
    oracle_budget: u64,

    /// Lift the soft cap of 5 candidates for the exhaustive scheme.
    #[arg(long = "no-exhaustive-cap")]
    no_exhaustive_cap: bool,

    /// TOML file overriding network fields (see README for keys).
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Output directory for trials.csv and summary.json.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn build_spec(args: &RunArgs) -> Result<CampaignSpec, Error> {
    let setup = SetupId::from_name(&args.setup)?;
    if setup == SetupId::Custom && args.scenario.is_none() {
        return Err(Error::Config(
            "custom setup requires --scenario with the grid fields".into(),
        ));
    }

    let mut network = setup.network(58);
    if let Some(path) = &args.scenario {
        Scenario::load(path)?.apply(&mut network);
    }
    if let Some(users) = args.users {
        network.num_users = users;
    }
    network.rng_seed = args.seed;

    let schemes = args
        .schemes
        .iter()
        .map(|name| SchemeId::from_name(name))
        .collect::<Result<Vec<_>, _>>()?;

    let candidate_sizes = if args.candidate_sizes.is_empty() {
        match setup.params() {
            Some(params) => vec![params.candidate_size],
            None => {
                return Err(Error::Config(
                    "custom setup requires --candidate-size".into(),
                ))
            }
        }
    } else {
        args.candidate_sizes.clone()
    };

    Ok(CampaignSpec {
        setup,
        network,
        schemes,
        candidate_sizes,
        num_trials: args.trials,
        p_max_dbm: args.pmax_dbm,
        epsilon: args.epsilon,
        max_iterations: args.max_iter,
        oracle_check: args.oracle,
        oracle_budget: args.oracle_budget,
        allow_uncapped_exhaustive: args.no_exhaustive_cap,
    })
}

fn execute(args: &RunArgs) -> Result<(), Error> {
    let spec = build_spec(args)?;
    let outcome = run_campaign(&spec)?;
    let (trials_path, summary_path) = write_outcome(&args.out, &outcome)?;
    println!(
        "wrote {} and {} ({} records, {} converged, {:.1} s)",
        trials_path.display(),
        summary_path.display(),
        outcome.summary.total_records,
        outcome.summary.converged_records,
        outcome.summary.wall_time_seconds,
    );
    Ok(())
}

fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Config(_) | Error::BudgetExceeded { .. } => 2,
        Error::Numerical(_) | Error::IterationCap { .. } | Error::DegenerateChannel { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match execute(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(error) => {
                eprintln!("error: {error}");
                ExitCode::from(exit_code(&error))
            }
        },
    }
}
