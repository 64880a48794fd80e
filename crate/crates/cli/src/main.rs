use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsched_cli::commands::{self, Common, CounterexamplePolicy};
use qsched_cli::{threads_from_env, CliError};

/// Multi-server queueing simulator with learning-based MaxWeight scheduling.
#[derive(Parser)]
#[command(name = "qsched", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Root seed; overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of runs; overrides `experiment.runs`.
    #[arg(long)]
    runs: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CounterPolicy {
    EmpiricalMean,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Run one policy and write its mean total-queue time series.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        policy: String,
    },
    /// Run several policies on the same seeds and write a summary.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated policy names; defaults to every configured policy.
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<String>>,
    },
    /// Empirical tail of ||Q(t)||_2 across runs with a log-linear fit.
    Tail {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        policy: String,
        /// Slot at which the norm was recorded (must be in `tail_slots`).
        #[arg(long)]
        t: u64,
        /// Comma-separated thresholds; defaults to 20 points between the
        /// 50th and 99th percentile.
        #[arg(long)]
        xs: Option<String>,
    },
    /// Maximum traffic slackness of a stationary system.
    Slackness {
        /// Arrival rates, e.g. `0.3,0.3`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Service rates, rows separated by `;`, e.g. `0.5,0.5;0.5,0.5`.
        #[arg(long)]
        mu: String,
        /// Also write the allocation to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Two-server lock-in example for the empirical-mean scheduler.
    Counterexample {
        #[arg(long, default_value_t = 20_000)]
        horizon: u64,
        /// Script the first own-server service time of each type to 100.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        forced: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "empirical-mean")]
        policy: CounterPolicy,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn common(args: CommonArgs) -> Result<Common, CliError> {
    Ok(Common {
        config: args.config,
        seed: args.seed,
        runs: args.runs,
        out: args.out,
        threads: threads_from_env()?,
    })
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run { common: c, policy } => commands::cmd_run(&common(c)?, &policy, &mut stdout),
        Command::Compare { common: c, policies } => {
            commands::cmd_compare(&common(c)?, policies.as_deref(), &mut stdout)
        }
        Command::Tail {
            common: c,
            policy,
            t,
            xs,
        } => {
            let xs = xs.as_deref().map(commands::parse_list::<f64>).transpose()?;
            commands::cmd_tail(&common(c)?, &policy, t, xs.as_deref(), &mut stdout)
        }
        Command::Slackness { lambda, mu, csv } => commands::cmd_slackness(
            &commands::parse_list(&lambda)?,
            &commands::parse_matrix(&mu)?,
            csv.as_deref(),
            &mut stdout,
        ),
        Command::Counterexample {
            horizon,
            forced,
            seed,
            policy,
            out,
        } => {
            let policy = match policy {
                CounterPolicy::EmpiricalMean => CounterexamplePolicy::EmpiricalMean,
                CounterPolicy::Oracle => CounterexamplePolicy::Oracle,
            };
            threads_from_env()?;
            commands::cmd_counterexample(horizon, forced, seed, policy, &out, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
