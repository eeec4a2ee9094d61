//! `tracker` - replicate a broad equity index with a small exemplar
//! portfolio selected on a correlation market graph.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tracker_cli::commands::{
    cmd_backtest, cmd_graph, cmd_ingest, cmd_pipeline, cmd_plot_data, cmd_solve, BacktestArgs,
    SolveArgs,
};
use tracker_cli::config::{Overrides, RunConfig};
use tracker_cli::CliError;
use tracker_core::{MissingPolicy, Weighting};

#[derive(Parser)]
#[command(
    name = "tracker",
    version,
    about = "Index tracking with a market-graph k-medoid portfolio",
    propagate_version = true
)]
struct Cli {
    /// TOML run configuration; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Only log errors
    #[arg(long, global = true, conflicts_with = "verbose")]
    quiet: bool,
    /// Log debug detail
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct OverrideArgs {
    /// Price CSV (`date,ticker,close` or `date,<tickers...>`)
    #[arg(long)]
    prices: Option<PathBuf>,
    /// Evaluation years, comma-separated (each fits on the prior year)
    #[arg(long, value_delimiter = ',')]
    years: Option<Vec<i32>>,
    /// Number of exemplars in the tracking portfolio
    #[arg(long)]
    k: Option<usize>,
    /// Missing-quote policy: drop-asset, forward-fill or drop-date
    #[arg(long, value_parser = parse_missing_policy)]
    missing_policy: Option<MissingPolicy>,
    /// Exemplar weighting: equal or cluster-size
    #[arg(long, value_parser = parse_weighting)]
    weighting: Option<Weighting>,
    /// Annealer sweeps per restart
    #[arg(long)]
    sweeps: Option<usize>,
    /// Independent annealer restarts
    #[arg(long)]
    restarts: Option<usize>,
    /// Top-level seed; all randomness derives from it
    #[arg(long)]
    seed: Option<u64>,
    /// Starting temperature (default: calibrated per problem)
    #[arg(long)]
    t_initial: Option<f64>,
    /// Final temperature (default: 1e-3 of the starting temperature)
    #[arg(long)]
    t_final: Option<f64>,
    /// Keep infeasible selections instead of repairing to cardinality k
    #[arg(long)]
    no_repair: bool,
    /// Explicit index return CSV (`date,return`)
    #[arg(long)]
    index_csv: Option<PathBuf>,
    /// Output directory (default: $TRACKER_OUTPUT_DIR, then ./out)
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

fn parse_missing_policy(s: &str) -> Result<MissingPolicy, String> {
    s.parse().map_err(|e: tracker_core::Error| e.to_string())
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    s.parse().map_err(|e: tracker_core::Error| e.to_string())
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            prices: a.prices.clone(),
            years: a.years.clone(),
            k: a.k,
            missing_policy: a.missing_policy,
            weighting: a.weighting,
            sweeps: a.sweeps,
            restarts: a.restarts,
            seed: a.seed,
            t_initial: a.t_initial,
            t_final: a.t_final,
            no_repair: a.no_repair,
            index_csv: a.index_csv.clone(),
            output_dir: a.output_dir.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Load prices, apply the missing-data policy, write returns.csv
    Ingest {
        #[command(flatten)]
        over: OverrideArgs,
    },
    /// Write per-year correlation, distance and dissimilarity matrices
    Graph {
        #[command(flatten)]
        over: OverrideArgs,
    },
    /// Anneal the k-medoid QUBO over dissimilarity CSVs, write exemplars
    Solve {
        #[command(flatten)]
        over: OverrideArgs,
        /// Solve this dissimilarity CSV instead of per-year files
        #[arg(long)]
        delta: Option<PathBuf>,
        /// Also dump each problem in the sparse `i j value` triplet format
        #[arg(long)]
        export_qubo: bool,
    },
    /// Evaluate exemplar portfolios, write the report and daily series
    Backtest {
        #[command(flatten)]
        over: OverrideArgs,
        /// Exemplar CSV to evaluate (needs exactly one configured year)
        #[arg(long)]
        exemplars: Option<PathBuf>,
    },
    /// Run ingest, graph, solve and backtest end to end
    Pipeline {
        #[command(flatten)]
        over: OverrideArgs,
    },
    /// Write only the per-year date,r_index,r_port,diff series
    PlotData {
        #[command(flatten)]
        over: OverrideArgs,
    },
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (over, needs_prices) = match &cli.command {
        Command::Ingest { over }
        | Command::Graph { over }
        | Command::Backtest { over, .. }
        | Command::Pipeline { over }
        | Command::PlotData { over } => (Overrides::from(over), true),
        Command::Solve { over, delta, .. } => (Overrides::from(over), delta.is_none()),
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &over)?;
    if needs_prices {
        cfg.validate()?;
    } else if cfg.k < 1 {
        return Err(CliError::Invalid("k must be at least 1".into()));
    }

    match &cli.command {
        Command::Ingest { .. } => cmd_ingest(&cfg),
        Command::Graph { .. } => cmd_graph(&cfg),
        Command::Solve {
            delta, export_qubo, ..
        } => cmd_solve(
            &cfg,
            &SolveArgs {
                delta: delta.clone(),
                export_qubo: *export_qubo,
            },
        ),
        Command::Backtest { exemplars, .. } => cmd_backtest(
            &cfg,
            &BacktestArgs {
                exemplars: exemplars.clone(),
            },
        ),
        Command::Pipeline { .. } => cmd_pipeline(&cfg),
        Command::PlotData { .. } => cmd_plot_data(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap formats usage errors itself; keep exit code 1 for the
            // validation class (help/version exit 0).
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let level = if cli.quiet {
        log::LevelFilter::Error
    } else if cli.verbose {
        log::LevelFilter::Debug
    } else {
        log::LevelFilter::Info
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
