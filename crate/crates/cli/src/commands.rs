//! The six subcommands.
//!
//! `pipeline` runs everything in memory. The stage commands (`ingest`,
//! `graph`, `solve`, `backtest`, `plot-data`) expose the same computation
//! step by step through files in the output directory, and compose: `graph`
//! then `solve` then `backtest` reproduces `pipeline`'s outputs for the
//! same config and seed.

use std::path::PathBuf;

use chrono::NaiveDate;
use log::info;
use serde::Serialize;
use tracker_core::{
    backtest, build_kmedoid_qubo, build_market_graph, compute_log_returns, derive_stream_seed,
    load_prices, run_year, slice_year, solve_anneal, BacktestParams, Error, IndexSeries,
    ReturnsPanel, TrackingReport, YearOutcome,
};

use crate::config::RunConfig;
use crate::io::{
    read_exemplars_csv, read_matrix_csv, write_exemplars_csv, write_matrix_csv, write_report_csv,
    write_returns_csv, write_series_csv, OutputGuard,
};
use crate::CliError;

/// Extra arguments of the `solve` subcommand.
#[derive(Debug, Default)]
pub struct SolveArgs {
    /// Solve one explicit dissimilarity CSV instead of per-year files.
    pub delta: Option<PathBuf>,
    /// Also dump each problem in the sparse triplet format.
    pub export_qubo: bool,
}

/// Extra arguments of the `backtest` subcommand.
#[derive(Debug, Default)]
pub struct BacktestArgs {
    /// Explicit exemplar CSV; requires a single configured year.
    pub exemplars: Option<PathBuf>,
}

fn load_returns(cfg: &RunConfig) -> Result<ReturnsPanel, CliError> {
    let path = cfg.prices_path()?;
    let prices = load_prices(path)?;
    info!(
        "loaded {} assets x {} dates from {}",
        prices.n_assets(),
        prices.n_dates(),
        path.display()
    );
    let panel = compute_log_returns(&prices, cfg.missing_policy)?;
    info!(
        "returns panel: {} assets x {} dates ({} policy)",
        panel.n_assets(),
        panel.n_dates(),
        cfg.missing_policy.as_str()
    );
    Ok(panel)
}

fn backtest_params(cfg: &RunConfig) -> Result<BacktestParams, CliError> {
    let index = match &cfg.index_csv {
        Some(path) => Some(IndexSeries::from_path(path)?),
        None => None,
    };
    Ok(BacktestParams {
        k: cfg.k,
        weighting: cfg.weighting,
        solver: cfg.solver.clone(),
        index,
    })
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output_dir).map_err(|e| {
        CliError::Invalid(format!(
            "cannot create output dir {}: {e}",
            cfg.output_dir.display()
        ))
    })
}

fn out_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

fn fit_slice(panel: &ReturnsPanel, year: i32) -> Result<ReturnsPanel, Error> {
    slice_year(panel, year - 1).map_err(|e| match e {
        Error::NoDataForYear(_) => Error::InsufficientHistory(format!(
            "evaluation year {year} needs returns for {}",
            year - 1
        )),
        other => other,
    })
}

/// `ingest`: load prices, apply the policy, write `returns.csv`.
pub fn cmd_ingest(cfg: &RunConfig) -> Result<(), CliError> {
    let panel = load_returns(cfg)?;
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();
    let path = out_path(cfg, "returns.csv");
    write_returns_csv(&path, &panel)?;
    guard.track(&path);
    info!("wrote {}", path.display());
    guard.finish();
    Ok(())
}

/// `graph`: per evaluation year, write the fit-window correlation,
/// distance and dissimilarity matrices.
pub fn cmd_graph(cfg: &RunConfig) -> Result<(), CliError> {
    let panel = load_returns(cfg)?;
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();
    for &year in &cfg.years {
        let fit = fit_slice(&panel, year)?;
        let graph = build_market_graph(&fit)?;
        info!(
            "year {year}: graph over {} assets, fit window {}..{}",
            graph.n(),
            graph.fit_start,
            graph.fit_end
        );
        for (name, matrix) in [
            (format!("rho_{year}.csv"), &graph.rho),
            (format!("dist_{year}.csv"), &graph.dist),
            (format!("delta_{year}.csv"), &graph.delta),
        ] {
            let path = out_path(cfg, &name);
            write_matrix_csv(&path, &graph.assets, matrix)?;
            guard.track(&path);
            info!("wrote {}", path.display());
        }
    }
    guard.finish();
    Ok(())
}

/// One QUBO solve within `cmd_solve`: the instance, its seed, and where
/// the outputs go.
struct SolveJob<'a> {
    assets: &'a [String],
    delta: &'a ndarray::Array2<f64>,
    seed: u64,
    label: String,
    exemplars_path: PathBuf,
    qubo_path: Option<PathBuf>,
}

fn solve_one(cfg: &RunConfig, job: &SolveJob, guard: &mut OutputGuard) -> Result<(), CliError> {
    let problem = build_kmedoid_qubo(job.delta, cfg.k)?;
    let mut solver = cfg.solver.clone();
    solver.seed = job.seed;
    let result = solve_anneal(&problem, &solver)?;
    let tickers: Vec<String> = result
        .best
        .exemplars()
        .iter()
        .map(|&i| job.assets[i].clone())
        .collect();
    write_exemplars_csv(&job.exemplars_path, &tickers)?;
    guard.track(&job.exemplars_path);
    if let Some(qp) = &job.qubo_path {
        let file = std::fs::File::create(qp)
            .map_err(|e| CliError::Data(format!("{}: {e}", qp.display())))?;
        problem
            .write_triplets(std::io::BufWriter::new(file))
            .map_err(|e| CliError::Data(format!("{}: {e}", qp.display())))?;
        guard.track(qp);
        info!("wrote {}", qp.display());
    }
    println!(
        "{}: energy {} feasible {} exemplars {}",
        job.label,
        result.best_energy,
        result.feasible,
        tickers.join(";")
    );
    info!("wrote {}", job.exemplars_path.display());
    Ok(())
}

/// `solve`: read dissimilarity CSVs and emit exemplars plus energy.
pub fn cmd_solve(cfg: &RunConfig, args: &SolveArgs) -> Result<(), CliError> {
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();
    if let Some(delta_path) = &args.delta {
        let (assets, delta) = read_matrix_csv(delta_path)?;
        solve_one(
            cfg,
            &SolveJob {
                assets: &assets,
                delta: &delta,
                seed: cfg.solver.seed,
                label: delta_path.display().to_string(),
                exemplars_path: out_path(cfg, "exemplars.csv"),
                qubo_path: args.export_qubo.then(|| out_path(cfg, "qubo.txt")),
            },
            &mut guard,
        )?;
    } else {
        for &year in &cfg.years {
            let delta_path = out_path(cfg, &format!("delta_{year}.csv"));
            if !delta_path.is_file() {
                return Err(CliError::Data(format!(
                    "{} not found; run `tracker graph` first or pass --delta",
                    delta_path.display()
                )));
            }
            let (assets, delta) = read_matrix_csv(&delta_path)?;
            solve_one(
                cfg,
                &SolveJob {
                    assets: &assets,
                    delta: &delta,
                    seed: derive_stream_seed(cfg.solver.seed, year as u64),
                    label: format!("year {year}"),
                    exemplars_path: out_path(cfg, &format!("exemplars_{year}.csv")),
                    qubo_path: args
                        .export_qubo
                        .then(|| out_path(cfg, &format!("qubo_{year}.txt"))),
                },
                &mut guard,
            )?;
        }
    }
    guard.finish();
    Ok(())
}

/// `backtest`: read exemplar lists, evaluate each year, write the report
/// and the per-year series.
pub fn cmd_backtest(cfg: &RunConfig, args: &BacktestArgs) -> Result<(), CliError> {
    if args.exemplars.is_some() && cfg.years.len() != 1 {
        return Err(CliError::Invalid(
            "--exemplars needs exactly one configured year".into(),
        ));
    }
    let panel = load_returns(cfg)?;
    let params = backtest_params(cfg)?;
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();

    let mut reports: Vec<TrackingReport> = Vec::new();
    for &year in &cfg.years {
        let exemplars_path = match &args.exemplars {
            Some(p) => p.clone(),
            None => out_path(cfg, &format!("exemplars_{year}.csv")),
        };
        if !exemplars_path.is_file() {
            return Err(CliError::Data(format!(
                "{} not found; run `tracker solve` first or pass --exemplars",
                exemplars_path.display()
            )));
        }
        let exemplars = read_exemplars_csv(&exemplars_path)?;
        let eval = slice_year(&panel, year)?;
        let graph = match cfg.weighting {
            tracker_core::Weighting::ClusterSize => {
                Some(build_market_graph(&fit_slice(&panel, year)?)?)
            }
            tracker_core::Weighting::Equal => None,
        };
        let r_port = backtest::portfolio_returns(&eval, &exemplars, cfg.weighting, graph.as_ref())?;
        let r_index = match &params.index {
            Some(series) => series.aligned_to(&eval.dates)?,
            None => backtest::index_returns(&eval)?,
        };
        let te = backtest::tracking_error(&r_index, &r_port)?;
        let reg = backtest::beta_regression(&r_index, &r_port)?;
        let series: Vec<(NaiveDate, f64, f64)> = eval
            .dates
            .iter()
            .zip(r_index.iter().zip(&r_port))
            .map(|(d, (i, p))| (*d, *i, *p))
            .collect();
        info!(
            "year {year}: te {te} beta {} t {} (t_beta1 {})",
            reg.beta, reg.t_stat, reg.t_stat_beta_one
        );
        let series_path = out_path(cfg, &format!("series_{year}.csv"));
        write_series_csv(&series_path, &series)?;
        guard.track(&series_path);
        reports.push(TrackingReport {
            year,
            exemplars,
            tracking_error: te,
            beta: reg.beta,
            intercept: reg.alpha,
            t_stat: reg.t_stat,
            t_stat_beta_one: reg.t_stat_beta_one,
            series,
        });
    }
    let report_path = out_path(cfg, "report.csv");
    write_report_csv(&report_path, &reports)?;
    guard.track(&report_path);
    info!("wrote {}", report_path.display());
    guard.finish();
    Ok(())
}

/// Per-year entry of the run manifest.
#[derive(Serialize)]
struct YearManifest {
    year: i32,
    fit_start: NaiveDate,
    fit_end: NaiveDate,
    solver_seed: u64,
    best_energy: f64,
    feasible: bool,
    exemplars: Vec<String>,
    tracking_error: f64,
    beta: f64,
    intercept: f64,
    t_stat: f64,
    t_stat_beta_one: f64,
    n_days: usize,
}

/// Everything needed to reproduce a run byte for byte.
#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    resolved_seed: u64,
    years: Vec<YearManifest>,
}

fn run_all_years(cfg: &RunConfig) -> Result<Vec<YearOutcome>, CliError> {
    let panel = load_returns(cfg)?;
    let params = backtest_params(cfg)?;
    cfg.years
        .iter()
        .map(|&year| {
            let outcome = run_year(&panel, year, &params)?;
            info!(
                "year {year}: energy {} feasible {} te {} beta {}",
                outcome.solve.best_energy,
                outcome.solve.feasible,
                outcome.report.tracking_error,
                outcome.report.beta
            );
            Ok(outcome)
        })
        .collect()
}

/// `pipeline`: ingest, per-year graph/QUBO/solve/backtest, writing the
/// report, series, exemplar lists and the run manifest.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    let outcomes = run_all_years(cfg)?;
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();

    for outcome in &outcomes {
        let year = outcome.report.year;
        let ex_path = out_path(cfg, &format!("exemplars_{year}.csv"));
        write_exemplars_csv(&ex_path, &outcome.report.exemplars)?;
        guard.track(&ex_path);
        let series_path = out_path(cfg, &format!("series_{year}.csv"));
        write_series_csv(&series_path, &outcome.report.series)?;
        guard.track(&series_path);
    }

    let reports: Vec<TrackingReport> = outcomes.iter().map(|o| o.report.clone()).collect();
    let report_path = out_path(cfg, "report.csv");
    write_report_csv(&report_path, &reports)?;
    guard.track(&report_path);

    let manifest = Manifest {
        tool: "tracker",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        resolved_seed: cfg.solver.seed,
        years: outcomes
            .iter()
            .map(|o| YearManifest {
                year: o.report.year,
                fit_start: o.graph.fit_start,
                fit_end: o.graph.fit_end,
                solver_seed: o.solve.seed_used,
                best_energy: o.solve.best_energy,
                feasible: o.solve.feasible,
                exemplars: o.report.exemplars.clone(),
                tracking_error: o.report.tracking_error,
                beta: o.report.beta,
                intercept: o.report.intercept,
                t_stat: o.report.t_stat,
                t_stat_beta_one: o.report.t_stat_beta_one,
                n_days: o.report.series.len(),
            })
            .collect(),
    };
    let manifest_path = out_path(cfg, "manifest.json");
    let file = std::fs::File::create(&manifest_path)
        .map_err(|e| CliError::Data(format!("{}: {e}", manifest_path.display())))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &manifest)
        .map_err(|e| CliError::Data(format!("{}: {e}", manifest_path.display())))?;
    guard.track(&manifest_path);

    info!("wrote {}", report_path.display());
    info!("wrote {}", manifest_path.display());
    guard.finish();
    Ok(())
}

/// `plot-data`: write only the per-year `date,r_index,r_port,diff` series.
pub fn cmd_plot_data(cfg: &RunConfig) -> Result<(), CliError> {
    let outcomes = run_all_years(cfg)?;
    ensure_output_dir(cfg)?;
    let mut guard = OutputGuard::new();
    for outcome in &outcomes {
        let path = out_path(cfg, &format!("series_{}.csv", outcome.report.year));
        write_series_csv(&path, &outcome.report.series)?;
        guard.track(&path);
        info!("wrote {}", path.display());
    }
    guard.finish();
    Ok(())
}
