//! Out-of-sample evaluation of a tracking portfolio.
//!
//! For each evaluation year the pipeline fits a market graph on the prior
//! year, selects exemplars by annealing the k-medoid QUBO, and scores the
//! resulting portfolio against the index proxy with two metrics: tracking
//! error (sample standard deviation of the daily return difference) and the
//! OLS beta of portfolio returns on index returns, with its t-statistic.
//!
//! The index proxy is the equal-weighted mean of all panel constituents
//! unless an explicit index return series is supplied.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{slice_year, ReturnsPanel};
use crate::market_graph::{build_market_graph, MarketGraph};
use crate::qubo::build_kmedoid_qubo;
use crate::solver::{derive_stream_seed, solve_anneal, AnnealConfig, SolveResult};

/// How exemplars are weighted in the tracking portfolio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// Every exemplar gets weight 1/k.
    #[default]
    Equal,
    /// Each exemplar is weighted by the fraction of graph vertices whose
    /// nearest exemplar (under the fit-window distance) it is.
    ClusterSize,
}

impl Weighting {
    /// Stable CLI/config spelling of the variant.
    pub fn as_str(&self) -> &'static str {
        match self {
            Weighting::Equal => "equal",
            Weighting::ClusterSize => "cluster-size",
        }
    }
}

impl std::str::FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(Weighting::Equal),
            "cluster-size" => Ok(Weighting::ClusterSize),
            other => Err(Error::Parameter(format!(
                "unknown weighting `{other}` (expected equal or cluster-size)"
            ))),
        }
    }
}

/// Slope, intercept and test statistics of an OLS fit.
#[derive(Debug, Clone, Copy)]
pub struct Regression {
    /// Intercept.
    pub alpha: f64,
    /// Slope.
    pub beta: f64,
    /// t-statistic for the null `beta = 0`. Infinite (with the slope's
    /// sign) when the fit has zero residuals; 0 for a zero slope with zero
    /// residuals.
    pub t_stat: f64,
    /// t-statistic for the tracking-relevant null `beta = 1`, with the same
    /// zero-residual convention.
    pub t_stat_beta_one: f64,
}

/// One year's tracking outcome.
#[derive(Debug, Clone)]
pub struct TrackingReport {
    /// Evaluation year.
    pub year: i32,
    /// Exemplar tickers forming the portfolio.
    pub exemplars: Vec<String>,
    /// Sample standard deviation of daily `r_index - r_port`.
    pub tracking_error: f64,
    /// OLS slope of portfolio on index returns.
    pub beta: f64,
    /// OLS intercept.
    pub intercept: f64,
    /// t-statistic for `beta = 0`.
    pub t_stat: f64,
    /// Supplementary t-statistic for `beta = 1`.
    pub t_stat_beta_one: f64,
    /// Daily `(date, r_index, r_port)` over the evaluation year.
    pub series: Vec<(NaiveDate, f64, f64)>,
}

/// An explicit daily index return series, keyed by date.
#[derive(Debug, Clone, Default)]
pub struct IndexSeries {
    map: HashMap<NaiveDate, f64>,
}

impl IndexSeries {
    /// Parse a `date,return` CSV file.
    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        let file = std::fs::File::open(path.as_ref()).map_err(|e| {
            Error::Validation(format!(
                "cannot open index file {}: {e}",
                path.as_ref().display()
            ))
        })?;
        Self::from_reader(file)
    }

    /// Parse a `date,return` CSV from any reader.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut map = HashMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            if rec.len() != 2 {
                return Err(Error::MalformedInput {
                    line,
                    reason: format!("expected `date,return`, got {} fields", rec.len()),
                });
            }
            let date = NaiveDate::parse_from_str(&rec[0], "%Y-%m-%d").map_err(|_| {
                Error::MalformedInput {
                    line,
                    reason: format!("invalid ISO-8601 date `{}`", &rec[0]),
                }
            })?;
            let value: f64 = rec[1].parse().map_err(|_| Error::MalformedInput {
                line,
                reason: format!("invalid return `{}`", &rec[1]),
            })?;
            if map.insert(date, value).is_some() {
                return Err(Error::MalformedInput {
                    line,
                    reason: format!("duplicate index return for {date}"),
                });
            }
        }
        Ok(Self { map })
    }

    /// The series aligned to the given dates; every date must be present.
    pub fn aligned_to(&self, dates: &[NaiveDate]) -> Result<Vec<f64>> {
        dates
            .iter()
            .map(|d| {
                self.map
                    .get(d)
                    .copied()
                    .ok_or_else(|| Error::Alignment(format!("index series has no return for {d}")))
            })
            .collect()
    }
}

/// Daily portfolio log returns for the given exemplars.
///
/// Equal weighting averages the exemplar returns; cluster-size weighting
/// weights each exemplar by the share of fit-window graph vertices assigned
/// to it (nearest exemplar under the distance matrix, ties to the
/// lower-index exemplar). The portfolio log return is the weighted average
/// of constituent log returns.
pub fn portfolio_returns(
    panel: &ReturnsPanel,
    exemplars: &[String],
    weighting: Weighting,
    graph: Option<&MarketGraph>,
) -> Result<Vec<f64>> {
    if exemplars.is_empty() {
        return Err(Error::Parameter(
            "portfolio needs at least one exemplar".into(),
        ));
    }
    let rows: Vec<usize> = exemplars
        .iter()
        .map(|t| {
            panel
                .asset_index(t)
                .ok_or_else(|| Error::Mismatch(format!("exemplar {t} not in returns panel")))
        })
        .collect::<Result<_>>()?;

    let weights = match weighting {
        Weighting::Equal => vec![1.0 / exemplars.len() as f64; exemplars.len()],
        Weighting::ClusterSize => {
            let graph = graph.ok_or_else(|| {
                Error::Parameter("cluster-size weighting requires the fit-window graph".into())
            })?;
            cluster_size_weights(graph, exemplars)?
        }
    };

    let t = panel.n_dates();
    let mut series = vec![0.0; t];
    for (w, &row) in weights.iter().zip(&rows) {
        for (s, out) in series.iter_mut().enumerate() {
            *out += w * panel.returns[[row, s]];
        }
    }
    Ok(series)
}

/// Fraction of graph vertices whose nearest exemplar each exemplar is.
fn cluster_size_weights(graph: &MarketGraph, exemplars: &[String]) -> Result<Vec<f64>> {
    let exemplar_vertices: Vec<usize> = exemplars
        .iter()
        .map(|t| {
            graph
                .assets
                .iter()
                .position(|a| a == t)
                .ok_or_else(|| Error::Mismatch(format!("exemplar {t} not in market graph")))
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0usize; exemplars.len()];
    for vertex in 0..graph.n() {
        let mut nearest = 0usize;
        let mut nearest_dist = f64::INFINITY;
        for (e, &ev) in exemplar_vertices.iter().enumerate() {
            let d = graph.dist[[vertex, ev]];
            // Strict `<` keeps the lower-index exemplar on ties.
            if d < nearest_dist {
                nearest_dist = d;
                nearest = e;
            }
        }
        counts[nearest] += 1;
    }
    let n = graph.n() as f64;
    Ok(counts.iter().map(|&c| c as f64 / n).collect())
}

/// Equal-weighted mean return of all panel constituents per date.
pub fn index_returns(panel: &ReturnsPanel) -> Result<Vec<f64>> {
    let n = panel.n_assets();
    let t = panel.n_dates();
    if n == 0 || t == 0 {
        return Err(Error::InsufficientData(
            "empty panel has no index returns".into(),
        ));
    }
    // Same accumulation order as an equal-weight portfolio over all assets,
    // so that portfolio and proxy agree bitwise in that case.
    let w = 1.0 / n as f64;
    let mut series = vec![0.0; t];
    for i in 0..n {
        for (s, out) in series.iter_mut().enumerate() {
            *out += w * panel.returns[[i, s]];
        }
    }
    Ok(series)
}

/// Sample standard deviation of the difference series
/// `d_t = r_index(t) - r_port(t)`.
pub fn tracking_error(r_index: &[f64], r_port: &[f64]) -> Result<f64> {
    if r_index.len() != r_port.len() {
        return Err(Error::Alignment(format!(
            "series lengths differ: {} vs {}",
            r_index.len(),
            r_port.len()
        )));
    }
    let n = r_index.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "tracking error needs at least 2 observations, got {n}"
        )));
    }
    let diffs: Vec<f64> = r_index.iter().zip(r_port).map(|(a, b)| a - b).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    Ok(var.sqrt())
}

/// OLS regression `r_port = alpha + beta * r_index`.
///
/// The slope standard error uses the residual variance with `n - 2` degrees
/// of freedom. A perfect fit has zero residuals and an undefined
/// t-statistic; by convention it is reported as +/- infinity (sign of the
/// tested difference), or 0 when the tested difference is itself 0.
pub fn beta_regression(r_index: &[f64], r_port: &[f64]) -> Result<Regression> {
    if r_index.len() != r_port.len() {
        return Err(Error::Alignment(format!(
            "series lengths differ: {} vs {}",
            r_index.len(),
            r_port.len()
        )));
    }
    let n = r_index.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "regression needs at least 3 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let mean_x = r_index.iter().sum::<f64>() / nf;
    let mean_y = r_port.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in r_index.iter().zip(r_port) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let constant = r_index.iter().all(|&x| x == r_index[0]);
    if constant || sxx == 0.0 {
        return Err(Error::DegenerateRegressor(
            "index return series has zero variance".into(),
        ));
    }
    let beta = sxy / sxx;
    let alpha = mean_y - beta * mean_x;

    let rss: f64 = r_index
        .iter()
        .zip(r_port)
        .map(|(x, y)| {
            let e = y - (alpha + beta * x);
            e * e
        })
        .sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();

    let t_for = |difference: f64| -> f64 {
        if se > 0.0 {
            difference / se
        } else if difference == 0.0 {
            0.0
        } else {
            difference.signum() * f64::INFINITY
        }
    };
    Ok(Regression {
        alpha,
        beta,
        t_stat: t_for(beta),
        t_stat_beta_one: t_for(beta - 1.0),
    })
}

/// Everything `run_annual_backtest` needs besides the panel and years.
#[derive(Debug, Clone, Default)]
pub struct BacktestParams {
    /// Portfolio cardinality.
    pub k: usize,
    /// Exemplar weighting scheme.
    pub weighting: Weighting,
    /// Solver configuration; its seed is the top-level seed, from which
    /// per-year seeds are derived.
    pub solver: AnnealConfig,
    /// Explicit index returns; the equal-weighted panel mean when absent.
    pub index: Option<IndexSeries>,
}

/// A fully evaluated year: the report plus the artifacts behind it.
#[derive(Debug, Clone)]
pub struct YearOutcome {
    /// The tracking report.
    pub report: TrackingReport,
    /// The fit-window market graph.
    pub graph: MarketGraph,
    /// The solver result that produced the exemplars.
    pub solve: SolveResult,
}

/// Fit on year `y - 1`, select exemplars, and evaluate on year `y`.
pub fn run_year(panel: &ReturnsPanel, year: i32, params: &BacktestParams) -> Result<YearOutcome> {
    let fit = slice_year(panel, year - 1).map_err(|e| match e {
        Error::NoDataForYear(_) => Error::InsufficientHistory(format!(
            "evaluation year {year} needs returns for {}",
            year - 1
        )),
        other => other,
    })?;
    let eval = slice_year(panel, year)?;
    assert!(
        fit.dates.last() < eval.dates.first(),
        "fit window must end before the evaluation window starts"
    );

    let graph = build_market_graph(&fit)?;
    let problem = build_kmedoid_qubo(&graph.delta, params.k)?;
    let mut solver = params.solver.clone();
    solver.seed = derive_stream_seed(params.solver.seed, year as u64);
    let solve = solve_anneal(&problem, &solver)?;

    let exemplars: Vec<String> = solve
        .best
        .exemplars()
        .iter()
        .map(|&i| graph.assets[i].clone())
        .collect();

    let r_port = portfolio_returns(&eval, &exemplars, params.weighting, Some(&graph))?;
    let r_index = match &params.index {
        Some(series) => series.aligned_to(&eval.dates)?,
        None => index_returns(&eval)?,
    };
    let te = tracking_error(&r_index, &r_port)?;
    let reg = beta_regression(&r_index, &r_port)?;

    let series = eval
        .dates
        .iter()
        .zip(r_index.iter().zip(&r_port))
        .map(|(d, (i, p))| (*d, *i, *p))
        .collect();
    Ok(YearOutcome {
        report: TrackingReport {
            year,
            exemplars,
            tracking_error: te,
            beta: reg.beta,
            intercept: reg.alpha,
            t_stat: reg.t_stat,
            t_stat_beta_one: reg.t_stat_beta_one,
            series,
        },
        graph,
        solve,
    })
}

/// Run the fit/evaluate cycle for every year, in order.
pub fn run_annual_backtest(
    panel: &ReturnsPanel,
    years: &[i32],
    params: &BacktestParams,
) -> Result<Vec<TrackingReport>> {
    years
        .iter()
        .map(|&y| run_year(panel, y, params).map(|outcome| outcome.report))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Datelike;
    use ndarray::Array2;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    fn panel(assets: &[&str], rows: Vec<Vec<f64>>) -> ReturnsPanel {
        let t = rows[0].len();
        let dates: Vec<NaiveDate> = (0..t)
            .map(|i| date("2020-01-01") + chrono::Days::new(i as u64))
            .collect();
        ReturnsPanel {
            assets: assets.iter().map(|s| s.to_string()).collect(),
            dates,
            returns: Array2::from_shape_vec(
                (assets.len(), t),
                rows.into_iter().flatten().collect(),
            )
            .unwrap(),
        }
    }

    #[test]
    fn singleton_portfolio_is_the_asset() {
        let p = panel(&["A", "B"], vec![vec![0.01, -0.02], vec![0.03, 0.04]]);
        let r = portfolio_returns(&p, &["B".into()], Weighting::Equal, None).unwrap();
        assert_eq!(r, vec![0.03, 0.04]);
    }

    #[test]
    fn equal_weights_average() {
        let p = panel(&["A", "B"], vec![vec![0.02, 0.0], vec![0.0, 0.02]]);
        let r = portfolio_returns(&p, &["A".into(), "B".into()], Weighting::Equal, None).unwrap();
        assert_eq!(r, vec![0.01, 0.01]);
    }

    #[test]
    fn missing_exemplar_is_mismatch() {
        let p = panel(&["A"], vec![vec![0.01, 0.02]]);
        assert!(matches!(
            portfolio_returns(&p, &["Z".into()], Weighting::Equal, None).unwrap_err(),
            Error::Mismatch(_)
        ));
    }

    fn toy_graph() -> MarketGraph {
        // Four assets; C and D sit close to A, far from B.
        let dist = ndarray::array![
            [0.0, 1.8, 0.2, 0.3],
            [1.8, 0.0, 1.7, 1.6],
            [0.2, 1.7, 0.0, 0.4],
            [0.3, 1.6, 0.4, 0.0]
        ];
        MarketGraph {
            assets: vec!["A".into(), "B".into(), "C".into(), "D".into()],
            rho: Array2::zeros((4, 4)),
            delta: Array2::zeros((4, 4)),
            dist,
            fit_start: date("2019-01-01"),
            fit_end: date("2019-12-31"),
        }
    }

    #[test]
    fn cluster_size_weights_from_toy_graph() {
        // Nearest exemplar: A->A, B->B, C->A, D->A, so weights are 3/4, 1/4.
        let graph = toy_graph();
        let p = panel(
            &["A", "B", "C", "D"],
            vec![
                vec![0.04, 0.0],
                vec![0.0, 0.04],
                vec![0.0, 0.0],
                vec![0.0, 0.0],
            ],
        );
        let r = portfolio_returns(
            &p,
            &["A".into(), "B".into()],
            Weighting::ClusterSize,
            Some(&graph),
        )
        .unwrap();
        assert!((r[0] - 0.03).abs() < 1e-15);
        assert!((r[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn cluster_size_needs_graph() {
        let p = panel(&["A"], vec![vec![0.01, 0.02]]);
        assert!(matches!(
            portfolio_returns(&p, &["A".into()], Weighting::ClusterSize, None).unwrap_err(),
            Error::Parameter(_)
        ));
    }

    #[test]
    fn index_of_single_asset_is_that_asset() {
        let p = panel(&["A"], vec![vec![0.01, -0.03]]);
        assert_eq!(index_returns(&p).unwrap(), vec![0.01, -0.03]);
    }

    #[test]
    fn index_of_mirrored_assets_is_zero() {
        let p = panel(&["A", "B"], vec![vec![0.01, -0.03], vec![-0.01, 0.03]]);
        assert_eq!(index_returns(&p).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn supplied_index_passthrough_and_alignment() {
        let csv = "date,return\n2020-01-01,0.001\n2020-01-02,-0.002\n";
        let series = IndexSeries::from_reader(csv.as_bytes()).unwrap();
        let dates = [date("2020-01-01"), date("2020-01-02")];
        assert_eq!(series.aligned_to(&dates).unwrap(), vec![0.001, -0.002]);
        let missing = [date("2020-01-03")];
        assert!(matches!(
            series.aligned_to(&missing).unwrap_err(),
            Error::Alignment(_)
        ));
    }

    #[test]
    fn tracking_error_of_identical_series_is_zero() {
        let r = vec![0.01, -0.02, 0.005];
        assert_eq!(tracking_error(&r, &r).unwrap(), 0.0);
    }

    #[test]
    fn tracking_error_two_point_closed_form() {
        // differences (+c, -c): mean 0, sample std = c * sqrt(2).
        let c = 0.004;
        let e = tracking_error(&[c, -c], &[0.0, 0.0]).unwrap();
        assert!((e - c * std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn tracking_error_constant_difference_is_zero() {
        let idx = [0.002, 0.003, 0.004];
        let port = [0.001, 0.002, 0.003];
        assert_eq!(tracking_error(&idx, &port).unwrap(), 0.0);
    }

    #[test]
    fn tracking_error_alignment() {
        assert!(matches!(
            tracking_error(&[0.1, 0.2], &[0.1]).unwrap_err(),
            Error::Alignment(_)
        ));
    }

    #[test]
    fn perfect_fit_regression() {
        let x = vec![0.01, -0.02, 0.003, 0.014];
        let reg = beta_regression(&x, &x).unwrap();
        assert!((reg.beta - 1.0).abs() < 1e-12);
        assert!(reg.alpha.abs() < 1e-15);
        assert!(reg.t_stat.is_infinite() && reg.t_stat > 0.0);
        assert_eq!(reg.t_stat_beta_one, 0.0);
    }

    #[test]
    fn exact_affine_regression() {
        let x = vec![0.01, -0.02, 0.003, 0.014, -0.006];
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v + 0.001).collect();
        let reg = beta_regression(&x, &y).unwrap();
        assert!((reg.beta - 0.5).abs() <= 1e-10);
        assert!((reg.alpha - 0.001).abs() <= 1e-10);
    }

    #[test]
    fn zero_variance_index_is_degenerate() {
        let x = vec![0.01; 5];
        let y = vec![0.01, 0.02, 0.0, 0.01, 0.03];
        assert!(matches!(
            beta_regression(&x, &y).unwrap_err(),
            Error::DegenerateRegressor(_)
        ));
    }

    /// Closed-form OLS on a generated sample, written independently of
    /// `beta_regression` (normal-equation form without centering).
    fn ols_reference(x: &[f64], y: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let beta = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let alpha = (sy - beta * sx) / n;
        (alpha, beta)
    }

    #[test]
    fn noisy_beta_recovery() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let n = 250;
        let normal = |rng: &mut rand_chacha::ChaCha8Rng| {
            let u1: f64 = rng.random::<f64>().max(1e-12);
            let u2: f64 = rng.random();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let x: Vec<f64> = (0..n).map(|_| 0.01 * normal(&mut rng)).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 1.2 * v + 0.005 * normal(&mut rng))
            .collect();
        let reg = beta_regression(&x, &y).unwrap();
        let (ra, rb) = ols_reference(&x, &y);
        assert!((reg.beta - rb).abs() < 1e-10);
        assert!((reg.alpha - ra).abs() < 1e-10);
        // Recovered slope within 3 standard errors of the generator's 1.2.
        let se = reg.beta / reg.t_stat;
        assert!((reg.beta - 1.2).abs() <= 3.0 * se, "beta = {}", reg.beta);
    }

    fn two_year_panel(n_assets: usize, seed: u64) -> ReturnsPanel {
        crate::synthetic::cluster_panel(
            &crate::synthetic::ClusterSpec {
                clusters: 2,
                assets_per_cluster: n_assets / 2,
                factor_vol: 0.01,
                idio_vol: 0.004,
            },
            2015,
            2,
            seed,
        )
    }

    #[test]
    fn annual_backtest_structure() {
        let panel = two_year_panel(8, 5);
        let params = BacktestParams {
            k: 2,
            weighting: Weighting::Equal,
            solver: AnnealConfig {
                sweeps: 100,
                restarts: 4,
                seed: 11,
                ..Default::default()
            },
            index: None,
        };
        let reports = run_annual_backtest(&panel, &[2016], &params).unwrap();
        assert_eq!(reports.len(), 1);
        let rep = &reports[0];
        assert_eq!(rep.year, 2016);
        assert_eq!(rep.exemplars.len(), 2);
        assert!(rep.tracking_error >= 0.0);
        assert!(rep.series.len() >= 3);
        assert!(rep.series.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(rep.series.iter().all(|(d, _, _)| d.year() == 2016));
    }

    #[test]
    fn annual_backtest_missing_history() {
        let panel = two_year_panel(8, 6);
        let params = BacktestParams {
            k: 2,
            ..Default::default()
        };
        assert!(matches!(
            run_annual_backtest(&panel, &[2015], &params).unwrap_err(),
            Error::InsufficientHistory(_)
        ));
    }

    #[test]
    fn tracking_error_shift_invariance() {
        let a = vec![0.01, -0.02, 0.004, 0.007];
        let b = vec![0.008, -0.018, 0.001, 0.009];
        let shift = 0.0025;
        let a2: Vec<f64> = a.iter().map(|v| v + shift).collect();
        let b2: Vec<f64> = b.iter().map(|v| v + shift).collect();
        let e1 = tracking_error(&a, &b).unwrap();
        let e2 = tracking_error(&a2, &b2).unwrap();
        assert!((e1 - e2).abs() < 1e-15);
    }

    #[test]
    fn equal_weight_order_invariance() {
        let p = panel(
            &["A", "B", "C"],
            vec![
                vec![0.01, 0.02, -0.01],
                vec![0.00, 0.01, 0.02],
                vec![-0.01, 0.00, 0.01],
            ],
        );
        let fwd = portfolio_returns(
            &p,
            &["A".into(), "B".into(), "C".into()],
            Weighting::Equal,
            None,
        )
        .unwrap();
        let rev = portfolio_returns(
            &p,
            &["C".into(), "A".into(), "B".into()],
            Weighting::Equal,
            None,
        )
        .unwrap();
        for (a, b) in fwd.iter().zip(&rev) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
