//! The backtest recovers latent cluster structure on synthetic data.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use tracker_core::backtest::{index_returns, portfolio_returns, tracking_error};
use tracker_core::synthetic::{cluster_panel, ClusterSpec};
use tracker_core::{run_year, slice_year, AnnealConfig, BacktestParams, Weighting};

/// Six driver factors generate sixty assets; the selected exemplars should
/// spread across the clusters and track the index proxy better out of
/// sample than randomly chosen portfolios of the same size.
#[test]
fn exemplars_cover_clusters_and_beat_random_selection() {
    let spec = ClusterSpec {
        clusters: 6,
        assets_per_cluster: 10,
        factor_vol: 0.01,
        idio_vol: 0.004,
    };
    let panel = cluster_panel(&spec, 2015, 2, 42);
    let params = BacktestParams {
        k: 6,
        weighting: Weighting::Equal,
        solver: AnnealConfig {
            sweeps: 300,
            restarts: 8,
            seed: 42,
            ..Default::default()
        },
        index: None,
    };
    let outcome = run_year(&panel, 2016, &params).unwrap();
    let report = &outcome.report;
    assert_eq!(report.exemplars.len(), 6);

    // Assets are named S000..S059 in cluster blocks of 10.
    let clusters_hit: std::collections::HashSet<usize> = report
        .exemplars
        .iter()
        .map(|t| t[1..].parse::<usize>().unwrap() / 10)
        .collect();
    assert!(
        clusters_hit.len() >= 5,
        "exemplars {:?} cover only {} clusters",
        report.exemplars,
        clusters_hit.len()
    );

    // Random baseline on the same evaluation year.
    let eval = slice_year(&panel, 2016).unwrap();
    let r_index = index_returns(&eval).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut baseline: Vec<f64> = (0..20)
        .map(|_| {
            let mut picks: Vec<usize> = (0..eval.n_assets()).collect();
            picks.shuffle(&mut rng);
            let tickers: Vec<String> = picks[..6].iter().map(|&i| eval.assets[i].clone()).collect();
            let r_port = portfolio_returns(&eval, &tickers, Weighting::Equal, None).unwrap();
            tracking_error(&r_index, &r_port).unwrap()
        })
        .collect();
    baseline.sort_by(|a, b| a.total_cmp(b));
    let median = (baseline[9] + baseline[10]) / 2.0;
    assert!(
        report.tracking_error < median,
        "pipeline te {} not below random median {median}",
        report.tracking_error
    );
}

/// Cluster-size weighting also produces a sane portfolio on the same data.
#[test]
fn cluster_size_weighting_runs_end_to_end() {
    let spec = ClusterSpec {
        clusters: 3,
        assets_per_cluster: 6,
        factor_vol: 0.012,
        idio_vol: 0.004,
    };
    let panel = cluster_panel(&spec, 2015, 2, 9);
    let params = BacktestParams {
        k: 3,
        weighting: Weighting::ClusterSize,
        solver: AnnealConfig {
            sweeps: 200,
            restarts: 4,
            seed: 9,
            ..Default::default()
        },
        index: None,
    };
    let outcome = run_year(&panel, 2016, &params).unwrap();
    assert_eq!(outcome.report.exemplars.len(), 3);
    assert!(outcome.report.tracking_error.is_finite());
    assert!(outcome.report.tracking_error >= 0.0);
    // A 3-exemplar portfolio on 3 clean clusters tracks closely.
    assert!(outcome.report.beta > 0.5 && outcome.report.beta < 1.5);
}
