//! Solver quality against the exhaustive oracle at the default budget.

use tracker_core::synthetic::delta_from_random_points;
use tracker_core::{build_kmedoid_qubo, solve_anneal, solve_exhaustive, AnnealConfig};

/// Median relative energy gap between the default-config annealer and the
/// exhaustive optimum stays at or below 0.1% over 100 random k-medoid
/// instances (dissimilarities from random planar points).
#[test]
fn default_config_median_gap_below_one_permille() {
    let mut gaps: Vec<f64> = Vec::with_capacity(100);
    for seed in 0..100u64 {
        let delta = delta_from_random_points(15, 3000 + seed);
        let problem = build_kmedoid_qubo(&delta, 3).unwrap();
        let exact = solve_exhaustive(&problem).unwrap();
        let config = AnnealConfig {
            seed,
            repair: false,
            ..Default::default()
        };
        let res = solve_anneal(&problem, &config).unwrap();
        assert!(res.best_energy >= exact.best_energy - 1e-9);
        gaps.push((res.best_energy - exact.best_energy).max(0.0) / exact.best_energy.abs());
    }
    gaps.sort_by(|a, b| a.total_cmp(b));
    let median = (gaps[49] + gaps[50]) / 2.0;
    assert!(median <= 1e-3, "median relative gap {median}");
}
