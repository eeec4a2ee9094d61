//! Shared instance builders for the criterion benchmarks.

use tracker_core::synthetic::{cluster_panel, delta_from_random_points, ClusterSpec};
use tracker_core::{build_kmedoid_qubo, QuboProblem, ReturnsPanel};

/// A returns panel shaped like one fit year of a mid-sized universe.
pub fn bench_panel(n_assets: usize) -> ReturnsPanel {
    cluster_panel(
        &ClusterSpec {
            clusters: 10,
            assets_per_cluster: n_assets / 10,
            factor_vol: 0.01,
            idio_vol: 0.005,
        },
        2015,
        1,
        7,
    )
}

/// A k-medoid instance of the given size.
pub fn bench_problem(n: usize, k: usize) -> QuboProblem {
    build_kmedoid_qubo(&delta_from_random_points(n, 7), k).expect("valid instance")
}
