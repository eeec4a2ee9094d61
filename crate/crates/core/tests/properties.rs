//! Property tests for the pipeline's structural invariants.

use chrono::NaiveDate;
use ndarray::Array2;
use proptest::prelude::*;
use tracker_core::market_graph::{correlation_distance, distance_decay};
use tracker_core::qubo::build_kmedoid_qubo;
use tracker_core::{
    build_market_graph, compute_log_returns, pearson_correlation, MissingPolicy, PricePanel,
    ReturnsPanel,
};

fn returns_panel(rows: Vec<Vec<f64>>) -> ReturnsPanel {
    let n = rows.len();
    let t = rows[0].len();
    let dates: Vec<NaiveDate> = (0..t)
        .map(|i| NaiveDate::from_ymd_opt(2019, 1, 1).unwrap() + chrono::Days::new(i as u64))
        .collect();
    ReturnsPanel {
        assets: (0..n).map(|i| format!("A{i}")).collect(),
        dates,
        returns: Array2::from_shape_vec((n, t), rows.into_iter().flatten().collect()).unwrap(),
    }
}

/// Return rows with enough wiggle to avoid degenerate (constant) series.
fn arb_panel(n: usize, t: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-0.05f64..0.05, t), n)
        .prop_filter("non-constant rows", |rows| {
            rows.iter().all(|r| r.iter().any(|&v| v != r[0]))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_monotonicity(a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // Distance falls as correlation rises.
        prop_assert!(correlation_distance(lo) > correlation_distance(hi));
        // Decay rises with distance.
        let (d1, d2) = (correlation_distance(hi), correlation_distance(lo));
        prop_assert!(distance_decay(d1) < distance_decay(d2));
    }

    #[test]
    fn graph_invariants_hold(rows in arb_panel(4, 12)) {
        let panel = returns_panel(rows);
        let g = build_market_graph(&panel).unwrap();
        let n = g.n();
        for i in 0..n {
            prop_assert_eq!(g.rho[[i, i]], 1.0);
            prop_assert_eq!(g.dist[[i, i]], 0.0);
            prop_assert_eq!(g.delta[[i, i]], 0.0);
            for j in 0..n {
                prop_assert_eq!(g.rho[[i, j]], g.rho[[j, i]]);
                prop_assert!((-1.0..=1.0).contains(&g.rho[[i, j]]));
                prop_assert!((0.0..=2.0).contains(&g.dist[[i, j]]));
                prop_assert!(g.delta[[i, j]] <= 1.0 - (-1.0f64).exp() + 1e-15);
                // delta = 1 - exp(-d/2) to relative error 1e-12.
                let expect = distance_decay(g.dist[[i, j]]);
                let err = (g.delta[[i, j]] - expect).abs();
                prop_assert!(err <= 1e-12 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn graph_permutation_equivariance(rows in arb_panel(4, 10)) {
        let panel = returns_panel(rows.clone());
        let g = build_market_graph(&panel).unwrap();

        // Reverse the asset order and rebuild.
        let perm: Vec<usize> = (0..rows.len()).rev().collect();
        let permuted = returns_panel(perm.iter().map(|&i| rows[i].clone()).collect());
        let gp = build_market_graph(&permuted).unwrap();

        for (pi, &i) in perm.iter().enumerate() {
            for (pj, &j) in perm.iter().enumerate() {
                prop_assert_eq!(g.rho[[i, j]], gp.rho[[pi, pj]]);
                prop_assert_eq!(g.dist[[i, j]], gp.dist[[pi, pj]]);
                prop_assert_eq!(g.delta[[i, j]], gp.delta[[pi, pj]]);
            }
        }
    }

    #[test]
    fn prices_round_trip_through_returns(
        prices in proptest::collection::vec(1.0f64..1000.0, 3..40)
    ) {
        let dates: Vec<NaiveDate> = (0..prices.len())
            .map(|i| NaiveDate::from_ymd_opt(2019, 1, 1).unwrap() + chrono::Days::new(i as u64))
            .collect();
        let panel = PricePanel::new(
            vec!["A".into()],
            dates,
            Array2::from_shape_vec((1, prices.len()), prices.clone()).unwrap(),
        )
        .unwrap();
        let rp = compute_log_returns(&panel, MissingPolicy::DropAsset).unwrap();
        prop_assert_eq!(rp.n_dates(), prices.len() - 1);
        let mut p = prices[0];
        for t in 0..rp.n_dates() {
            p *= rp.returns[[0, t]].exp();
        }
        let last = prices[prices.len() - 1];
        prop_assert!((p - last).abs() / last <= 1e-12);
    }

    #[test]
    fn delta_energy_consistency(seed in 0u64..500, n in 2usize..12) {
        let problem = tracker_core::synthetic::random_qubo(n, seed);
        let check = |z: &[u8]| {
            for i in 0..n {
                let mut flipped = z.to_vec();
                flipped[i] ^= 1;
                let oracle = problem.energy(&flipped).unwrap() - problem.energy(z).unwrap();
                let fast = problem.delta_energy(z, i).unwrap();
                prop_assert!((fast - oracle).abs() <= 1e-12);
            }
            Ok(())
        };
        if n <= 6 {
            // Small instances: every state.
            for m in 0u32..(1 << n) {
                let z: Vec<u8> = (0..n).map(|i| ((m >> i) & 1) as u8).collect();
                check(&z)?;
            }
        } else {
            let mut rng_state = seed.wrapping_mul(0x9E3779B97F4A7C15) | 1;
            let mut next_bit = move || {
                rng_state ^= rng_state << 13;
                rng_state ^= rng_state >> 7;
                rng_state ^= rng_state << 17;
                (rng_state & 1) as u8
            };
            for _ in 0..8 {
                let z: Vec<u8> = (0..n).map(|_| next_bit()).collect();
                check(&z)?;
            }
        }
    }

    #[test]
    fn penalty_identity(seed in 0u64..200, n in 2usize..9) {
        let delta = tracker_core::synthetic::delta_from_random_points(n, seed);
        let k = 1 + n / 3;
        let problem = build_kmedoid_qubo(&delta, k).unwrap();
        let gamma = problem.params().unwrap().gamma;
        let kf = k as f64;
        for m in 0u32..(1 << n) {
            let z: Vec<u8> = (0..n).map(|i| ((m >> i) & 1) as u8).collect();
            let e = problem.energy(&z).unwrap();
            let (penalty, medoid) = problem.cardinality_penalty_decomposition(&z).unwrap();
            let card = z.iter().filter(|&&b| b == 1).count() as f64;
            prop_assert!((penalty - gamma * ((card - kf).powi(2) - kf * kf)).abs() < 1e-12);
            prop_assert!((e - (penalty + medoid)).abs() < 1e-12);
        }
    }

    #[test]
    fn slice_year_idempotent_on_random_spans(offset in 0usize..300) {
        let panel = tracker_core::synthetic::cluster_panel(
            &tracker_core::synthetic::ClusterSpec {
                clusters: 1,
                assets_per_cluster: 2,
                factor_vol: 0.01,
                idio_vol: 0.005,
            },
            2015,
            2,
            offset as u64,
        );
        let once = tracker_core::slice_year(&panel, 2016).unwrap();
        let twice = tracker_core::slice_year(&once, 2016).unwrap();
        prop_assert_eq!(once.dates, twice.dates);
        prop_assert_eq!(once.returns, twice.returns);
    }
}

#[test]
fn zero_variance_asset_is_rejected_not_imputed() {
    let panel = returns_panel(vec![
        vec![0.01, 0.01, 0.01, 0.01],
        vec![0.01, -0.01, 0.02, 0.0],
    ]);
    assert!(matches!(
        pearson_correlation(&panel),
        Err(tracker_core::Error::DegenerateSeries(_))
    ));
}
