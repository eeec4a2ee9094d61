//! Seeded synthetic instances for tests, benchmarks and demos.
//!
//! The price generator follows a latent-factor model: assets in the same
//! cluster share a daily factor return and differ by idiosyncratic noise,
//! which gives the market graph a clean block structure to recover.

use chrono::{Datelike, NaiveDate, Weekday};
use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::ingest::PricePanel;
use crate::market_graph::distance_decay;

/// Shape of a clustered synthetic universe.
#[derive(Debug, Clone, Copy)]
pub struct ClusterSpec {
    /// Number of latent factors.
    pub clusters: usize,
    /// Assets driven by each factor.
    pub assets_per_cluster: usize,
    /// Daily factor volatility.
    pub factor_vol: f64,
    /// Daily idiosyncratic volatility.
    pub idio_vol: f64,
}

/// Standard normal draws via Box-Muller, one RNG stream per caller.
pub(crate) fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Weekdays of `years` consecutive calendar years starting at `start_year`.
pub fn business_days(start_year: i32, years: usize) -> Vec<NaiveDate> {
    let start = NaiveDate::from_ymd_opt(start_year, 1, 1).expect("valid year");
    let end = NaiveDate::from_ymd_opt(start_year + years as i32 - 1, 12, 31).expect("valid year");
    let mut dates = Vec::new();
    let mut d = start;
    while d <= end {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            dates.push(d);
        }
        d = d
            .succ_opt()
            .expect("date range is far from the calendar limits");
    }
    dates
}

/// Price panel over `years` calendar years of weekdays, driven by the
/// cluster model. Deterministic in `seed`.
pub fn cluster_prices(spec: &ClusterSpec, start_year: i32, years: usize, seed: u64) -> PricePanel {
    let n = spec.clusters * spec.assets_per_cluster;
    let dates = business_days(start_year, years);
    let t = dates.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Factor and idiosyncratic log returns for t-1 transitions.
    let mut returns = Array2::zeros((n, t - 1));
    for s in 0..t - 1 {
        let factors: Vec<f64> = (0..spec.clusters)
            .map(|_| spec.factor_vol * standard_normal(&mut rng))
            .collect();
        for i in 0..n {
            let cluster = i / spec.assets_per_cluster;
            returns[[i, s]] = factors[cluster] + spec.idio_vol * standard_normal(&mut rng);
        }
    }

    let mut prices = Array2::zeros((n, t));
    for i in 0..n {
        prices[[i, 0]] = 100.0;
        for s in 1..t {
            prices[[i, s]] = prices[[i, s - 1]] * returns[[i, s - 1]].exp();
        }
    }
    let assets = (0..n).map(|i| format!("S{i:03}")).collect();
    PricePanel::new(assets, dates, prices).expect("generated panel is valid")
}

/// Returns panel for the cluster model, skipping the price detour.
pub fn cluster_panel(
    spec: &ClusterSpec,
    start_year: i32,
    years: usize,
    seed: u64,
) -> crate::ingest::ReturnsPanel {
    let prices = cluster_prices(spec, start_year, years, seed);
    crate::ingest::compute_log_returns(&prices, crate::ingest::MissingPolicy::DropAsset)
        .expect("generated panel is hole-free")
}

/// Dissimilarity matrix of `n` uniform random points in the unit square:
/// Euclidean distances passed through the bounded decay transform.
pub fn delta_from_random_points(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let mut delta = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            let d = distance_decay((dx * dx + dy * dy).sqrt());
            delta[[i, j]] = d;
            delta[[j, i]] = d;
        }
    }
    delta
}

/// A dense random generic QUBO with coefficients uniform in [-1, 1].
pub fn random_qubo(n: usize, seed: u64) -> crate::qubo::QuboProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Array2::zeros((n, n));
    for i in 0..n {
        q[[i, i]] = rng.random_range(-1.0..1.0);
        for j in (i + 1)..n {
            let v = rng.random_range(-1.0..1.0);
            q[[i, j]] = v;
            q[[j, i]] = v;
        }
    }
    let c = ndarray::Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0)));
    crate::qubo::QuboProblem::new(q, c, rng.random_range(-1.0..1.0))
        .expect("symmetric by construction")
}
