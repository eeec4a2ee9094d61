//! The complete weighted market graph.
//!
//! Stocks are vertices; edge weights come from return co-movement in three
//! steps: pairwise Pearson correlation `rho`, the distance transform
//! `d = sqrt(2(1 - rho))` mapping correlation into [0, 2], and the bounded
//! decay `delta = 1 - exp(-d/2)` whose matrix feeds the k-medoid QUBO.

use chrono::NaiveDate;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::ingest::ReturnsPanel;

/// Largest tolerated overshoot of |rho| beyond 1 before input is rejected.
pub const RHO_TOLERANCE: f64 = 1e-9;

/// Complete weighted graph over one fit window.
#[derive(Debug, Clone)]
pub struct MarketGraph {
    /// Tickers, one per vertex.
    pub assets: Vec<String>,
    /// Pearson correlations; symmetric, unit diagonal.
    pub rho: Array2<f64>,
    /// Distances `d = sqrt(2(1 - rho))`; symmetric, zero diagonal, in [0, 2].
    pub dist: Array2<f64>,
    /// Decayed distances `1 - exp(-d/2)`; symmetric, zero diagonal.
    pub delta: Array2<f64>,
    /// First date of the fit window.
    pub fit_start: NaiveDate,
    /// Last date of the fit window.
    pub fit_end: NaiveDate,
}

impl MarketGraph {
    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.assets.len()
    }
}

/// Scalar distance kernel `d = sqrt(2(1 - rho))`.
pub fn correlation_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).sqrt().clamp(0.0, 2.0)
}

/// Scalar decay kernel `delta = 1 - exp(-d/2)`.
pub fn distance_decay(d: f64) -> f64 {
    -(-d / 2.0).exp_m1()
}

/// Sample Pearson correlation matrix of the panel's return rows.
///
/// Fails with [`Error::DegenerateSeries`] if any asset has constant returns,
/// whose correlation is undefined.
pub fn pearson_correlation(panel: &ReturnsPanel) -> Result<Array2<f64>> {
    let n = panel.n_assets();
    let t = panel.n_dates();
    if t < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 return observations for correlation, got {t}"
        )));
    }

    // Center each row and accumulate its sum of squares.
    let mut centered = Array2::zeros((n, t));
    let mut sumsq = vec![0.0f64; n];
    for i in 0..n {
        let row = panel.returns.row(i);
        let first = row[0];
        let constant = row.iter().all(|&r| r == first);
        let mean = row.sum() / t as f64;
        let mut ss = 0.0;
        for s in 0..t {
            let c = row[s] - mean;
            centered[[i, s]] = c;
            ss += c * c;
        }
        if constant || ss == 0.0 {
            return Err(Error::DegenerateSeries(panel.assets[i].clone()));
        }
        sumsq[i] = ss;
    }

    let mut rho = Array2::zeros((n, n));
    for i in 0..n {
        rho[[i, i]] = 1.0;
        for j in (i + 1)..n {
            let mut cross = 0.0;
            for s in 0..t {
                cross += centered[[i, s]] * centered[[j, s]];
            }
            // The (t-1) denominators cancel in the ratio.
            let r = (cross / (sumsq[i] * sumsq[j]).sqrt()).clamp(-1.0, 1.0);
            rho[[i, j]] = r;
            rho[[j, i]] = r;
        }
    }
    Ok(rho)
}

fn check_square_symmetric(m: &Array2<f64>, what: &str) -> Result<usize> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!(
            "{what} matrix must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[[i, j]] - m[[j, i]]).abs() > 1e-12 {
                return Err(Error::Validation(format!(
                    "{what} matrix asymmetric at ({i}, {j}): {} vs {}",
                    m[[i, j]],
                    m[[j, i]]
                )));
            }
        }
    }
    Ok(n)
}

/// Distance matrix `d_ij = sqrt(2(1 - rho_ij))`.
///
/// Entries within [`RHO_TOLERANCE`] of the [-1, 1] range are clamped; larger
/// overshoots are rejected.
pub fn distance_from_correlation(rho: &Array2<f64>) -> Result<Array2<f64>> {
    let n = check_square_symmetric(rho, "correlation")?;
    let mut dist = Array2::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let r = rho[[i, j]];
            if r.abs() > 1.0 + RHO_TOLERANCE || r.is_nan() {
                return Err(Error::Validation(format!(
                    "correlation out of range at ({i}, {j}): {r}"
                )));
            }
            let d = correlation_distance(r.clamp(-1.0, 1.0));
            dist[[i, j]] = d;
            dist[[j, i]] = d;
        }
    }
    Ok(dist)
}

/// Decayed distance matrix `delta_ij = 1 - exp(-d_ij / 2)`.
pub fn robust_delta(dist: &Array2<f64>) -> Result<Array2<f64>> {
    let n = check_square_symmetric(dist, "distance")?;
    let mut delta = Array2::zeros((n, n));
    for i in 0..n {
        if dist[[i, i]] != 0.0 {
            return Err(Error::Validation(format!(
                "distance matrix has nonzero diagonal at {i}: {}",
                dist[[i, i]]
            )));
        }
        for j in i..n {
            let d = dist[[i, j]];
            if d < 0.0 || d.is_nan() {
                return Err(Error::Validation(format!(
                    "negative distance at ({i}, {j}): {d}"
                )));
            }
            let dd = distance_decay(d);
            delta[[i, j]] = dd;
            delta[[j, i]] = dd;
        }
    }
    Ok(delta)
}

/// Compose the three steps into a full market graph for one fit window.
pub fn build_market_graph(panel: &ReturnsPanel) -> Result<MarketGraph> {
    let rho = pearson_correlation(panel)?;
    let dist = distance_from_correlation(&rho)?;
    let delta = robust_delta(&dist)?;
    Ok(MarketGraph {
        assets: panel.assets.clone(),
        rho,
        dist,
        delta,
        fit_start: *panel.dates.first().expect("panel has dates"),
        fit_end: *panel.dates.last().expect("panel has dates"),
    })
}
