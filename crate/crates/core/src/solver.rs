//! QUBO minimization: simulated annealing with restarts, an exhaustive
//! oracle for small instances, and a greedy cardinality repair step.
//!
//! Determinism contract: a fixed `(problem, config)` pair, seed included,
//! yields a bit-identical [`SolveResult`] regardless of how many threads the
//! restarts run on. Every restart owns an independent counter-mode RNG
//! stream derived from the seed and the restart index, and results are
//! merged in restart order.

use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{QuboProblem, Selection};

/// Hard cap on exhaustive enumeration (2^n states).
pub const MAX_EXHAUSTIVE_VARS: usize = 25;

/// Cooling schedule shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Temperature decays by a constant factor per sweep.
    #[default]
    Geometric,
}

/// Simulated-annealing configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct AnnealConfig {
    /// Full single-bit-flip passes over the state vector per restart.
    pub sweeps: usize,
    /// Independent annealing runs; the best result wins.
    pub restarts: usize,
    /// Starting temperature. `None` calibrates it to the 90th percentile of
    /// |delta energy| sampled at a random state, so early moves accept freely.
    pub t_initial: Option<f64>,
    /// Final temperature. `None` uses `1e-3 * t_initial`.
    pub t_final: Option<f64>,
    /// Cooling schedule.
    pub schedule: Schedule,
    /// Seed for all randomness in the solve.
    pub seed: u64,
    /// Greedily restore `sum z = k` on each restart's best state.
    pub repair: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            restarts: 16,
            t_initial: None,
            t_final: None,
            schedule: Schedule::Geometric,
            seed: 0,
            repair: true,
        }
    }
}

impl AnnealConfig {
    fn validate(&self) -> Result<()> {
        if self.sweeps < 1 {
            return Err(Error::Config("sweeps must be at least 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if let Some(ti) = self.t_initial {
            if ti <= 0.0 || ti.is_nan() {
                return Err(Error::Config(format!(
                    "t_initial must be positive, got {ti}"
                )));
            }
        }
        if let Some(tf) = self.t_final {
            if tf <= 0.0 || tf.is_nan() {
                return Err(Error::Config(format!("t_final must be positive, got {tf}")));
            }
        }
        if let (Some(ti), Some(tf)) = (self.t_initial, self.t_final) {
            if ti < tf {
                return Err(Error::Config(format!(
                    "t_initial ({ti}) must be >= t_final ({tf})"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Best selection found.
    pub best: Selection,
    /// Energy of `best`, re-evaluated from scratch at the end.
    pub best_energy: f64,
    /// Whether `best` hits the target cardinality (always true for problems
    /// without k-medoid parameters).
    pub feasible: bool,
    /// Running best energy after each restart, non-increasing.
    pub energy_trace: Option<Vec<f64>>,
    /// Wall-clock time of the solve.
    pub wall_time: Duration,
    /// The seed the solve ran with.
    pub seed_used: u64,
}

/// SplitMix64-style mix of a base seed and a stream label.
///
/// Used to hand each backtest year (and any other named consumer) its own
/// reproducible seed derived from the single top-level seed.
pub fn derive_stream_seed(base: u64, label: u64) -> u64 {
    let mut x = base ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn is_feasible(problem: &QuboProblem, selection: &Selection) -> bool {
    problem
        .params()
        .is_none_or(|p| selection.cardinality() == p.k)
}

/// True global minimum by enumeration of all 2^n states.
///
/// Ties are broken toward the lexicographically smallest state vector.
/// Refuses instances with more than [`MAX_EXHAUSTIVE_VARS`] variables.
pub fn solve_exhaustive(problem: &QuboProblem) -> Result<SolveResult> {
    let start = Instant::now();
    let n = problem.n();
    if n > MAX_EXHAUSTIVE_VARS {
        return Err(Error::TooLarge {
            n,
            limit: MAX_EXHAUSTIVE_VARS,
        });
    }
    if n == 0 {
        return Err(Error::Dimension("problem has no variables".into()));
    }

    // Gray-code walk: consecutive states differ by one bit, so each step
    // costs one delta evaluation.
    let mut z = vec![0u8; n];
    let mut energy = problem.offset();
    let mut best_z = z.clone();
    let mut best_energy = energy;
    for m in 1u64..(1u64 << n) {
        let bit = m.trailing_zeros() as usize;
        energy += problem.delta_energy_unchecked(&z, bit);
        z[bit] ^= 1;
        if energy < best_energy || (energy == best_energy && z < best_z) {
            best_energy = energy;
            best_z.copy_from_slice(&z);
        }
    }

    let best = Selection::from_z(best_z)?;
    let best_energy = problem.energy(best.z())?;
    Ok(SolveResult {
        feasible: is_feasible(problem, &best),
        best,
        best_energy,
        energy_trace: None,
        wall_time: start.elapsed(),
        seed_used: 0,
    })
}

/// Resolve the temperature endpoints, calibrating when unset.
///
/// Calibration samples a uniform random state on its own RNG stream and
/// takes the 90th percentile of |delta energy| over all bits.
fn resolve_temperatures(problem: &QuboProblem, config: &AnnealConfig) -> (f64, f64) {
    let t_initial = config.t_initial.unwrap_or_else(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(0);
        let n = problem.n();
        let z: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
        let mut mags: Vec<f64> = (0..n)
            .map(|i| problem.delta_energy_unchecked(&z, i).abs())
            .collect();
        mags.sort_by(|a, b| a.total_cmp(b));
        let idx = ((n as f64 * 0.9).ceil() as usize).clamp(1, n) - 1;
        let pct = mags[idx];
        if pct > 0.0 {
            pct
        } else {
            1.0
        }
    });
    let t_final = config.t_final.unwrap_or(1e-3 * t_initial).min(t_initial);
    (t_initial, t_final)
}

struct RestartOutcome {
    z: Vec<u8>,
    energy: f64,
}

/// One annealing run on its own RNG stream.
fn run_restart(
    problem: &QuboProblem,
    config: &AnnealConfig,
    t_initial: f64,
    t_final: f64,
    restart: usize,
) -> RestartOutcome {
    let n = problem.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(restart as u64 + 1);

    let mut z: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();

    // coupling[i] = 2 * sum_{j != i} Q_ij z_j, kept incrementally so each
    // proposal costs O(1) and each accepted flip costs O(n).
    let q = problem.q();
    let c = problem.c();
    let mut coupling = vec![0.0f64; n];
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            if j != i && z[j] == 1 {
                s += q[[i, j]];
            }
        }
        coupling[i] = 2.0 * s;
    }
    let mut energy = problem.energy_unchecked(&z);
    let mut best_z = z.clone();
    let mut best_energy = energy;

    let cool = if config.sweeps > 1 {
        (t_final / t_initial).powf(1.0 / (config.sweeps as f64 - 1.0))
    } else {
        1.0
    };
    let mut temperature = t_initial;

    for _ in 0..config.sweeps {
        for i in 0..n {
            let delta = (1.0 - 2.0 * z[i] as f64) * (q[[i, i]] + c[i] + coupling[i]);
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                let sign = if z[i] == 0 { 2.0 } else { -2.0 };
                z[i] ^= 1;
                energy += delta;
                for j in 0..n {
                    if j != i {
                        coupling[j] += sign * q[[j, i]];
                    }
                }
                if energy < best_energy {
                    best_energy = energy;
                    best_z.copy_from_slice(&z);
                }
            }
        }
        temperature *= cool;
    }

    if config.repair && problem.params().is_some() {
        let repaired =
            repair_cardinality(problem, &best_z).expect("repair on a valid state cannot fail");
        best_z = repaired.z().to_vec();
    }
    // Re-evaluate from scratch; the incremental sum is only a tracker.
    let energy = problem.energy_unchecked(&best_z);
    RestartOutcome { z: best_z, energy }
}

/// Minimize by Metropolis annealing over single-bit flips, best of
/// `config.restarts` independent runs.
pub fn solve_anneal(problem: &QuboProblem, config: &AnnealConfig) -> Result<SolveResult> {
    let start = Instant::now();
    config.validate()?;
    let n = problem.n();
    if n == 0 {
        return Err(Error::Dimension("problem has no variables".into()));
    }
    let (t_initial, t_final) = resolve_temperatures(problem, config);

    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(problem, config, t_initial, t_final, r))
        .collect();

    // Merge in restart order; ties go to the lexicographically smaller state.
    let mut trace = Vec::with_capacity(outcomes.len());
    let mut best: Option<&RestartOutcome> = None;
    for outcome in &outcomes {
        let better = match best {
            None => true,
            Some(b) => outcome.energy < b.energy || (outcome.energy == b.energy && outcome.z < b.z),
        };
        if better {
            best = Some(outcome);
        }
        trace.push(best.expect("set above").energy);
    }
    let best = best.expect("at least one restart");

    let selection = Selection::from_z(best.z.clone())?;
    let best_energy = problem.energy(selection.z())?;
    Ok(SolveResult {
        feasible: is_feasible(problem, &selection),
        best: selection,
        best_energy,
        energy_trace: Some(trace),
        wall_time: start.elapsed(),
        seed_used: config.seed,
    })
}

/// Greedily add or remove exemplars until `sum z = k`.
///
/// Each step flips the bit whose energy change is most favorable; ties are
/// resolved toward the lexicographically smallest resulting state (smallest
/// index when clearing, largest when setting).
pub fn repair_cardinality(problem: &QuboProblem, z: &[u8]) -> Result<Selection> {
    let k = problem
        .params()
        .ok_or_else(|| {
            Error::UnsupportedProblem("cardinality repair needs the k-medoid parameters".into())
        })?
        .k;
    problem.energy(z)?; // validates length and binariness
    let mut z = z.to_vec();
    let mut cardinality: usize = z.iter().map(|&b| b as usize).sum();

    while cardinality != k {
        let clearing = cardinality > k;
        let mut chosen: Option<(usize, f64)> = None;
        for i in 0..z.len() {
            let candidate = if clearing { z[i] == 1 } else { z[i] == 0 };
            if !candidate {
                continue;
            }
            let delta = problem.delta_energy_unchecked(&z, i);
            let replace = match chosen {
                None => true,
                Some((best_i, best_delta)) => {
                    delta < best_delta
                        || (delta == best_delta && if clearing { i < best_i } else { i > best_i })
                }
            };
            if replace {
                chosen = Some((i, delta));
            }
        }
        let (i, _) = chosen.expect("cardinality != k leaves at least one candidate");
        z[i] ^= 1;
        if clearing {
            cardinality -= 1;
        } else {
            cardinality += 1;
        }
    }
    Selection::from_z(z)
}
