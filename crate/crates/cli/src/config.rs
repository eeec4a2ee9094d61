//! Run configuration: TOML file, flag overrides, and validation.
//!
//! Precedence, highest first: command-line flags, the `--config` file, the
//! `TRACKER_OUTPUT_DIR` environment variable (output directory only), then
//! built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tracker_core::{AnnealConfig, MissingPolicy, Weighting};

use crate::CliError;

/// Environment variable supplying the default output directory.
pub const OUTPUT_DIR_ENV: &str = "TRACKER_OUTPUT_DIR";

/// One fully resolved run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RunConfig {
    /// Price CSV (long `date,ticker,close` or wide `date,<tickers...>`).
    pub prices: Option<PathBuf>,
    /// Evaluation years; each fits on the preceding year.
    pub years: Vec<i32>,
    /// Portfolio cardinality.
    pub k: usize,
    /// Missing-quote policy applied at ingestion.
    pub missing_policy: MissingPolicy,
    /// Exemplar weighting scheme.
    pub weighting: Weighting,
    /// Annealer settings; the seed is the run's top-level seed.
    pub solver: AnnealConfig,
    /// Explicit `date,return` index series overriding the equal-weighted proxy.
    pub index_csv: Option<PathBuf>,
    /// Where output files go.
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            prices: None,
            years: vec![2016, 2017, 2018, 2019],
            k: 10,
            missing_policy: MissingPolicy::default(),
            weighting: Weighting::default(),
            solver: AnnealConfig::default(),
            index_csv: None,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Optional per-field overrides collected from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub prices: Option<PathBuf>,
    pub years: Option<Vec<i32>>,
    pub k: Option<usize>,
    pub missing_policy: Option<MissingPolicy>,
    pub weighting: Option<Weighting>,
    pub sweeps: Option<usize>,
    pub restarts: Option<usize>,
    pub seed: Option<u64>,
    pub t_initial: Option<f64>,
    pub t_final: Option<f64>,
    pub no_repair: bool,
    pub index_csv: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Parse a TOML config file.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        toml::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))
    }

    /// Layer a config file (if any) and flag overrides over the defaults.
    pub fn resolve(config_path: Option<&Path>, over: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match config_path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if cfg.output_dir == Self::default().output_dir && config_path.is_none() {
            if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
                if !dir.is_empty() {
                    cfg.output_dir = PathBuf::from(dir);
                }
            }
        }

        if let Some(v) = &over.prices {
            cfg.prices = Some(v.clone());
        }
        if let Some(v) = &over.years {
            cfg.years = v.clone();
        }
        if let Some(v) = over.k {
            cfg.k = v;
        }
        if let Some(v) = over.missing_policy {
            cfg.missing_policy = v;
        }
        if let Some(v) = over.weighting {
            cfg.weighting = v;
        }
        if let Some(v) = over.sweeps {
            cfg.solver.sweeps = v;
        }
        if let Some(v) = over.restarts {
            cfg.solver.restarts = v;
        }
        if let Some(v) = over.seed {
            cfg.solver.seed = v;
        }
        if let Some(v) = over.t_initial {
            cfg.solver.t_initial = Some(v);
        }
        if let Some(v) = over.t_final {
            cfg.solver.t_final = Some(v);
        }
        if over.no_repair {
            cfg.solver.repair = false;
        }
        if let Some(v) = &over.index_csv {
            cfg.index_csv = Some(v.clone());
        }
        if let Some(v) = &over.output_dir {
            cfg.output_dir = v.clone();
        }

        cfg.years.sort_unstable();
        cfg.years.dedup();
        Ok(cfg)
    }

    /// Check invariants and referenced paths.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.years.is_empty() {
            return Err(CliError::Invalid("years must not be empty".into()));
        }
        if self.k < 1 {
            return Err(CliError::Invalid("k must be at least 1".into()));
        }
        let prices = self.prices_path()?;
        if !prices.is_file() {
            return Err(CliError::Invalid(format!(
                "price file {} does not exist",
                prices.display()
            )));
        }
        if let Some(index) = &self.index_csv {
            if !index.is_file() {
                return Err(CliError::Invalid(format!(
                    "index file {} does not exist",
                    index.display()
                )));
            }
        }
        Ok(())
    }

    /// The price path, which every command needs.
    pub fn prices_path(&self) -> Result<&Path, CliError> {
        self.prices
            .as_deref()
            .ok_or_else(|| CliError::Invalid("no price file given (--prices or config)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_full_universe_scale() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.k, 10);
        assert_eq!(cfg.years, vec![2016, 2017, 2018, 2019]);
        assert_eq!(cfg.missing_policy, MissingPolicy::DropAsset);
        assert_eq!(cfg.weighting, Weighting::Equal);
    }

    #[test]
    fn toml_round_trip() {
        let text = r#"
prices = "data/prices.csv"
years = [2016, 2017]
k = 5
missing-policy = "forward-fill"
weighting = "cluster-size"
output-dir = "results"

[solver]
sweeps = 500
restarts = 8
seed = 7
repair = false
"#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.k, 5);
        assert_eq!(cfg.missing_policy, MissingPolicy::ForwardFill);
        assert_eq!(cfg.weighting, Weighting::ClusterSize);
        assert_eq!(cfg.solver.sweeps, 500);
        assert_eq!(cfg.solver.seed, 7);
        assert!(!cfg.solver.repair);

        let back = toml::to_string(&cfg).unwrap();
        let again: RunConfig = toml::from_str(&back).unwrap();
        assert_eq!(again.solver, cfg.solver);
        assert_eq!(again.years, cfg.years);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let err = toml::from_str::<RunConfig>("bogus = 1").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn overrides_win_over_defaults() {
        let over = Overrides {
            k: Some(3),
            years: Some(vec![2018, 2016, 2016]),
            seed: Some(99),
            no_repair: true,
            ..Default::default()
        };
        let cfg = RunConfig::resolve(None, &over).unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.years, vec![2016, 2018]); // sorted, deduped
        assert_eq!(cfg.solver.seed, 99);
        assert!(!cfg.solver.repair);
    }

    #[test]
    fn validation_requires_prices() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().is_err());
    }
}
