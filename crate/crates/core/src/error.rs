//! Error type shared across the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes of the tracking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Input file could not be parsed.
    #[error("malformed input at line {line}: {reason}")]
    MalformedInput { line: u64, reason: String },

    /// Input parsed but violates a domain constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// Not enough observations to carry out the requested computation.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A year slice came back empty.
    #[error("no data for year {0}")]
    NoDataForYear(i32),

    /// An asset has zero return variance; its correlations are undefined.
    #[error("degenerate series: asset {0} has zero return variance")]
    DegenerateSeries(String),

    /// A model parameter is out of its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Vector/matrix shapes do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Operation needs k-medoid parameters the problem does not carry.
    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),

    /// Exhaustive enumeration refused to run.
    #[error("problem too large for exhaustive search: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    /// Solver configuration is invalid.
    #[error("solver config error: {0}")]
    Config(String),

    /// Requested tickers are absent from the panel.
    #[error("exemplar mismatch: {0}")]
    Mismatch(String),

    /// Two series that must share a date axis do not.
    #[error("alignment error: {0}")]
    Alignment(String),

    /// Regression input has a constant regressor.
    #[error("degenerate regressor: {0}")]
    DegenerateRegressor(String),

    /// A backtest year lacks its preceding fit year.
    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
