//! Replicate a broad equity index with a small tracking portfolio.
//!
//! The pipeline models an index universe as a complete weighted market
//! graph built from return correlations, selects k exemplar stocks by
//! annealing a k-medoid QUBO, and scores the exemplar portfolio
//! out-of-sample with tracking error and regression beta.
//!
//! Modules follow the pipeline stages:
//!
//! * [`ingest`] - price CSV loading and log-return panels
//! * [`market_graph`] - correlations, distances and the decayed
//!   dissimilarity matrix
//! * [`qubo`] - the k-medoid binary quadratic model and energy evaluation
//! * [`solver`] - simulated annealing with restarts, an exhaustive oracle
//!   and cardinality repair
//! * [`backtest`] - portfolio construction and tracking metrics
//! * [`synthetic`] - seeded instance generators for tests and benchmarks

pub mod backtest;
pub mod error;
pub mod ingest;
pub mod market_graph;
pub mod qubo;
pub mod solver;
pub mod synthetic;

pub use backtest::{
    beta_regression, index_returns, portfolio_returns, run_annual_backtest, run_year,
    tracking_error, BacktestParams, IndexSeries, Regression, TrackingReport, Weighting,
    YearOutcome,
};
pub use error::{Error, Result};
pub use ingest::{
    compute_log_returns, load_prices, load_prices_from_reader, slice_year, MissingPolicy,
    PricePanel, ReturnsPanel,
};
pub use market_graph::{
    build_market_graph, distance_from_correlation, pearson_correlation, robust_delta, MarketGraph,
};
pub use qubo::{
    build_kmedoid_qubo, build_kmedoid_qubo_with, KmedoidParams, QuboProblem, Selection,
};
pub use solver::{
    derive_stream_seed, repair_cardinality, solve_anneal, solve_exhaustive, AnnealConfig, Schedule,
    SolveResult,
};
