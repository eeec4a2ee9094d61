//! Price loading and log-return panels.
//!
//! Raw close prices arrive as CSV in one of two layouts:
//!
//! * long: header `date,ticker,close`, one quote per row;
//! * wide: header `date,<ticker1>,<ticker2>,...`, empty cell = missing quote.
//!
//! [`load_prices`] produces a [`PricePanel`] over the union of quoted dates,
//! with holes where an asset lacks a quote. [`compute_log_returns`] applies a
//! [`MissingPolicy`] and turns the hole-free remainder into a [`ReturnsPanel`]
//! of daily log returns, which [`slice_year`] restricts to calendar years.

use std::io::Read;
use std::path::Path;

use chrono::{Datelike, NaiveDate};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How to make a panel with missing quotes hole-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop every asset that is not quoted on every panel date.
    #[default]
    DropAsset,
    /// Fill holes with the last prior quote; assets with no quote before
    /// their first hole are dropped.
    ForwardFill,
    /// Drop every date on which at least one asset is unquoted.
    DropDate,
}

impl MissingPolicy {
    /// Stable CLI/config spelling of the variant.
    pub fn as_str(&self) -> &'static str {
        match self {
            MissingPolicy::DropAsset => "drop-asset",
            MissingPolicy::ForwardFill => "forward-fill",
            MissingPolicy::DropDate => "drop-date",
        }
    }
}

impl std::str::FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-asset" => Ok(MissingPolicy::DropAsset),
            "forward-fill" => Ok(MissingPolicy::ForwardFill),
            "drop-date" => Ok(MissingPolicy::DropDate),
            other => Err(Error::Parameter(format!(
                "unknown missing-data policy `{other}` (expected drop-asset, forward-fill or drop-date)"
            ))),
        }
    }
}

/// Daily close prices, assets x dates. `NaN` marks a missing quote.
#[derive(Debug, Clone)]
pub struct PricePanel {
    /// Unique ticker per row, in input order.
    pub assets: Vec<String>,
    /// Strictly increasing calendar dates, one per column.
    pub dates: Vec<NaiveDate>,
    /// Close prices; strictly positive wherever present.
    pub prices: Array2<f64>,
}

impl PricePanel {
    /// Build a panel, checking the type invariants.
    pub fn new(assets: Vec<String>, dates: Vec<NaiveDate>, prices: Array2<f64>) -> Result<Self> {
        if prices.nrows() != assets.len() || prices.ncols() != dates.len() {
            return Err(Error::Dimension(format!(
                "price matrix is {}x{} but panel has {} assets and {} dates",
                prices.nrows(),
                prices.ncols(),
                assets.len(),
                dates.len()
            )));
        }
        for w in dates.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::Validation(format!(
                    "dates not strictly increasing: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for a in &assets {
            if !seen.insert(a.as_str()) {
                return Err(Error::Validation(format!("duplicate asset id {a}")));
            }
        }
        for (i, asset) in assets.iter().enumerate() {
            for (t, date) in dates.iter().enumerate() {
                let p = prices[[i, t]];
                if !p.is_nan() && p <= 0.0 {
                    return Err(Error::Validation(format!(
                        "non-positive price {p} for asset {asset} on {date}"
                    )));
                }
            }
        }
        Ok(Self {
            assets,
            dates,
            prices,
        })
    }

    /// Number of assets.
    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// Number of dates.
    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }
}

/// Daily log returns, assets x dates, hole-free.
///
/// A return is labelled with the date it is realized on: `returns[[i, t]]`
/// is `ln(P(dates[t]) / P(previous date))`.
#[derive(Debug, Clone)]
pub struct ReturnsPanel {
    /// Unique ticker per row.
    pub assets: Vec<String>,
    /// Strictly increasing dates, one per return column.
    pub dates: Vec<NaiveDate>,
    /// Daily log returns.
    pub returns: Array2<f64>,
}

impl ReturnsPanel {
    /// Number of assets.
    pub fn n_assets(&self) -> usize {
        self.assets.len()
    }

    /// Number of return observations per asset.
    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    /// Row index of `ticker`, if present.
    pub fn asset_index(&self, ticker: &str) -> Option<usize> {
        self.assets.iter().position(|a| a == ticker)
    }
}

/// Load a price CSV (long or wide layout) from a file.
pub fn load_prices<P: AsRef<Path>>(path: P) -> Result<PricePanel> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| {
        Error::Validation(format!(
            "cannot open price file {}: {e}",
            path.as_ref().display()
        ))
    })?;
    load_prices_from_reader(file)
}

/// Load a price CSV from any reader. Layout is detected from the header.
pub fn load_prices_from_reader<R: Read>(reader: R) -> Result<PricePanel> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::MalformedInput {
            line: 1,
            reason: format!("cannot read header: {e}"),
        })?
        .clone();
    let cols: Vec<String> = headers.iter().map(|h| h.to_string()).collect();

    if cols.is_empty() || !cols[0].eq_ignore_ascii_case("date") {
        return Err(Error::MalformedInput {
            line: 1,
            reason: "first column must be `date`".into(),
        });
    }

    let is_long = cols.len() == 3
        && cols[1].eq_ignore_ascii_case("ticker")
        && cols[2].eq_ignore_ascii_case("close");
    if is_long {
        load_long(rdr)
    } else if cols.len() >= 2 {
        load_wide(rdr, &cols[1..])
    } else {
        Err(Error::MalformedInput {
            line: 1,
            reason: "expected `date,ticker,close` or `date,<tickers...>`".into(),
        })
    }
}

fn parse_date(s: &str, line: u64) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| Error::MalformedInput {
        line,
        reason: format!("invalid ISO-8601 date `{s}`"),
    })
}

fn parse_price(s: &str, line: u64) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::MalformedInput {
        line,
        reason: format!("invalid price `{s}`"),
    })
}

fn record_line(rec: &csv::StringRecord) -> u64 {
    rec.position().map(|p| p.line()).unwrap_or(0)
}

fn load_long<R: Read>(mut rdr: csv::Reader<R>) -> Result<PricePanel> {
    // (asset, date) -> (price, line)
    let mut quotes: std::collections::HashMap<(usize, NaiveDate), f64> =
        std::collections::HashMap::new();
    let mut assets: Vec<String> = Vec::new();
    let mut asset_idx: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    let mut dates: std::collections::BTreeSet<NaiveDate> = std::collections::BTreeSet::new();

    for rec in rdr.records() {
        let rec = rec.map_err(csv_parse_error)?;
        let line = record_line(&rec);
        if rec.len() != 3 {
            return Err(Error::MalformedInput {
                line,
                reason: format!("expected 3 fields, got {}", rec.len()),
            });
        }
        let date = parse_date(&rec[0], line)?;
        let ticker = rec[1].to_string();
        if ticker.is_empty() {
            return Err(Error::MalformedInput {
                line,
                reason: "empty ticker".into(),
            });
        }
        let price = parse_price(&rec[2], line)?;
        if price <= 0.0 {
            return Err(Error::Validation(format!(
                "non-positive price {price} for asset {ticker} on {date}"
            )));
        }
        let idx = *asset_idx.entry(ticker.clone()).or_insert_with(|| {
            assets.push(ticker);
            assets.len() - 1
        });
        if quotes.insert((idx, date), price).is_some() {
            return Err(Error::MalformedInput {
                line,
                reason: format!("duplicate quote for asset {} on {date}", assets[idx]),
            });
        }
        dates.insert(date);
    }

    if assets.is_empty() {
        return Err(Error::InsufficientData("price file has no rows".into()));
    }
    let dates: Vec<NaiveDate> = dates.into_iter().collect();
    let date_idx: std::collections::HashMap<NaiveDate, usize> =
        dates.iter().enumerate().map(|(t, d)| (*d, t)).collect();
    let mut prices = Array2::from_elem((assets.len(), dates.len()), f64::NAN);
    for ((i, date), price) in quotes {
        prices[[i, date_idx[&date]]] = price;
    }
    PricePanel::new(assets, dates, prices)
}

fn load_wide<R: Read>(mut rdr: csv::Reader<R>, tickers: &[String]) -> Result<PricePanel> {
    let mut seen = std::collections::HashSet::new();
    for t in tickers {
        if t.is_empty() {
            return Err(Error::MalformedInput {
                line: 1,
                reason: "empty ticker column in header".into(),
            });
        }
        if !seen.insert(t.as_str()) {
            return Err(Error::MalformedInput {
                line: 1,
                reason: format!("duplicate ticker column {t}"),
            });
        }
    }

    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_parse_error)?;
        let line = record_line(&rec);
        if rec.len() != tickers.len() + 1 {
            return Err(Error::MalformedInput {
                line,
                reason: format!("expected {} fields, got {}", tickers.len() + 1, rec.len()),
            });
        }
        let date = parse_date(&rec[0], line)?;
        let mut row = Vec::with_capacity(tickers.len());
        for (j, field) in rec.iter().skip(1).enumerate() {
            if field.is_empty() {
                row.push(f64::NAN);
            } else {
                let price = parse_price(field, line)?;
                if price <= 0.0 {
                    return Err(Error::Validation(format!(
                        "non-positive price {price} for asset {} on {date}",
                        tickers[j]
                    )));
                }
                row.push(price);
            }
        }
        rows.push((date, row));
    }
    if rows.is_empty() {
        return Err(Error::InsufficientData("price file has no rows".into()));
    }
    rows.sort_by_key(|(d, _)| *d);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::Validation(format!("duplicate date {}", w[0].0)));
        }
    }

    let dates: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
    let mut prices = Array2::from_elem((tickers.len(), dates.len()), f64::NAN);
    for (t, (_, row)) in rows.iter().enumerate() {
        for (i, &p) in row.iter().enumerate() {
            prices[[i, t]] = p;
        }
    }
    PricePanel::new(tickers.to_vec(), dates, prices)
}

fn csv_parse_error(e: csv::Error) -> Error {
    let line = match e.position() {
        Some(p) => p.line(),
        None => 0,
    };
    Error::MalformedInput {
        line,
        reason: e.to_string(),
    }
}

/// Apply `policy` and compute daily log returns.
///
/// Returns are `ln(P(t+1) / P(t))` over consecutive retained dates; the
/// output panel is hole-free.
pub fn compute_log_returns(panel: &PricePanel, policy: MissingPolicy) -> Result<ReturnsPanel> {
    let (assets, dates, prices) = apply_policy(panel, policy)?;

    if assets.is_empty() {
        return Err(Error::InsufficientData(
            "no asset survived the missing-data policy".into(),
        ));
    }
    if dates.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} price date(s) after policy; need at least 2 to form a return",
            dates.len()
        )));
    }

    let n = assets.len();
    let t = dates.len();
    let mut returns = Array2::zeros((n, t - 1));
    for i in 0..n {
        for s in 0..t - 1 {
            returns[[i, s]] = (prices[[i, s + 1]] / prices[[i, s]]).ln();
        }
    }
    Ok(ReturnsPanel {
        assets,
        dates: dates[1..].to_vec(),
        returns,
    })
}

fn apply_policy(
    panel: &PricePanel,
    policy: MissingPolicy,
) -> Result<(Vec<String>, Vec<NaiveDate>, Array2<f64>)> {
    let n = panel.n_assets();
    let t = panel.n_dates();
    match policy {
        MissingPolicy::DropAsset => {
            let keep: Vec<usize> = (0..n)
                .filter(|&i| (0..t).all(|s| !panel.prices[[i, s]].is_nan()))
                .collect();
            Ok(select(panel, &keep, &(0..t).collect::<Vec<_>>()))
        }
        MissingPolicy::DropDate => {
            let keep_dates: Vec<usize> = (0..t)
                .filter(|&s| (0..n).all(|i| !panel.prices[[i, s]].is_nan()))
                .collect();
            Ok(select(panel, &(0..n).collect::<Vec<_>>(), &keep_dates))
        }
        MissingPolicy::ForwardFill => {
            let mut filled = panel.prices.clone();
            for i in 0..n {
                let mut last = f64::NAN;
                for s in 0..t {
                    if filled[[i, s]].is_nan() {
                        filled[[i, s]] = last;
                    } else {
                        last = filled[[i, s]];
                    }
                }
            }
            // Leading holes cannot be filled; those assets are dropped.
            let keep: Vec<usize> = (0..n).filter(|&i| !filled[[i, 0]].is_nan()).collect();
            let tmp = PricePanel {
                assets: panel.assets.clone(),
                dates: panel.dates.clone(),
                prices: filled,
            };
            Ok(select(&tmp, &keep, &(0..t).collect::<Vec<_>>()))
        }
    }
}

fn select(
    panel: &PricePanel,
    asset_idx: &[usize],
    date_idx: &[usize],
) -> (Vec<String>, Vec<NaiveDate>, Array2<f64>) {
    let assets: Vec<String> = asset_idx.iter().map(|&i| panel.assets[i].clone()).collect();
    let dates: Vec<NaiveDate> = date_idx.iter().map(|&s| panel.dates[s]).collect();
    let mut prices = Array2::zeros((asset_idx.len(), date_idx.len()));
    for (row, &i) in asset_idx.iter().enumerate() {
        for (col, &s) in date_idx.iter().enumerate() {
            prices[[row, col]] = panel.prices[[i, s]];
        }
    }
    (assets, dates, prices)
}

/// Restrict a returns panel to the dates of one calendar year.
pub fn slice_year(panel: &ReturnsPanel, year: i32) -> Result<ReturnsPanel> {
    let keep: Vec<usize> = panel
        .dates
        .iter()
        .enumerate()
        .filter(|(_, d)| d.year() == year)
        .map(|(t, _)| t)
        .collect();
    if keep.is_empty() {
        return Err(Error::NoDataForYear(year));
    }
    let dates: Vec<NaiveDate> = keep.iter().map(|&t| panel.dates[t]).collect();
    let mut returns = Array2::zeros((panel.n_assets(), keep.len()));
    for i in 0..panel.n_assets() {
        for (col, &t) in keep.iter().enumerate() {
            returns[[i, col]] = panel.returns[[i, t]];
        }
    }
    Ok(ReturnsPanel {
        assets: panel.assets.clone(),
        dates,
        returns,
    })
}
