//! File formats written and read by the CLI.
//!
//! All floats are written with Rust's shortest round-trip formatting, so
//! re-reading a file reproduces the exact bit pattern and identical runs
//! produce byte-identical outputs.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use ndarray::Array2;
use tracker_core::{Error, ReturnsPanel, TrackingReport};

use crate::CliError;

/// Write a square matrix CSV with ticker row/column headers.
pub fn write_matrix_csv(path: &Path, assets: &[String], m: &Array2<f64>) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    write!(w, "ticker").map_err(io_err(path))?;
    for a in assets {
        write!(w, ",{a}").map_err(io_err(path))?;
    }
    writeln!(w).map_err(io_err(path))?;
    for (i, a) in assets.iter().enumerate() {
        write!(w, "{a}").map_err(io_err(path))?;
        for j in 0..assets.len() {
            write!(w, ",{}", m[[i, j]]).map_err(io_err(path))?;
        }
        writeln!(w).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Read a matrix CSV written by [`write_matrix_csv`].
pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, Array2<f64>), CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr.headers().map_err(csv_err(path))?.clone();
    let assets: Vec<String> = headers.iter().skip(1).map(|s| s.to_string()).collect();
    let n = assets.len();
    if n == 0 {
        return Err(CliError::Data(format!(
            "{}: matrix CSV has no ticker columns",
            path.display()
        )));
    }
    let mut m = Array2::zeros((n, n));
    let mut row = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err(path))?;
        if row >= n {
            return Err(CliError::Data(format!(
                "{}: more rows than ticker columns",
                path.display()
            )));
        }
        if rec.len() != n + 1 {
            return Err(CliError::Data(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                row + 2,
                rec.len(),
                n + 1
            )));
        }
        if rec[0] != assets[row] {
            return Err(CliError::Data(format!(
                "{}: row header {} does not match column header {}",
                path.display(),
                &rec[0],
                assets[row]
            )));
        }
        for j in 0..n {
            m[[row, j]] = rec[j + 1].parse().map_err(|_| {
                CliError::Data(format!(
                    "{}: bad number `{}` at row {}",
                    path.display(),
                    &rec[j + 1],
                    row + 2
                ))
            })?;
        }
        row += 1;
    }
    if row != n {
        return Err(CliError::Data(format!(
            "{}: {} rows for {} ticker columns",
            path.display(),
            row,
            n
        )));
    }
    Ok((assets, m))
}

/// Write a returns panel as a wide `date,<tickers...>` CSV.
pub fn write_returns_csv(path: &Path, panel: &ReturnsPanel) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    write!(w, "date").map_err(io_err(path))?;
    for a in &panel.assets {
        write!(w, ",{a}").map_err(io_err(path))?;
    }
    writeln!(w).map_err(io_err(path))?;
    for (t, date) in panel.dates.iter().enumerate() {
        write!(w, "{date}").map_err(io_err(path))?;
        for i in 0..panel.n_assets() {
            write!(w, ",{}", panel.returns[[i, t]]).map_err(io_err(path))?;
        }
        writeln!(w).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write one exemplar ticker per row under a `ticker` header.
pub fn write_exemplars_csv(path: &Path, tickers: &[String]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "ticker").map_err(io_err(path))?;
    for t in tickers {
        writeln!(w, "{t}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Read an exemplar list written by [`write_exemplars_csv`].
pub fn read_exemplars_csv(path: &Path) -> Result<Vec<String>, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    match lines.next() {
        Some(Ok(header)) if header.trim() == "ticker" => {}
        _ => {
            return Err(CliError::Data(format!(
                "{}: expected a `ticker` header",
                path.display()
            )))
        }
    }
    let mut tickers = Vec::new();
    for line in lines {
        let line = line.map_err(io_err(path))?;
        let t = line.trim();
        if !t.is_empty() {
            tickers.push(t.to_string());
        }
    }
    if tickers.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no exemplars listed",
            path.display()
        )));
    }
    Ok(tickers)
}

/// Header of the per-run report CSV.
pub const REPORT_HEADER: &str = "year,tracking_error,beta,intercept,t_stat,n_days,exemplars";

/// Write the annual report table. Exemplars are `;`-joined.
pub fn write_report_csv(path: &Path, reports: &[TrackingReport]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "{REPORT_HEADER}").map_err(io_err(path))?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.year,
            r.tracking_error,
            r.beta,
            r.intercept,
            r.t_stat,
            r.series.len(),
            r.exemplars.join(";")
        )
        .map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Write one year's paired daily series: `date,r_index,r_port,diff`.
pub fn write_series_csv(path: &Path, series: &[(NaiveDate, f64, f64)]) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "date,r_index,r_port,diff").map_err(io_err(path))?;
    for (date, r_index, r_port) in series {
        writeln!(w, "{date},{r_index},{r_port},{}", r_index - r_port).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Removes tracked files on drop unless the run completed.
///
/// A failed command therefore leaves no partial outputs behind.
pub struct OutputGuard {
    written: Vec<PathBuf>,
    complete: bool,
}

impl OutputGuard {
    pub fn new() -> Self {
        Self {
            written: Vec::new(),
            complete: false,
        }
    }

    /// Record a file the current command has written.
    pub fn track(&mut self, path: &Path) {
        self.written.push(path.to_path_buf());
    }

    /// Mark the run complete; tracked files are kept.
    pub fn finish(mut self) {
        self.complete = true;
    }
}

impl Default for OutputGuard {
    fn default() -> Self {
        Self::new()
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.complete {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| {
        CliError::Core(Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        )))
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}
