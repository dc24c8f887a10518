//! CSV ingestion, preprocessing and the data-analysis pipeline.

use std::fs::File;
use std::io::{Read, Write};

use lrdcp_core::subsampling::{run_test, BlockRule, TestKind, TestReport};
use lrdcp_core::{Error, TimeSeries};

use crate::error::{CliError, CliResult};

/// A CSV column given by header name, or by 0-based index when no header
/// matches and the selector is an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSel(pub String);

fn resolve_column(headers: &csv::StringRecord, sel: &ColumnSel) -> Option<usize> {
    headers
        .iter()
        .position(|h| h.trim() == sel.0)
        .or_else(|| sel.0.parse::<usize>().ok().filter(|&i| i < headers.len()))
}

/// Reads one numeric column from a headed CSV.
///
/// Without `column` the last column is used. When the file has more than one
/// column, the first column other than the value column supplies labels.
/// Empty or non-numeric cells are rejected with their line number.
pub fn read_series<R: Read>(input: R, source: &str, column: Option<&ColumnSel>) -> CliResult<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader
        .headers()
        .map_err(|e| ingest(source, 1, e.to_string()))?
        .clone();
    if headers.is_empty() {
        return Err(ingest(source, 1, "missing header row".into()));
    }
    let value_col = match column {
        Some(sel) => resolve_column(&headers, sel).ok_or_else(|| {
            CliError::Usage(format!("{source}: no column '{}' in header {:?}", sel.0, headers))
        })?,
        None => headers.len() - 1,
    };
    let label_col = (0..headers.len()).find(|&i| i != value_col);

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            ingest(source, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = record.get(value_col).unwrap_or("");
        let v: f64 = cell
            .parse()
            .map_err(|_| ingest(source, line, format!("value '{cell}' is not a number")))?;
        if !v.is_finite() {
            return Err(ingest(source, line, format!("value '{cell}' is not finite")));
        }
        values.push(v);
        if let Some(c) = label_col {
            labels.push(record.get(c).unwrap_or("").to_string());
        }
    }
    if label_col.is_some() {
        Ok(TimeSeries::with_labels(values, labels)?)
    } else {
        Ok(TimeSeries::new(values))
    }
}

pub fn read_series_file(path: &str, column: Option<&ColumnSel>) -> CliResult<TimeSeries> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_series(file, path, column)
}

fn ingest(source: &str, line: u64, msg: String) -> CliError {
    CliError::Ingest {
        path: source.to_string(),
        line,
        msg,
    }
}

/// `L_t = log(P_t / P_{t−1})`; the result is one shorter and keeps the
/// labels of `P_2, …, P_n`.
pub fn log_returns(series: &TimeSeries) -> Result<TimeSeries, Error> {
    let p = series.values();
    if p.len() < 2 {
        return Err(Error::Domain("log-returns need at least 2 prices".into()));
    }
    if let Some(i) = p.iter().position(|&v| v <= 0.0) {
        return Err(Error::Domain(format!(
            "log-returns need positive prices; observation {} is {}",
            i + 1,
            p[i]
        )));
    }
    let values: Vec<f64> = p.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    match series.labels() {
        Some(l) => TimeSeries::with_labels(values, l[1..].to_vec()),
        None => Ok(TimeSeries::new(values)),
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Preprocess {
    pub log_returns: bool,
    pub abs: bool,
}

/// Log-returns first, absolute values second.
pub fn preprocess(series: TimeSeries, opts: Preprocess) -> Result<TimeSeries, Error> {
    let s = if opts.log_returns { log_returns(&series)? } else { series };
    Ok(if opts.abs { s.map_values(f64::abs) } else { s })
}

pub fn run_tests(series: &TimeSeries, tests: &[TestKind], block: BlockRule, level: f64) -> CliResult<Vec<TestReport>> {
    tests
        .iter()
        .map(|t| run_test(series.values(), t, block, level).map_err(CliError::from))
        .collect()
}

pub fn write_reports_csv<W: Write>(reports: &[TestReport], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", TestReport::CSV_HEADER)?;
    for r in reports {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// `k,label,T_k(test₁),…` for `k = 1..n−1`; the label is that of
/// observation `k`, the last one before the candidate change.
pub fn write_trajectories_csv<W: Write>(series: &TimeSeries, tests: &[TestKind], out: W) -> CliResult<()> {
    let trajectories = tests
        .iter()
        .map(|t| t.trajectory(series.values()))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header = vec!["k".to_string(), "label".to_string()];
    header.extend(tests.iter().map(|t| t.name().to_string()));
    let to_io = |e: csv::Error| CliError::io("trajectory output", e.into());
    w.write_record(&header).map_err(to_io)?;
    for k in 1..series.len() {
        let mut row = vec![k.to_string(), series.label(k)];
        row.extend(trajectories.iter().map(|t| t.at(k).to_string()));
        w.write_record(&row).map_err(to_io)?;
    }
    w.flush().map_err(|e| CliError::io("trajectory output", e))?;
    Ok(())
}
