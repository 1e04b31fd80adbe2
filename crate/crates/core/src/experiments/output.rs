use std::io::Read;
use std::path::{Path, PathBuf};

use super::config::OutputFormat;
use super::grid::{summarize, SummaryRow};
use super::ResultRow;
use crate::error::{Error, Result};
use crate::numfmt::{fmt_num, normalize};

pub const RESULT_CSV_HEADER: [&str; 11] = [
    "distribution",
    "n",
    "run",
    "delta_avg",
    "delta_max",
    "k_star",
    "revenue_monopolistic",
    "revenue_rsop",
    "gain_ratio_rsop",
    "pay_your_bid_revenue",
    "seed_used",
];

pub const SUMMARY_CSV_HEADER: [&str; 16] = [
    "distribution",
    "n",
    "runs",
    "delta_avg_mean",
    "delta_avg_stderr",
    "delta_max_mean",
    "delta_max_stderr",
    "k_star_mean",
    "revenue_monopolistic_mean",
    "revenue_monopolistic_stderr",
    "revenue_rsop_mean",
    "revenue_rsop_stderr",
    "gain_ratio_rsop",
    "zero_rsop_runs",
    "pay_your_bid_mean",
    "pay_your_bid_stderr",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn csv_string(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for rec in records {
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    csv_string(
        &RESULT_CSV_HEADER,
        rows.iter().map(|r| {
            vec![
                r.distribution.clone(),
                r.n.to_string(),
                r.run.to_string(),
                opt(r.delta_avg),
                opt(r.delta_max),
                r.k_star.to_string(),
                fmt_num(r.revenue_monopolistic),
                opt(r.revenue_rsop),
                opt(r.gain_ratio_rsop),
                opt(r.pay_your_bid_revenue),
                r.seed_used.to_string(),
            ]
        }),
    )
}

pub fn rows_to_json(rows: &[ResultRow]) -> String {
    let v = serde_json::to_value(rows).expect("rows serialize");
    let mut s = serde_json::to_string_pretty(&normalize(v)).expect("rows serialize");
    s.push('\n');
    s
}

pub fn summary_to_csv(summary: &[SummaryRow]) -> String {
    csv_string(
        &SUMMARY_CSV_HEADER,
        summary.iter().map(|s| {
            vec![
                s.distribution.clone(),
                s.n.to_string(),
                s.runs.to_string(),
                opt(s.delta_avg_mean),
                opt(s.delta_avg_stderr),
                opt(s.delta_max_mean),
                opt(s.delta_max_stderr),
                fmt_num(s.k_star_mean),
                fmt_num(s.revenue_monopolistic_mean),
                fmt_num(s.revenue_monopolistic_stderr),
                opt(s.revenue_rsop_mean),
                opt(s.revenue_rsop_stderr),
                opt(s.gain_ratio_rsop),
                s.zero_rsop_runs.to_string(),
                opt(s.pay_your_bid_mean),
                opt(s.pay_your_bid_stderr),
            ]
        }),
    )
}

/// `results.csv` becomes `results.summary.csv`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

/// Writes `rows` to `path` in `format`.
pub fn emit(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<()> {
    let text = match format {
        OutputFormat::Csv => rows_to_csv(rows),
        OutputFormat::Json => rows_to_json(rows),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes means and standard errors of `rows` next to `path`; returns the
/// companion file's path.
pub fn emit_summary(rows: &[ResultRow], path: &Path) -> Result<PathBuf> {
    let out = summary_path(path);
    std::fs::write(&out, summary_to_csv(&summarize(rows)))?;
    Ok(out)
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    rec[i].parse().map_err(|_| Error::MalformedRow {
        line,
        reason: format!("{} = {:?}", RESULT_CSV_HEADER[i], &rec[i]),
    })
}

fn opt_field(rec: &csv::StringRecord, i: usize, line: u64) -> Result<Option<f64>> {
    if rec[i].is_empty() {
        Ok(None)
    } else {
        field(rec, i, line).map(Some)
    }
}

/// Parses a result CSV written by [`emit`].
pub fn read_rows_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = r
        .headers()
        .map_err(|e| Error::MalformedRow { line: 1, reason: e.to_string() })?;
    if header.iter().ne(RESULT_CSV_HEADER) {
        return Err(Error::MalformedRow {
            line: 1,
            reason: "unexpected header".into(),
        });
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        rows.push(ResultRow {
            distribution: rec[0].to_string(),
            n: field(&rec, 1, line)?,
            run: field(&rec, 2, line)?,
            delta_avg: opt_field(&rec, 3, line)?,
            delta_max: opt_field(&rec, 4, line)?,
            k_star: field(&rec, 5, line)?,
            revenue_monopolistic: field(&rec, 6, line)?,
            revenue_rsop: opt_field(&rec, 7, line)?,
            gain_ratio_rsop: opt_field(&rec, 8, line)?,
            pay_your_bid_revenue: opt_field(&rec, 9, line)?,
            seed_used: field(&rec, 10, line)?,
        });
    }
    Ok(rows)
}
