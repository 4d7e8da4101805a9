//! CSV files for histories and indicators, and the summary table.

use std::fmt::Write as _;
use std::io::Write;

use crate::amr::ConvergenceHistory;
use crate::error::{Error, Result};
use crate::estimators::IndicatorField;

pub const HISTORY_HEADER: &str = "level,ndof,eta,err,effindex";
pub const INDICATOR_HEADER: &str = "element_id,eta_perp,eta_0,eta_R,eta_K";

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn fields<'a>(line: usize, text: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = text.split(',').map(str::trim).collect();
    if f.len() != n {
        return Err(parse_err(line, format!("expected {n} fields, found {}", f.len())));
    }
    Ok(f)
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| parse_err(line, format!("bad number '{s}'")))
}

fn opt_num(line: usize, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        num(line, s).map(Some)
    }
}

fn data_lines<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, h)) if h == header => Ok(lines),
        Some((ln, _)) => Err(parse_err(ln, format!("expected header '{header}'"))),
        None => Err(parse_err(0, "empty file")),
    }
}

/// One line of the history CSV; `err` and `effindex` are empty when the exact
/// solution is unknown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub level: usize,
    pub ndof: usize,
    pub eta: f64,
    pub err: Option<f64>,
    pub effindex: Option<f64>,
}

pub fn write_history_csv(mut out: impl Write, history: &ConvergenceHistory) -> Result<()> {
    writeln!(out, "{HISTORY_HEADER}")?;
    for l in &history.levels {
        writeln!(out, "{},{},{},{},{}", l.level, l.ndof, l.eta, opt(l.error), opt(l.eff_index))?;
    }
    Ok(())
}

pub fn parse_history_csv(text: &str) -> Result<Vec<HistoryRow>> {
    data_lines(text, HISTORY_HEADER)?
        .map(|(ln, l)| {
            let f = fields(ln, l, 5)?;
            Ok(HistoryRow {
                level: num(ln, f[0])?,
                ndof: num(ln, f[1])?,
                eta: num(ln, f[2])?,
                err: opt_num(ln, f[3])?,
                effindex: opt_num(ln, f[4])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicatorRow {
    pub element_id: usize,
    pub eta_perp: f64,
    pub eta_0: f64,
    pub eta_r: f64,
    pub eta_k: f64,
}

pub fn write_indicator_csv(mut out: impl Write, ind: &IndicatorField) -> Result<()> {
    writeln!(out, "{INDICATOR_HEADER}")?;
    for k in 0..ind.len() {
        writeln!(out, "{},{},{},{},{}", k, ind.eta_perp[k], ind.eta_0[k], ind.eta_r[k], ind.eta_k[k])?;
    }
    Ok(())
}

pub fn parse_indicator_csv(text: &str) -> Result<Vec<IndicatorRow>> {
    data_lines(text, INDICATOR_HEADER)?
        .map(|(ln, l)| {
            let f = fields(ln, l, 5)?;
            Ok(IndicatorRow {
                element_id: num(ln, f[0])?,
                eta_perp: num(ln, f[1])?,
                eta_0: num(ln, f[2])?,
                eta_r: num(ln, f[3])?,
                eta_k: num(ln, f[4])?,
            })
        })
        .collect()
}

/// One estimator's line in the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub estimator: String,
    /// Index of the final level.
    pub n: usize,
    pub ndof: usize,
    pub eta: f64,
    pub rel_error: Option<f64>,
    pub eff_index: Option<f64>,
    pub r_eta: Option<f64>,
    pub r_err: Option<f64>,
}

/// Summary of a finished run; rates are missing when there are too few levels.
pub fn summary_row(history: &ConvergenceHistory) -> Option<SummaryRow> {
    let last = history.last()?;
    let rates = history.rates().ok();
    Some(SummaryRow {
        estimator: history.estimator.name().to_string(),
        n: last.level,
        ndof: last.ndof,
        eta: last.eta,
        rel_error: last.rel_error,
        eff_index: last.eff_index,
        r_eta: rates.map(|r| r.0),
        r_err: rates.and_then(|r| r.1),
    })
}

const WITH_ERROR: [&str; 7] = ["estimator", "n", "#DoF", "rel-error", "eff-index", "r_η", "r_err"];
const WITHOUT_ERROR: [&str; 5] = ["estimator", "n", "#DoF", "Estimator", "r_η"];

fn cell(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.4}"))
}

/// Whitespace-aligned table. With a known exact solution the columns are
/// `n, #DoF, rel-error, eff-index, r_η, r_err`; otherwise `n, #DoF,
/// Estimator, r_η`.
pub fn format_summary(problem: &str, rows: &[SummaryRow]) -> String {
    let with_error = !rows.is_empty() && rows.iter().all(|r| r.rel_error.is_some());
    let header: &[&str] = if with_error { &WITH_ERROR } else { &WITHOUT_ERROR };
    let mut s = String::new();
    let _ = writeln!(s, "# {problem}");
    let line = |cols: Vec<String>| {
        cols.iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { format!("{c:<14}") } else { format!("{c:>10}") })
            .collect::<String>()
    };
    let _ = writeln!(s, "{}", line(header.iter().map(|h| h.to_string()).collect()));
    for r in rows {
        let mut cols = vec![r.estimator.clone(), r.n.to_string(), r.ndof.to_string()];
        if with_error {
            cols.extend([cell(r.rel_error), cell(r.eff_index), cell(r.r_eta), cell(r.r_err)]);
        } else {
            cols.extend([format!("{:.4}", r.eta), cell(r.r_eta)]);
        }
        let _ = writeln!(s, "{}", line(cols));
    }
    s
}

/// Parse a table written by [`format_summary`]. Values carry the printed
/// precision; `eta` is NaN in the layout with errors, which does not print it.
pub fn parse_summary(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty summary"))?;
    let cols: Vec<&str> = header.split_whitespace().collect();
    let with_error = if cols == WITH_ERROR {
        true
    } else if cols == WITHOUT_ERROR {
        false
    } else {
        return Err(parse_err(ln, "unrecognized summary header"));
    };
    let cell = |ln: usize, s: &str| if s == "-" { Ok(None) } else { num(ln, s).map(Some) };
    lines
        .map(|(ln, l)| {
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != cols.len() {
                return Err(parse_err(ln, format!("expected {} columns, found {}", cols.len(), f.len())));
            }
            let mut row = SummaryRow {
                estimator: f[0].to_string(),
                n: num(ln, f[1])?,
                ndof: num(ln, f[2])?,
                eta: f64::NAN,
                rel_error: None,
                eff_index: None,
                r_eta: None,
                r_err: None,
            };
            if with_error {
                row.rel_error = cell(ln, f[3])?;
                row.eff_index = cell(ln, f[4])?;
                row.r_eta = cell(ln, f[5])?;
                row.r_err = cell(ln, f[6])?;
            } else {
                row.eta = num(ln, f[3])?;
                row.r_eta = cell(ln, f[4])?;
            }
            Ok(row)
        })
        .collect()
}
