//! The persisted trace format.
//!
//! `trace.csv` columns, in order:
//! `t, theta_0..theta_{dθ-1}, alpha_0..alpha_{dα-1}, grad_theta_norm,
//! grad_alpha_norm, inner_iters_used, f_value, g_gap, danskin_gap`.
//! Optional fields are empty strings when absent; floats use the shortest
//! decimal representation that round-trips the 64-bit value (Rust's default
//! float formatting), which makes traces byte-stable across replays.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::solver::{OracleGdRecord, TraceRecord};

/// One parsed/printable trace row. Solver runs fill every field; θ-only
/// oracle descent leaves the inner-loop fields empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub t: u64,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub grad_theta_norm: f64,
    pub grad_alpha_norm: Option<f64>,
    pub inner_iters_used: Option<u64>,
    pub f_value: f64,
    pub g_gap: Option<f64>,
    pub danskin_gap: Option<f64>,
}

impl From<&TraceRecord> for CsvRow {
    fn from(r: &TraceRecord) -> CsvRow {
        CsvRow {
            t: r.t,
            theta: r.theta.as_slice().to_vec(),
            alpha: r.alpha.as_slice().to_vec(),
            grad_theta_norm: r.grad_theta_norm,
            grad_alpha_norm: Some(r.grad_alpha_norm),
            inner_iters_used: Some(r.inner_iters_used),
            f_value: r.f_value,
            g_gap: r.g_gap,
            danskin_gap: r.danskin_gap,
        }
    }
}

impl From<&OracleGdRecord> for CsvRow {
    fn from(r: &OracleGdRecord) -> CsvRow {
        CsvRow {
            t: r.t,
            theta: r.theta.as_slice().to_vec(),
            alpha: Vec::new(),
            grad_theta_norm: r.grad_g_norm,
            grad_alpha_norm: None,
            inner_iters_used: None,
            f_value: r.g_value,
            g_gap: None,
            danskin_gap: None,
        }
    }
}

pub fn trace_header(dim_theta: usize, dim_alpha: usize) -> String {
    let mut header = String::from("t");
    for i in 0..dim_theta {
        let _ = write!(header, ",theta_{i}");
    }
    for i in 0..dim_alpha {
        let _ = write!(header, ",alpha_{i}");
    }
    header.push_str(",grad_theta_norm,grad_alpha_norm,inner_iters_used,f_value,g_gap,danskin_gap");
    header
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn render_trace(dim_theta: usize, dim_alpha: usize, rows: &[CsvRow]) -> String {
    let mut out = trace_header(dim_theta, dim_alpha);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{}", row.t);
        for v in &row.theta {
            let _ = write!(out, ",{v}");
        }
        for _ in row.theta.len()..dim_theta {
            out.push(',');
        }
        for v in &row.alpha {
            let _ = write!(out, ",{v}");
        }
        for _ in row.alpha.len()..dim_alpha {
            out.push(',');
        }
        let _ = write!(
            out,
            ",{},{},{},{},{},{}",
            row.grad_theta_norm,
            opt_f64(row.grad_alpha_norm),
            row.inner_iters_used.map(|v| v.to_string()).unwrap_or_default(),
            row.f_value,
            opt_f64(row.g_gap),
            opt_f64(row.danskin_gap),
        );
        out.push('\n');
    }
    out
}

pub fn write_trace(path: &Path, dim_theta: usize, dim_alpha: usize, rows: &[CsvRow]) -> Result<()> {
    fs::write(path, render_trace(dim_theta, dim_alpha, rows)).map_err(|e| Error::io(path, e))
}

/// Parsed trace: dimensions recovered from the header plus all data rows.
#[derive(Debug, Clone)]
pub struct ParsedTrace {
    pub dim_theta: usize,
    pub dim_alpha: usize,
    pub rows: Vec<CsvRow>,
}

pub fn read_trace(path: &Path) -> Result<ParsedTrace> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text, &path.display().to_string())
}

pub fn parse_trace(text: &str, file: &str) -> Result<ParsedTrace> {
    let parse_err = |line: usize, message: String| Error::Parse {
        file: file.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty trace file".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"t") {
        return Err(parse_err(1, format!("header must start with `t`, got `{header}`")));
    }
    let dim_theta = columns.iter().filter(|c| c.starts_with("theta_")).count();
    let dim_alpha = columns.iter().filter(|c| c.starts_with("alpha_")).count();
    let expected = trace_header(dim_theta, dim_alpha);
    if header != expected {
        return Err(parse_err(1, format!("unexpected header `{header}`")));
    }
    let n_cols = columns.len();

    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_cols {
            return Err(parse_err(
                line_no,
                format!("expected {n_cols} fields, found {}", fields.len()),
            ));
        }
        let req_f64 = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad float `{}` in column {}", fields[i], columns[i])))
        };
        let opt_col = |i: usize| -> Result<Option<f64>> {
            if fields[i].is_empty() {
                Ok(None)
            } else {
                req_f64(i).map(Some)
            }
        };
        let t = fields[0]
            .parse::<u64>()
            .map_err(|_| parse_err(line_no, format!("bad iteration index `{}`", fields[0])))?;
        let mut theta = Vec::with_capacity(dim_theta);
        for i in 0..dim_theta {
            theta.push(req_f64(1 + i)?);
        }
        let mut alpha = Vec::with_capacity(dim_alpha);
        let mut alpha_empty = false;
        for i in 0..dim_alpha {
            let field = fields[1 + dim_theta + i];
            if field.is_empty() {
                alpha_empty = true;
            } else {
                alpha.push(req_f64(1 + dim_theta + i)?);
            }
        }
        if alpha_empty && !alpha.is_empty() {
            return Err(parse_err(line_no, "partially empty alpha block".into()));
        }
        let base = 1 + dim_theta + dim_alpha;
        let inner = if fields[base + 2].is_empty() {
            None
        } else {
            Some(fields[base + 2].parse::<u64>().map_err(|_| {
                parse_err(line_no, format!("bad inner_iters_used `{}`", fields[base + 2]))
            })?)
        };
        rows.push(CsvRow {
            t,
            theta,
            alpha,
            grad_theta_norm: req_f64(base)?,
            grad_alpha_norm: opt_col(base + 1)?,
            inner_iters_used: inner,
            f_value: req_f64(base + 3)?,
            g_gap: opt_col(base + 4)?,
            danskin_gap: opt_col(base + 5)?,
        });
    }
    if rows.is_empty() {
        return Err(parse_err(1, "trace has no data rows".into()));
    }
    Ok(ParsedTrace {
        dim_theta,
        dim_alpha,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<CsvRow> {
        vec![
            CsvRow {
                t: 0,
                theta: vec![1.0],
                alpha: vec![0.5, 0.25],
                grad_theta_norm: 2.25,
                grad_alpha_norm: Some(0.001),
                inner_iters_used: Some(63),
                f_value: 1.1249,
                g_gap: Some(1e-4),
                danskin_gap: Some(5e-5),
            },
            CsvRow {
                t: 1,
                theta: vec![0.25],
                alpha: vec![0.25, 0.0625],
                grad_theta_norm: 0.5625,
                grad_alpha_norm: Some(0.0005),
                inner_iters_used: Some(63),
                f_value: 0.0703,
                g_gap: None,
                danskin_gap: None,
            },
        ]
    }

    #[test]
    fn header_layout() {
        assert_eq!(
            trace_header(1, 2),
            "t,theta_0,alpha_0,alpha_1,grad_theta_norm,grad_alpha_norm,inner_iters_used,f_value,g_gap,danskin_gap"
        );
    }

    #[test]
    fn round_trip() {
        let rows = sample_rows();
        let text = render_trace(1, 2, &rows);
        let parsed = parse_trace(&text, "test").unwrap();
        assert_eq!(parsed.dim_theta, 1);
        assert_eq!(parsed.dim_alpha, 2);
        assert_eq!(parsed.rows, rows);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let rows = sample_rows();
        let mut text = render_trace(1, 2, &rows);
        text.push_str("2,bad\n");
        let err = parse_trace(&text, "test").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_trace_is_a_parse_error() {
        let text = render_trace(1, 2, &[]);
        assert!(parse_trace(&text, "test").is_err());
        assert!(parse_trace("", "test").is_err());
    }
}
