//! ε-sweeps: one run per tolerance, gradient-evaluation accounting, and a
//! least-squares fit of `log(first-hit outer iterations)` against `log(1/ε)`
//! — the measured counterpart of the solver's `ε⁻²` outer budget.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::config::{EpsilonSpec, RunConfig};
use crate::experiment::runner::{self, run_experiment, RunStatus};

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub first_hit_outer_iters: Option<u64>,
    pub total_inner_grad_evals: u64,
    pub total_outer_grad_evals: u64,
    pub wall_nanoseconds: u64,
    pub converged: bool,
    pub run_dir: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub dir: PathBuf,
    /// Rows sorted by decreasing ε.
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `ln(first_hit)` vs `ln(1/ε)` over converged
    /// rows; absent when fewer than 3 usable rows remain.
    pub fitted_slope: Option<f64>,
    /// Same fit on total inner (α) gradient evaluations, which carries the
    /// extra logarithmic factor of the inner budget.
    pub fitted_slope_inner_evals: Option<f64>,
    /// ε values whose runs did not converge and were excluded from the fit.
    pub excluded: Vec<f64>,
}

impl SweepResult {
    pub fn csv_path(&self) -> PathBuf {
        self.dir.join("sweep.csv")
    }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Runs `base` once per ε and aggregates the per-run statistics.
///
/// Requires at least 3 distinct positive tolerances. Independent ε-runs are
/// executed in waves of `base.jobs` threads; each run owns its directory, so
/// parallel order cannot affect any persisted artifact.
pub fn run_sweep(base: &RunConfig, epsilons: &[f64]) -> Result<SweepResult> {
    let mut eps: Vec<f64> = Vec::new();
    for &e in epsilons {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "sweep epsilon {e} must be finite and positive"
            )));
        }
        if !eps.contains(&e) {
            eps.push(e);
        }
    }
    if eps.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "a sweep needs at least 3 distinct epsilon values, got {}",
            eps.len()
        )));
    }
    eps.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let dir = match &base.output {
        Some(path) => path.clone(),
        None => runner::default_output_root().join(format!(
            "{}_{}_sweep_seed{}",
            base.problem, base.algorithm, base.seed
        )),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let configs: Vec<RunConfig> = eps
        .iter()
        .map(|&e| {
            let mut cfg = base.clone();
            cfg.epsilon = EpsilonSpec::Single(e);
            cfg.output = Some(dir.join(format!("eps{e}")));
            cfg
        })
        .collect();

    let jobs = base.jobs.max(1);
    let mut rows: Vec<SweepRow> = Vec::with_capacity(configs.len());
    for wave in configs.chunks(jobs) {
        let outcomes: Vec<Result<SweepRow>> = std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|cfg| {
                    scope.spawn(move || {
                        let artifacts = run_experiment(cfg)?;
                        let s = &artifacts.summary;
                        Ok(SweepRow {
                            epsilon: s.epsilon,
                            first_hit_outer_iters: s.first_hit,
                            total_inner_grad_evals: s.total_inner_grad_evals,
                            total_outer_grad_evals: s.total_outer_grad_evals,
                            wall_nanoseconds: s.wall_nanoseconds,
                            converged: s.status == RunStatus::Converged,
                            run_dir: artifacts.dir,
                        })
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sweep worker panicked"))
                .collect()
        });
        for outcome in outcomes {
            rows.push(outcome?);
        }
    }

    let excluded: Vec<f64> = rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| r.epsilon)
        .collect();
    let usable: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.converged && r.first_hit_outer_iters.is_some_and(|h| h >= 1))
        .collect();
    let xs: Vec<f64> = usable.iter().map(|r| (1.0 / r.epsilon).ln()).collect();
    let fitted_slope = if usable.len() >= 3 {
        let ys: Vec<f64> = usable
            .iter()
            .map(|r| (r.first_hit_outer_iters.unwrap() as f64).ln())
            .collect();
        least_squares_slope(&xs, &ys)
    } else {
        None
    };
    let fitted_slope_inner_evals = if usable.len() >= 3 {
        let ys: Vec<f64> = usable
            .iter()
            .map(|r| (r.total_inner_grad_evals.max(1) as f64).ln())
            .collect();
        least_squares_slope(&xs, &ys)
    } else {
        None
    };

    let result = SweepResult {
        dir: dir.clone(),
        rows,
        fitted_slope,
        fitted_slope_inner_evals,
        excluded,
    };
    fs::write(result.csv_path(), render_sweep_csv(&result.rows)).map_err(|e| Error::io(&dir, e))?;
    runner::write_json(&dir.join("sweep_summary.json"), &result)?;
    Ok(result)
}

pub const SWEEP_HEADER: &str =
    "epsilon,first_hit_outer_iters,total_inner_grad_evals,total_outer_grad_evals,wall_nanoseconds";

fn render_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.epsilon,
            r.first_hit_outer_iters.map(|v| v.to_string()).unwrap_or_default(),
            r.total_inner_grad_evals,
            r.total_outer_grad_evals,
            r.wall_nanoseconds
        );
    }
    out
}

/// Parsed `sweep.csv` row set (used by plot emission).
pub(crate) fn parse_sweep_csv(text: &str, file: &str) -> Result<Vec<(f64, Option<u64>)>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        file: file.to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty sweep file".into()))?;
    if header != SWEEP_HEADER {
        return Err(parse_err(1, format!("unexpected header `{header}`")));
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(parse_err(line_no, format!("expected 5 fields, found {}", fields.len())));
        }
        let epsilon: f64 = fields[0]
            .parse()
            .map_err(|_| parse_err(line_no, format!("bad epsilon `{}`", fields[0])))?;
        let first_hit = if fields[1].is_empty() {
            None
        } else {
            Some(
                fields[1]
                    .parse::<u64>()
                    .map_err(|_| parse_err(line_no, format!("bad first_hit `{}`", fields[1])))?,
            )
        };
        rows.push((epsilon, first_hit));
    }
    if rows.is_empty() {
        return Err(parse_err(1, "sweep has no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let slope = least_squares_slope(&xs, &ys).unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_requires_three_distinct_epsilons() {
        let cfg = RunConfig::new("quad-2d", 0.1);
        assert!(run_sweep(&cfg, &[0.1]).is_err());
        assert!(run_sweep(&cfg, &[0.1, 0.1, 0.1]).is_err());
        assert!(run_sweep(&cfg, &[0.1, 0.05, -1.0]).is_err());
    }

    #[test]
    fn sweep_runs_and_accounts_evaluations() {
        let root = std::env::temp_dir().join(format!(
            "plgda-sweep-test-{}-{}",
            std::process::id(),
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .unwrap()
                .as_nanos()
        ));
        let mut cfg = RunConfig::new("quad-2d", 0.1);
        cfg.output = Some(root.clone());
        cfg.jobs = 2;
        let result = run_sweep(&cfg, &[0.1, 0.05, 0.02]).unwrap();
        assert_eq!(result.rows.len(), 3);
        assert!(result.rows.windows(2).all(|w| w[0].epsilon > w[1].epsilon));
        for row in &result.rows {
            assert!(row.converged);
            // early-exit accounting: one outer gradient per executed step
            assert_eq!(
                row.total_outer_grad_evals,
                row.first_hit_outer_iters.unwrap() + 1
            );
            assert!(row.total_inner_grad_evals > 0);
        }
        assert!(result.csv_path().exists());
        let text = fs::read_to_string(result.csv_path()).unwrap();
        let parsed = parse_sweep_csv(&text, "sweep.csv").unwrap();
        assert_eq!(parsed.len(), 3);
        fs::remove_dir_all(&root).ok();
    }
}
