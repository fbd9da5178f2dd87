//! Executes one resolved run and persists `config.json`, `trace.csv` and
//! `summary.json` into the run directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::config::{resolve, Algorithm, ResolvedRun, RunConfig};
use crate::experiment::trace_io::{self, CsvRow};
use crate::solver::{
    run_multistep_gda, run_oracle_gd, Perturbation, RunOptions, ScheduleParams,
};

/// Environment variable overriding the default output root (`./runs`).
pub const OUT_ROOT_ENV: &str = "PLGDA_OUT_ROOT";

pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
    Diverged,
}

/// Machine-readable run outcome (persisted as `summary.json`).
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub problem: String,
    pub algorithm: Algorithm,
    pub epsilon: f64,
    pub seed: u64,
    pub schedule: ScheduleParams,
    pub manual_fields: Vec<String>,
    pub status: RunStatus,
    pub converged: bool,
    pub first_hit: Option<u64>,
    pub best_index: Option<u64>,
    pub best_norm_theta: Option<f64>,
    pub best_norm_alpha: Option<f64>,
    pub total_inner_grad_evals: u64,
    pub total_outer_grad_evals: u64,
    pub wall_nanoseconds: u64,
    pub k_escalation_iters: Vec<u64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub summary: RunSummary,
}

impl RunArtifacts {
    pub fn trace_path(&self) -> PathBuf {
        self.dir.join("trace.csv")
    }
    pub fn summary_path(&self) -> PathBuf {
        self.dir.join("summary.json")
    }
    pub fn config_path(&self) -> PathBuf {
        self.dir.join("config.json")
    }
}

fn run_dir_name(config: &RunConfig, epsilon: f64) -> String {
    format!(
        "{}_{}_eps{}_seed{}",
        config.problem, config.algorithm, epsilon, config.seed
    )
}

/// Resolves, executes and persists one run.
///
/// Re-running with the same resolved config reproduces `trace.csv`
/// byte-identically. Divergence is not an error at this level: the partial
/// trace is persisted and the summary carries `status: diverged`.
pub fn run_experiment(config: &RunConfig) -> Result<RunArtifacts> {
    let resolved = resolve(config)?;
    let epsilon = resolved.schedule.epsilon;
    let dir = match &config.output {
        Some(path) => path.clone(),
        None => default_output_root().join(run_dir_name(config, epsilon)),
    };
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let mut resolved_config = resolved.resolved_config.clone();
    resolved_config.output = Some(dir.clone());
    write_json(&dir.join("config.json"), &resolved_config)?;

    let started = Instant::now();
    let outcome = execute(&resolved, config);
    let wall_nanoseconds = started.elapsed().as_nanos().min(u64::MAX as u128) as u64;

    let (rows, mut summary) = match outcome {
        Ok((rows, summary)) => (rows, summary),
        Err(Error::Diverged {
            outer,
            inner,
            partial_trace,
        }) => {
            let rows: Vec<CsvRow> = partial_trace.iter().map(CsvRow::from).collect();
            let summary = RunSummary {
                problem: resolved.problem.name.clone(),
                algorithm: config.algorithm,
                epsilon,
                seed: config.seed,
                schedule: resolved.schedule,
                manual_fields: resolved.manual_fields.clone(),
                status: RunStatus::Diverged,
                converged: false,
                first_hit: None,
                best_index: None,
                best_norm_theta: None,
                best_norm_alpha: None,
                total_inner_grad_evals: rows
                    .iter()
                    .map(|r| r.inner_iters_used.unwrap_or(0))
                    .sum(),
                total_outer_grad_evals: rows.len() as u64,
                wall_nanoseconds: 0,
                k_escalation_iters: Vec::new(),
                warnings: vec![format!(
                    "diverged at outer step {outer}, inner step {inner}"
                )],
            };
            (rows, summary)
        }
        Err(other) => return Err(other),
    };
    summary.wall_nanoseconds = wall_nanoseconds;

    trace_io::write_trace(
        &dir.join("trace.csv"),
        resolved.problem.dim_theta,
        resolved.problem.dim_alpha,
        &rows,
    )?;
    write_json(&dir.join("summary.json"), &summary)?;

    Ok(RunArtifacts { dir, summary })
}

fn execute(resolved: &ResolvedRun, config: &RunConfig) -> Result<(Vec<CsvRow>, RunSummary)> {
    let problem = &resolved.problem;
    let schedule = &resolved.schedule;
    match config.algorithm {
        Algorithm::MultistepGda | Algorithm::OnestepGda => {
            let opts = RunOptions {
                early_exit: config.early_exit,
                collect_inner_values: false,
                epsilon_alpha: config.epsilon_alpha,
                adaptive_inner: config.algorithm == Algorithm::MultistepGda,
            };
            let run = run_multistep_gda(problem, schedule, resolved.init.clone(), opts)?;
            let rows: Vec<CsvRow> = run.trace.iter().map(CsvRow::from).collect();
            let summary = RunSummary {
                problem: problem.name.clone(),
                algorithm: config.algorithm,
                epsilon: schedule.epsilon,
                seed: config.seed,
                schedule: *schedule,
                manual_fields: resolved.manual_fields.clone(),
                status: if run.report.converged {
                    RunStatus::Converged
                } else {
                    RunStatus::BudgetExhausted
                },
                converged: run.report.converged,
                first_hit: run.report.first_hit,
                best_index: Some(run.report.best_index),
                best_norm_theta: Some(run.report.best_norms.0),
                best_norm_alpha: Some(run.report.best_norms.1),
                total_inner_grad_evals: run.inner_grad_evals,
                total_outer_grad_evals: run.outer_grad_evals,
                wall_nanoseconds: 0,
                k_escalation_iters: run.report.k_escalation_iters.clone(),
                warnings: run.report.warnings.clone(),
            };
            Ok((rows, summary))
        }
        Algorithm::OracleGd => {
            let perturbation = config.perturbation.map(|p| Perturbation {
                magnitude: p.magnitude,
                mode: p.mode,
                seed: config.seed,
            });
            let run = run_oracle_gd(
                problem,
                schedule.eta2,
                schedule.t_outer,
                resolved.init.0.clone(),
                perturbation,
            )?;
            let rows: Vec<CsvRow> = run.trace.iter().map(CsvRow::from).collect();
            let first_hit = run
                .trace
                .iter()
                .find(|r| r.grad_g_norm <= schedule.epsilon)
                .map(|r| r.t);
            let summary = RunSummary {
                problem: problem.name.clone(),
                algorithm: config.algorithm,
                epsilon: schedule.epsilon,
                seed: config.seed,
                schedule: *schedule,
                manual_fields: resolved.manual_fields.clone(),
                status: if first_hit.is_some() {
                    RunStatus::Converged
                } else {
                    RunStatus::BudgetExhausted
                },
                converged: first_hit.is_some(),
                first_hit,
                best_index: Some(run.min_index),
                best_norm_theta: Some(run.min_grad_norm),
                best_norm_alpha: None,
                total_inner_grad_evals: 0,
                total_outer_grad_evals: run.trace.len() as u64,
                wall_nanoseconds: 0,
                k_escalation_iters: Vec::new(),
                warnings: Vec::new(),
            };
            Ok((rows, summary))
        }
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
