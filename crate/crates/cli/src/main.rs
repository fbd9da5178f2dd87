//! Command-line interface: `solve`, `sweep`, `diagnose` and `plot` over the
//! library. Human-readable summaries go to standard output; machine-readable
//! artifacts go to run directories (except `diagnose`, whose report is JSON
//! on standard output by contract).
//!
//! Exit codes: 0 success, 1 usage/IO error, 2 budget exhausted without
//! reaching the target stationarity, 3 diagnostics must-hold failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use plgda::diagnostics::{run_diagnostics, DiagnosticsConfig};
use plgda::error::Error;
use plgda::experiment::runner::RunStatus;
use plgda::experiment::{
    emit_plot_data, run_experiment, run_sweep, Algorithm, EpsilonSpec, InitSpec,
    PerturbationConfig, RunConfig,
};
use plgda::problems::problem_by_name;
use plgda::solver::PerturbationMode;

#[derive(Parser)]
#[command(
    name = "plgda",
    version,
    about = "Multi-step gradient descent-ascent for min-max problems with a PL inner maximization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem at one tolerance and persist the run.
    Solve(RunArgs),
    /// Solve at several tolerances and fit the first-hit scaling exponent.
    Sweep(SweepArgs),
    /// Estimate problem constants and verify the schedule assumptions.
    Diagnose(DiagnoseArgs),
    /// Emit plot-ready CSV and SVG from a run or sweep directory.
    Plot(PlotArgs),
}

/// Flags mirror the keys of the persisted config one-to-one, so any
/// `config.json` replays via `--config`; explicit flags override the file.
#[derive(Args, Clone)]
struct RunArgs {
    /// Built-in problem name (quad-sc, quad-2d, pl-sin, quad-degenerate).
    #[arg(long)]
    problem: Option<String>,
    /// Load a (possibly fully-resolved) config file first.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target stationarity tolerance.
    #[arg(long)]
    epsilon: Option<f64>,
    /// multistep-gda (default), onestep-gda or oracle-gd.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop at the first eps-stationary iterate (default true).
    #[arg(long)]
    early_exit: Option<bool>,
    /// Run directory (default: $PLGDA_OUT_ROOT or ./runs, auto-named).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Comma-separated initial theta.
    #[arg(long)]
    theta0: Option<String>,
    /// Comma-separated initial alpha.
    #[arg(long)]
    alpha0: Option<String>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long)]
    k_inner: Option<u64>,
    #[arg(long)]
    t_outer: Option<u64>,
    #[arg(long)]
    k_safety_multiplier: Option<f64>,
    #[arg(long)]
    k_safety_additive: Option<u32>,
    #[arg(long)]
    delta_inner: Option<f64>,
    #[arg(long)]
    delta_g: Option<f64>,
    /// Separate tolerance for the alpha block (defaults to epsilon).
    #[arg(long)]
    epsilon_alpha: Option<f64>,
    /// Gradient perturbation bound for oracle-gd runs.
    #[arg(long)]
    perturbation_magnitude: Option<f64>,
    /// adversarial or random-sphere.
    #[arg(long)]
    perturbation_mode: Option<String>,
    /// Maximum concurrent runs within a sweep.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated tolerance list (at least 3 distinct values).
    #[arg(long)]
    epsilons: Option<String>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Built-in problem name; omit to diagnose every built-in problem.
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Samples per estimator.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Args)]
struct PlotArgs {
    /// Run or sweep directory.
    dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Diagnose(args) => cmd_diagnose(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("bad {what} entry `{s}`")))
        })
        .collect()
}

fn parse_perturbation_mode(text: &str) -> Result<PerturbationMode, Error> {
    match text {
        "adversarial" => Ok(PerturbationMode::Adversarial),
        "random-sphere" => Ok(PerturbationMode::RandomSphere),
        other => Err(Error::InvalidConfig(format!(
            "unknown perturbation mode `{other}`; valid: adversarial, random-sphere"
        ))),
    }
}

/// Builds the effective config: file (if given), then flag overrides.
fn build_config(args: &RunArgs, epsilons: Option<&str>) -> Result<RunConfig, Error> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| Error::Json {
                path: path.clone(),
                source: e,
            })?
        }
        None => {
            let problem = args.problem.clone().ok_or_else(|| {
                Error::InvalidConfig("--problem is required (or use --config)".into())
            })?;
            RunConfig::new(&problem, f64::NAN) // epsilon must come from a flag
        }
    };

    if let Some(problem) = &args.problem {
        config.problem = problem.clone();
    }
    if let Some(eps_list) = epsilons {
        config.epsilon = EpsilonSpec::Sweep(parse_f64_list(eps_list, "epsilon")?);
    }
    if let Some(eps) = args.epsilon {
        config.epsilon = EpsilonSpec::Single(eps);
    }
    if matches!(config.epsilon, EpsilonSpec::Single(e) if e.is_nan()) {
        return Err(Error::InvalidConfig(
            "--epsilon (or --epsilons / --config) is required".into(),
        ));
    }
    if let Some(a) = &args.algorithm {
        config.algorithm = Algorithm::from_str(a)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(early) = args.early_exit {
        config.early_exit = early;
    }
    if let Some(output) = &args.output {
        config.output = Some(output.clone());
    }
    if args.theta0.is_some() || args.alpha0.is_some() {
        let theta = match &args.theta0 {
            Some(t) => parse_f64_list(t, "theta0")?,
            None => config
                .init
                .as_ref()
                .map(|i| i.theta.clone())
                .unwrap_or_else(|| default_init_block(&config.problem, true)),
        };
        let alpha = match &args.alpha0 {
            Some(a) => parse_f64_list(a, "alpha0")?,
            None => config
                .init
                .as_ref()
                .map(|i| i.alpha.clone())
                .unwrap_or_else(|| default_init_block(&config.problem, false)),
        };
        config.init = Some(InitSpec { theta, alpha });
    }
    let s = &mut config.schedule;
    if args.eta1.is_some() {
        s.eta1 = args.eta1;
    }
    if args.eta2.is_some() {
        s.eta2 = args.eta2;
    }
    if args.k_inner.is_some() {
        s.k_inner = args.k_inner;
    }
    if args.t_outer.is_some() {
        s.t_outer = args.t_outer;
    }
    if args.k_safety_multiplier.is_some() {
        s.k_safety_multiplier = args.k_safety_multiplier;
    }
    if args.k_safety_additive.is_some() {
        s.k_safety_additive = args.k_safety_additive;
    }
    if args.delta_inner.is_some() {
        s.delta_inner = args.delta_inner;
    }
    if args.delta_g.is_some() {
        s.delta_g = args.delta_g;
    }
    if args.epsilon_alpha.is_some() {
        config.epsilon_alpha = args.epsilon_alpha;
    }
    if let Some(mag) = args.perturbation_magnitude {
        let mode = match &args.perturbation_mode {
            Some(m) => parse_perturbation_mode(m)?,
            None => PerturbationMode::Adversarial,
        };
        config.perturbation = Some(PerturbationConfig {
            magnitude: mag,
            mode,
        });
    } else if args.perturbation_mode.is_some() {
        return Err(Error::InvalidConfig(
            "--perturbation-mode needs --perturbation-magnitude".into(),
        ));
    }
    if let Some(jobs) = args.jobs {
        config.jobs = jobs;
    }
    Ok(config)
}

fn default_init_block(problem: &str, theta_side: bool) -> Vec<f64> {
    problem_by_name(problem)
        .map(|p| {
            if theta_side {
                p.default_init.0.as_slice().to_vec()
            } else {
                p.default_init.1.as_slice().to_vec()
            }
        })
        .unwrap_or_default()
}

fn cmd_solve(args: RunArgs) -> Result<u8, Error> {
    let config = build_config(&args, None)?;
    config.single_epsilon()?;
    let artifacts = run_experiment(&config)?;
    let s = &artifacts.summary;
    println!("problem: {}", s.problem);
    println!("algorithm: {}", s.algorithm);
    println!("epsilon: {}", s.epsilon);
    println!(
        "schedule: eta1={} eta2={} k_inner={} t_outer={}{}",
        s.schedule.eta1,
        s.schedule.eta2,
        s.schedule.k_inner,
        s.schedule.t_outer,
        if s.manual_fields.is_empty() {
            String::new()
        } else {
            format!(" (manual: {})", s.manual_fields.join(", "))
        }
    );
    println!(
        "status: {}",
        match s.status {
            RunStatus::Converged => "converged",
            RunStatus::BudgetExhausted => "budget-exhausted",
            RunStatus::Diverged => "diverged",
        }
    );
    match s.first_hit {
        Some(t) => println!("first_hit: {t}"),
        None => println!("first_hit: none"),
    }
    match (s.best_norm_theta, s.best_norm_alpha) {
        (Some(nt), Some(na)) => {
            println!("best_norms: ({nt}, {na}) at t={}", s.best_index.unwrap_or(0))
        }
        (Some(nt), None) => println!("best_grad_g_norm: {nt} at t={}", s.best_index.unwrap_or(0)),
        _ => {}
    }
    println!(
        "gradient evals: outer {}, inner {}",
        s.total_outer_grad_evals, s.total_inner_grad_evals
    );
    if !s.k_escalation_iters.is_empty() {
        println!("inner budget escalations at t: {:?}", s.k_escalation_iters);
    }
    for w in &s.warnings {
        println!("warning: {w}");
    }
    println!("run dir: {}", artifacts.dir.display());
    Ok(if s.status == RunStatus::Converged { 0 } else { 2 })
}

fn cmd_sweep(args: SweepArgs) -> Result<u8, Error> {
    let config = build_config(&args.run, args.epsilons.as_deref())?;
    let epsilons = match &config.epsilon {
        EpsilonSpec::Sweep(list) => list.clone(),
        EpsilonSpec::Single(_) => {
            return Err(Error::InvalidConfig(
                "sweep needs --epsilons with at least 3 distinct values".into(),
            ))
        }
    };
    let result = run_sweep(&config, &epsilons)?;
    println!("sweep dir: {}", result.dir.display());
    println!("epsilon  first_hit  inner_evals  outer_evals");
    for row in &result.rows {
        println!(
            "{:<8} {:<10} {:<12} {:<10}",
            row.epsilon,
            row.first_hit_outer_iters
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".into()),
            row.total_inner_grad_evals,
            row.total_outer_grad_evals
        );
    }
    if !result.excluded.is_empty() {
        println!("non-converged (excluded from fit): {:?}", result.excluded);
    }
    match result.fitted_slope {
        Some(slope) => {
            println!("fitted_slope (first-hit outer iterations): {slope}");
            if let Some(inner) = result.fitted_slope_inner_evals {
                println!("fitted_slope (total inner gradient evals): {inner}");
            }
            Ok(0)
        }
        None => {
            println!("fitted_slope: unavailable (fewer than 3 converged rows)");
            Ok(2)
        }
    }
}

fn cmd_diagnose(args: DiagnoseArgs) -> Result<u8, Error> {
    let names: Vec<String> = match &args.problem {
        Some(name) => vec![name.clone()],
        None => plgda::problems::PROBLEM_NAMES
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let cfg = DiagnosticsConfig {
        n_samples: args.samples,
        seed: args.seed,
    };
    let mut reports = Vec::new();
    for name in &names {
        let problem = problem_by_name(name)?;
        reports.push(run_diagnostics(&problem, &cfg)?);
    }
    let all_pass = reports.iter().all(|r| r.must_hold_pass);
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .expect("diagnostics report serializes");
    println!("{json}");
    Ok(if all_pass { 0 } else { 3 })
}

fn cmd_plot(args: PlotArgs) -> Result<u8, Error> {
    let files = emit_plot_data(&args.dir)?;
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_well_formed() {
        Cli::command().debug_assert();
    }
}
