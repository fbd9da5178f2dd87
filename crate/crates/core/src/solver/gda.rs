//! Multi-step gradient descent-ascent.
//!
//! Each outer iteration runs `K` gradient-ascent steps on `α` (warm-started
//! from the previous outer iteration), then takes one gradient-descent step
//! on `θ` using the partial gradient at the returned pair. The recorded pair
//! for iteration `t` is `(θ_t, α_{t+1})`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::solver::schedule::ScheduleParams;
use crate::vector::Vector;

/// Per-outer-iteration log entry, evaluated at the pair `(θ_t, α_{t+1})`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub t: u64,
    pub theta: Vector,
    /// The inner iterate after the loop, i.e. `α_{t+1}`.
    pub alpha: Vector,
    pub grad_theta_norm: f64,
    pub grad_alpha_norm: f64,
    pub inner_iters_used: u64,
    pub f_value: f64,
    /// `g(θ_t) - f(θ_t, α_{t+1})`, oracle problems only.
    pub g_gap: Option<f64>,
    /// `‖∇_θ f(θ_t, α_{t+1}) - ∇g(θ_t)‖`, oracle problems only.
    pub danskin_gap: Option<f64>,
    /// `f(θ_t, α_k)` for `k = 0..=inner_iters_used`, kept only when the run
    /// was asked to collect them (not part of the persisted trace).
    #[serde(skip)]
    pub inner_f_values: Option<Vec<f64>>,
}

/// Where (and whether) the run certified ε-stationarity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationarityReport {
    /// First `t` with both gradient norms `<= ε`.
    pub first_hit: Option<u64>,
    /// Iteration minimizing the max of the two norms.
    pub best_index: u64,
    pub best_norms: (f64, f64),
    pub schedule: ScheduleParams,
    pub converged: bool,
    /// Outer iterations where the inner budget was doubled because the
    /// inner gradient norm still exceeded ε after `K` steps.
    pub k_escalation_iters: Vec<u64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Stop at the first ε-stationary iterate instead of exhausting `T`.
    pub early_exit: bool,
    /// Record `f` along every inner loop (costs one `f` eval per inner step).
    pub collect_inner_values: bool,
    /// Separate tolerance for the `α` block; defaults to the schedule's ε.
    pub epsilon_alpha: Option<f64>,
    /// Double `K` (up to 3 times) within an outer iteration whose inner loop
    /// ends with `‖∇_α f‖` above tolerance. Off for the fixed-`K` baseline.
    pub adaptive_inner: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            early_exit: false,
            collect_inner_values: false,
            epsilon_alpha: None,
            adaptive_inner: true,
        }
    }
}

/// A completed run: full trace, report, and exact gradient-evaluation
/// counters (one `∇_θ` per outer step; one `∇_α` per inner ascent step).
#[derive(Debug, Clone)]
pub struct GdaRun {
    pub trace: Vec<TraceRecord>,
    pub report: StationarityReport,
    pub inner_grad_evals: u64,
    pub outer_grad_evals: u64,
}

const MAX_INNER_DOUBLINGS: u32 = 3;

/// Runs exactly `k` gradient-ascent steps on `f(θ, ·)` from `alpha0` and
/// returns the final iterate together with the `f`-values `f(θ, α_0..=α_k)`.
///
/// With `eta1 <= 1/L22` the returned values are non-decreasing.
pub fn inner_ascent(
    problem: &ProblemSpec,
    theta: &Vector,
    alpha0: &Vector,
    k: u64,
    eta1: f64,
) -> Result<(Vector, Vec<f64>)> {
    problem.check_dims(theta, alpha0)?;
    if k == 0 {
        return Err(Error::InvalidConfig("inner_ascent requires k >= 1".into()));
    }
    if !(eta1.is_finite() && eta1 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "eta1 {eta1} must be finite and positive"
        )));
    }
    let mut alpha = alpha0.clone();
    let mut values = Vec::with_capacity(k as usize + 1);
    values.push(problem.value(theta, &alpha));
    for step in 0..k {
        let grad = problem.alpha_grad(theta, &alpha);
        alpha.axpy(eta1, &grad);
        if !alpha.all_finite() {
            return Err(Error::Diverged {
                outer: 0,
                inner: step,
                partial_trace: Vec::new(),
            });
        }
        values.push(problem.value(theta, &alpha));
    }
    Ok((alpha, values))
}

/// Multi-step gradient descent-ascent with the given schedule.
///
/// Deterministic: identical inputs produce bit-identical traces. Divergence
/// (a non-finite iterate) aborts with the partial trace attached.
pub fn run_multistep_gda(
    problem: &ProblemSpec,
    schedule: &ScheduleParams,
    init: (Vector, Vector),
    opts: RunOptions,
) -> Result<GdaRun> {
    run_gda_loop(problem, schedule, init, opts)
}

/// Baseline: simultaneous-style descent-ascent, i.e. the same loop with
/// `K` pinned to one step and no adaptive escalation. No stationarity
/// guarantee is claimed for it.
pub fn run_onestep_gda(
    problem: &ProblemSpec,
    eta1: f64,
    eta2: f64,
    t_outer: u64,
    epsilon: f64,
    init: (Vector, Vector),
    opts: RunOptions,
) -> Result<GdaRun> {
    let c = &problem.constants;
    let schedule = ScheduleParams {
        eta1,
        eta2,
        k_inner: 1,
        t_outer,
        rho: c.rho(),
        kappa: c.kappa(),
        l_outer: crate::solver::schedule::compute_outer_smoothness(c),
        l_bar: c.l_bar(),
        delta_inner: 0.0,
        delta_g: 0.0,
        epsilon,
        k_safety_multiplier: 1.0,
        k_safety_additive: 0,
    };
    let opts = RunOptions {
        adaptive_inner: false,
        ..opts
    };
    run_gda_loop(problem, &schedule, init, opts)
}

fn run_gda_loop(
    problem: &ProblemSpec,
    schedule: &ScheduleParams,
    init: (Vector, Vector),
    opts: RunOptions,
) -> Result<GdaRun> {
    schedule.validate()?;
    let (mut theta, mut alpha) = init;
    problem.check_dims(&theta, &alpha)?;
    if !theta.all_finite() || !alpha.all_finite() {
        return Err(Error::InvalidConfig("initial point must be finite".into()));
    }

    let eps = schedule.epsilon;
    let eps_alpha = opts.epsilon_alpha.unwrap_or(eps);
    let warnings = schedule.consistency_warnings(&problem.constants);
    let oracle = problem.oracle();

    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut escalations: Vec<u64> = Vec::new();
    let mut inner_grad_evals: u64 = 0;
    let mut outer_grad_evals: u64 = 0;
    let mut first_hit: Option<u64> = None;
    let mut best_index: u64 = 0;
    let mut best_norms = (f64::INFINITY, f64::INFINITY);
    let mut best_metric = f64::INFINITY;

    for t in 0..schedule.t_outer {
        // Inner loop, warm-started from the previous α_{t+1}.
        let mut inner_used: u64 = 0;
        let mut doublings: u32 = 0;
        let mut inner_values = if opts.collect_inner_values {
            Some(vec![problem.value(&theta, &alpha)])
        } else {
            None
        };
        let (alpha_grad, alpha_norm) = loop {
            let target = schedule
                .k_inner
                .saturating_mul(1u64 << doublings);
            while inner_used < target {
                let grad = problem.alpha_grad(&theta, &alpha);
                alpha.axpy(schedule.eta1, &grad);
                inner_used += 1;
                inner_grad_evals += 1;
                if !alpha.all_finite() {
                    return Err(Error::Diverged {
                        outer: t,
                        inner: inner_used,
                        partial_trace: trace,
                    });
                }
                if let Some(values) = inner_values.as_mut() {
                    values.push(problem.value(&theta, &alpha));
                }
            }
            let grad = problem.alpha_grad(&theta, &alpha);
            let norm = grad.norm();
            if !norm.is_finite() {
                return Err(Error::Diverged {
                    outer: t,
                    inner: inner_used,
                    partial_trace: trace,
                });
            }
            if norm <= eps_alpha || !opts.adaptive_inner || doublings >= MAX_INNER_DOUBLINGS {
                break (grad, norm);
            }
            if doublings == 0 {
                escalations.push(t);
            }
            doublings += 1;
        };
        let _ = alpha_grad;

        let theta_grad = problem.theta_grad(&theta, &alpha);
        outer_grad_evals += 1;
        let theta_norm = theta_grad.norm();
        if !theta_norm.is_finite() {
            return Err(Error::Diverged {
                outer: t,
                inner: inner_used,
                partial_trace: trace,
            });
        }
        let f_value = problem.value(&theta, &alpha);
        let (g_gap, danskin_gap) = match oracle {
            Some(o) => {
                let g = (o.g_value)(&theta);
                let dg = (o.g_grad)(&theta);
                (Some(g - f_value), Some(theta_grad.sub(&dg).norm()))
            }
            None => (None, None),
        };

        trace.push(TraceRecord {
            t,
            theta: theta.clone(),
            alpha: alpha.clone(),
            grad_theta_norm: theta_norm,
            grad_alpha_norm: alpha_norm,
            inner_iters_used: inner_used,
            f_value,
            g_gap,
            danskin_gap,
            inner_f_values: inner_values,
        });

        let metric = theta_norm.max(alpha_norm);
        if metric < best_metric {
            best_metric = metric;
            best_index = t;
            best_norms = (theta_norm, alpha_norm);
        }
        if first_hit.is_none() && theta_norm <= eps && alpha_norm <= eps_alpha {
            first_hit = Some(t);
            if opts.early_exit {
                break;
            }
        }

        // θ_{t+1} = θ_t - η2 ∇_θ f(θ_t, α_{t+1})
        theta.axpy(-schedule.eta2, &theta_grad);
        if !theta.all_finite() {
            return Err(Error::Diverged {
                outer: t,
                inner: inner_used,
                partial_trace: trace,
            });
        }
    }

    let report = StationarityReport {
        first_hit,
        best_index,
        best_norms,
        schedule: *schedule,
        converged: first_hit.is_some(),
        k_escalation_iters: escalations,
        warnings,
    };
    Ok(GdaRun {
        trace,
        report,
        inner_grad_evals,
        outer_grad_evals,
    })
}
