//! Finite-difference gradient checking and stationarity measurement.

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::vector::Vector;

/// Default central-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Maximum relative error between analytic and central-difference gradients,
/// reported separately for the two blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport {
    pub theta_max_rel_err: f64,
    pub alpha_max_rel_err: f64,
}

impl GradCheckReport {
    pub fn max(&self) -> f64 {
        self.theta_max_rel_err.max(self.alpha_max_rel_err)
    }
}

/// Compares the analytic gradient blocks of `problem` against central finite
/// differences of `eval_f` at `(theta, alpha)`.
///
/// The per-coordinate error is `|fd - analytic| / max(1, |analytic|)`; the
/// report carries the maximum over each block. `step` must lie in
/// `[1e-8, 1e-3]` and the point must be inside the problem's sampling box.
pub fn check_gradients(
    problem: &ProblemSpec,
    theta: &Vector,
    alpha: &Vector,
    step: f64,
) -> Result<GradCheckReport> {
    problem.check_dims(theta, alpha)?;
    if !(1e-8..=1e-3).contains(&step) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step {step} outside [1e-8, 1e-3]"
        )));
    }
    if !problem.in_box(theta) || !problem.in_box(alpha) {
        return Err(Error::InvalidConfig(format!(
            "probe point outside the sampling box of `{}` (radius {})",
            problem.name, problem.box_radius
        )));
    }

    let analytic_theta = problem.theta_grad(theta, alpha);
    let analytic_alpha = problem.alpha_grad(theta, alpha);

    let theta_max_rel_err = block_error(
        |t| problem.value(t, alpha),
        theta,
        &analytic_theta,
        step,
        "theta gradient",
    )?;
    let alpha_max_rel_err = block_error(
        |a| problem.value(theta, a),
        alpha,
        &analytic_alpha,
        step,
        "alpha gradient",
    )?;

    Ok(GradCheckReport {
        theta_max_rel_err,
        alpha_max_rel_err,
    })
}

fn block_error<F: Fn(&Vector) -> f64>(
    f: F,
    point: &Vector,
    analytic: &Vector,
    step: f64,
    what: &'static str,
) -> Result<f64> {
    let mut probe: Vec<f64> = point.as_slice().to_vec();
    let mut max_err = 0.0_f64;
    for i in 0..point.dim() {
        let center = point[i];
        probe[i] = center + step;
        let plus = f(&Vector::from_raw(probe.clone()));
        probe[i] = center - step;
        let minus = f(&Vector::from_raw(probe.clone()));
        probe[i] = center;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::EvaluationFailure {
                what: "function value",
                coordinate: i,
            });
        }
        let fd = (plus - minus) / (2.0 * step);
        let a = analytic[i];
        if !a.is_finite() {
            return Err(Error::EvaluationFailure {
                what,
                coordinate: i,
            });
        }
        let err = (fd - a).abs() / 1.0_f64.max(a.abs());
        max_err = max_err.max(err);
    }
    Ok(max_err)
}

/// Euclidean norms of the two gradient blocks at `(theta, alpha)`.
///
/// A pair is ε-stationary when both returned norms are `<= ε`.
pub fn stationarity_norms(problem: &ProblemSpec, theta: &Vector, alpha: &Vector) -> Result<(f64, f64)> {
    problem.check_dims(theta, alpha)?;
    let gt = problem.theta_grad(theta, alpha);
    let ga = problem.alpha_grad(theta, alpha);
    for (block, grad) in [("theta gradient", &gt), ("alpha gradient", &ga)] {
        if let Some(i) = grad.iter().position(|v| !v.is_finite()) {
            let what: &'static str = if block.starts_with("theta") {
                "theta gradient"
            } else {
                "alpha gradient"
            };
            return Err(Error::EvaluationFailure {
                what,
                coordinate: i,
            });
        }
    }
    Ok((gt.norm(), ga.norm()))
}
