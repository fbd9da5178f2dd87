//! Gradient descent on the max-function `g` driven by the exact inner oracle,
//! with optional bounded gradient perturbation.
//!
//! This isolates the outer half of the analysis: the update
//! `θ_{t+1} = θ_t - η2 (∇g(θ_t) + e_t)` with `‖e_t‖ <= δ` must still reach a
//! small gradient within the standard budget, and each step must satisfy the
//! descent-with-error inequality
//! `g(θ_{t+1}) <= g(θ_t) - ‖∇g(θ_t)‖²/(2L) + δ²/(2L)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerturbationMode {
    /// `e_t = -δ ∇g/‖∇g‖`: cancels as much of the true gradient as the bound
    /// allows (a fixed axis direction when `∇g = 0`).
    Adversarial,
    /// Uniform direction on the sphere, radius `δ`, drawn from the seed.
    RandomSphere,
}

/// Bounded-noise specification for the oracle-driven descent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub magnitude: f64,
    pub mode: PerturbationMode,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleGdRecord {
    pub t: u64,
    pub theta: Vector,
    pub g_value: f64,
    pub grad_g_norm: f64,
    pub perturbation_norm: f64,
}

#[derive(Debug, Clone)]
pub struct OracleGdRun {
    /// One record per iteration `t = 0..T-1`, evaluated before the update.
    pub trace: Vec<OracleGdRecord>,
    /// State after the last update, closing the final descent inequality.
    pub final_theta: Vector,
    pub final_g_value: f64,
    pub min_grad_norm: f64,
    pub min_index: u64,
}

/// Runs `t_outer` perturbed gradient-descent steps on `g` from `theta0`.
///
/// Requires the problem's inner oracle. The perturbation generator is seeded
/// and deterministic; with `None` the descent is exact.
pub fn run_oracle_gd(
    problem: &ProblemSpec,
    eta2: f64,
    t_outer: u64,
    theta0: Vector,
    perturbation: Option<Perturbation>,
) -> Result<OracleGdRun> {
    let oracle = problem.require_oracle("run_oracle_gd")?;
    if !(eta2.is_finite() && eta2 > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "eta2 {eta2} must be finite and positive"
        )));
    }
    if t_outer == 0 {
        return Err(Error::InvalidConfig("t_outer must be >= 1".into()));
    }
    if theta0.dim() != problem.dim_theta || !theta0.all_finite() {
        return Err(Error::InvalidConfig(
            "theta0 must be finite and of the problem's outer dimension".into(),
        ));
    }
    if let Some(p) = &perturbation {
        if !(p.magnitude.is_finite() && p.magnitude >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "perturbation magnitude {} must be finite and non-negative",
                p.magnitude
            )));
        }
    }

    let mut rng = perturbation.map(|p| ChaCha8Rng::seed_from_u64(p.seed));
    let mut theta = theta0;
    let mut trace = Vec::with_capacity(t_outer as usize);
    let mut min_grad_norm = f64::INFINITY;
    let mut min_index = 0u64;

    for t in 0..t_outer {
        let grad = (oracle.g_grad)(&theta);
        let grad_norm = grad.norm();
        if !grad_norm.is_finite() {
            return Err(Error::Diverged {
                outer: t,
                inner: 0,
                partial_trace: Vec::new(),
            });
        }
        let noise = match &perturbation {
            Some(p) if p.magnitude > 0.0 => {
                perturbation_vector(p, &grad, grad_norm, rng.as_mut().unwrap())
            }
            _ => Vector::zeros(theta.dim()),
        };
        let noise_norm = noise.norm();
        trace.push(OracleGdRecord {
            t,
            theta: theta.clone(),
            g_value: (oracle.g_value)(&theta),
            grad_g_norm: grad_norm,
            perturbation_norm: noise_norm,
        });
        if grad_norm < min_grad_norm {
            min_grad_norm = grad_norm;
            min_index = t;
        }
        theta.axpy(-eta2, &grad.add(&noise));
        if !theta.all_finite() {
            return Err(Error::Diverged {
                outer: t,
                inner: 0,
                partial_trace: Vec::new(),
            });
        }
    }
    let final_g_value = (oracle.g_value)(&theta);
    Ok(OracleGdRun {
        trace,
        final_theta: theta,
        final_g_value,
        min_grad_norm,
        min_index,
    })
}

fn perturbation_vector(
    p: &Perturbation,
    grad: &Vector,
    grad_norm: f64,
    rng: &mut ChaCha8Rng,
) -> Vector {
    match p.mode {
        PerturbationMode::Adversarial => {
            if grad_norm > 0.0 {
                grad.scale(-p.magnitude / grad_norm)
            } else {
                let mut e = vec![0.0; grad.dim()];
                e[0] = p.magnitude;
                Vector::from_raw(e)
            }
        }
        PerturbationMode::RandomSphere => {
            // Box-Muller normals, normalized to the sphere.
            loop {
                let normals: Vec<f64> = (0..grad.dim())
                    .map(|_| {
                        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                        let u2: f64 = rng.random_range(0.0..1.0);
                        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
                    })
                    .collect();
                let dir = Vector::from_raw(normals);
                let norm = dir.norm();
                if norm > 1e-12 {
                    return dir.scale(p.magnitude / norm);
                }
            }
        }
    }
}
