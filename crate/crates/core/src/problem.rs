//! The min-max problem-instance interface.
//!
//! A [`ProblemSpec`] is a black-box view of `min_θ max_α f(θ, α)`: evaluators
//! for `f` and its two gradient blocks, declared smoothness/PL constants, and
//! optionally an exact inner oracle for `g(θ) = max_α f(θ, α)`. Evaluators
//! must be pure (no mutable captured state) and are shared across threads.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

/// `f(θ, α)`.
pub type ValueFn = Arc<dyn Fn(&Vector, &Vector) -> f64 + Send + Sync>;
/// A gradient block of `f`.
pub type GradFn = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;
/// Scalar function of `θ` alone (`g`, for oracle problems).
pub type OuterValueFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
/// Vector function of `θ` alone (`∇g`, argmax selection).
pub type OuterVecFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
/// Distance between two argmax sets, minimized over pairings.
pub type SetDistanceFn = Arc<dyn Fn(&Vector, &Vector) -> f64 + Send + Sync>;
/// Distance from a point `α` to the argmax set `A(θ)`.
pub type PointSetDistanceFn = Arc<dyn Fn(&Vector, &Vector) -> f64 + Send + Sync>;

/// Declared smoothness and PL constants of a problem instance.
///
/// `l11`, `l22`, `l12` are the Lipschitz constants of the two gradient blocks
/// (`l12` covers both cross terms); `mu` is the PL constant of the negated
/// inner objective `α ↦ -f(θ, α)`, uniform over `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessConstants {
    pub l11: f64,
    pub l22: f64,
    pub l12: f64,
    pub mu: f64,
}

impl SmoothnessConstants {
    pub fn new(l11: f64, l22: f64, l12: f64, mu: f64) -> Result<Self> {
        let c = SmoothnessConstants { l11, l22, l12, mu };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.l11, self.l22, self.l12, self.mu];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "smoothness constants must be finite".into(),
            ));
        }
        if self.l11 < 0.0 || self.l22 < 0.0 || self.l12 < 0.0 {
            return Err(Error::InvalidConfig(
                "Lipschitz constants must be non-negative".into(),
            ));
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidConfig("mu must be positive".into()));
        }
        if self.mu > self.l22 {
            return Err(Error::InvalidConfig(format!(
                "mu = {} exceeds l22 = {}; the inner condition number l22/mu must be >= 1",
                self.mu, self.l22
            )));
        }
        Ok(())
    }

    /// Inner condition number `κ = l22 / mu >= 1`.
    pub fn kappa(&self) -> f64 {
        self.l22 / self.mu
    }

    /// Inner linear-rate factor `ρ = 1 - mu / l22 ∈ [0, 1)`.
    pub fn rho(&self) -> f64 {
        1.0 - self.mu / self.l22
    }

    /// `max(l12, l22)`.
    pub fn l_bar(&self) -> f64 {
        self.l12.max(self.l22)
    }
}

/// Exact oracle for the inner maximization of an instance, used by the
/// diagnostics layer and by oracle-driven gradient descent.
#[derive(Clone)]
pub struct InnerOracle {
    /// `g(θ) = max_α f(θ, α)`.
    pub g_value: OuterValueFn,
    /// `∇g(θ)`.
    pub g_grad: OuterVecFn,
    /// One element of the argmax set `A(θ)`.
    pub argmax_point: OuterVecFn,
    /// `min` pairing distance between `A(θ1)` and `A(θ2)`; needed only when
    /// the argmax is set-valued (defaults to the distance of the selected
    /// points otherwise).
    pub argmax_set_distance: Option<SetDistanceFn>,
    /// Distance from `α` to `A(θ)`; needed for quadratic-growth estimation on
    /// set-valued problems (defaults to distance to `argmax_point`).
    pub dist_to_argmax: Option<PointSetDistanceFn>,
    /// `min_θ g(θ)` when known in closed form.
    pub g_star: Option<f64>,
}

impl InnerOracle {
    /// Distance between the argmax sets of two outer points.
    pub fn set_distance(&self, theta1: &Vector, theta2: &Vector) -> f64 {
        match &self.argmax_set_distance {
            Some(f) => f(theta1, theta2),
            None => (self.argmax_point)(theta1).distance(&(self.argmax_point)(theta2)),
        }
    }

    /// Distance from `alpha` to the argmax set at `theta`.
    pub fn point_distance(&self, theta: &Vector, alpha: &Vector) -> f64 {
        match &self.dist_to_argmax {
            Some(f) => f(theta, alpha),
            None => alpha.distance(&(self.argmax_point)(theta)),
        }
    }
}

/// A min-max problem instance.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub dim_theta: usize,
    pub dim_alpha: usize,
    pub eval_f: ValueFn,
    pub grad_theta: GradFn,
    pub grad_alpha: GradFn,
    pub constants: SmoothnessConstants,
    pub inner_oracle: Option<InnerOracle>,
    /// `(θ0, α0)` used when a run does not specify its own start.
    pub default_init: (Vector, Vector),
    /// Half-width of the per-coordinate sampling box `[-r, r]` used by
    /// sampling-based checks and estimators.
    pub box_radius: f64,
}

impl ProblemSpec {
    pub fn value(&self, theta: &Vector, alpha: &Vector) -> f64 {
        debug_assert_eq!(theta.dim(), self.dim_theta);
        debug_assert_eq!(alpha.dim(), self.dim_alpha);
        (self.eval_f)(theta, alpha)
    }

    pub fn theta_grad(&self, theta: &Vector, alpha: &Vector) -> Vector {
        (self.grad_theta)(theta, alpha)
    }

    pub fn alpha_grad(&self, theta: &Vector, alpha: &Vector) -> Vector {
        (self.grad_alpha)(theta, alpha)
    }

    pub fn oracle(&self) -> Option<&InnerOracle> {
        self.inner_oracle.as_ref()
    }

    pub fn require_oracle(&self, operation: &'static str) -> Result<&InnerOracle> {
        self.inner_oracle.as_ref().ok_or_else(|| Error::OracleRequired {
            problem: self.name.clone(),
            operation,
        })
    }

    pub fn check_dims(&self, theta: &Vector, alpha: &Vector) -> Result<()> {
        if theta.dim() != self.dim_theta || alpha.dim() != self.dim_alpha {
            return Err(Error::InvalidConfig(format!(
                "dimension mismatch for `{}`: got ({}, {}), expected ({}, {})",
                self.name,
                theta.dim(),
                alpha.dim(),
                self.dim_theta,
                self.dim_alpha
            )));
        }
        Ok(())
    }

    /// True when every coordinate of the point lies inside the sampling box.
    pub fn in_box(&self, point: &Vector) -> bool {
        point.iter().all(|v| v.abs() <= self.box_radius)
    }
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("dim_theta", &self.dim_theta)
            .field("dim_alpha", &self.dim_alpha)
            .field("constants", &self.constants)
            .field("has_oracle", &self.inner_oracle.is_some())
            .field("box_radius", &self.box_radius)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_validation() {
        assert!(SmoothnessConstants::new(1.0, 4.0, 1.0, 1.0).is_ok());
        // mu > l22 breaks kappa >= 1
        assert!(SmoothnessConstants::new(1.0, 1.0, 1.0, 2.0).is_err());
        assert!(SmoothnessConstants::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(SmoothnessConstants::new(-1.0, 1.0, 1.0, 0.5).is_err());
        assert!(SmoothnessConstants::new(f64::NAN, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn derived_quantities() {
        let c = SmoothnessConstants::new(1.0, 4.0, 2.0_f64.sqrt(), 1.0).unwrap();
        assert_eq!(c.kappa(), 4.0);
        assert_eq!(c.rho(), 0.75);
        assert_eq!(c.l_bar(), 4.0);
    }
}
