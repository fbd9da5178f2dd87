//! Step-size and iteration-budget schedules.
//!
//! With declared constants `(L11, L22, L12, μ)` the derived quantities are
//!
//! * `κ = L22/μ`, `ρ = 1 - μ/L22` — inner condition number and linear rate,
//! * `L̄ = max(L12, L22)`,
//! * `L = L11 + L12²/μ` — smoothness of the max-function `g`,
//! * `η1 = 1/L22`, `η2 = 1/L`,
//! * `K ≥ N1(ε) = (2 ln(1/ε) + ln(16 L̄² Δ / μ)) / ln(1/ρ)` — inner steps per
//!   outer step, where `Δ` bounds the inner optimality gap at every inner
//!   warm start,
//! * `T ≥ ceil(18 L Δg / ε²)` — outer steps, where `Δg = g(θ0) - g*`.
//!
//! `K` carries configurable safety factors (a multiplier and an additive
//! margin) because the end-to-end guarantee is verified empirically rather
//! than trusted from the printed constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::SmoothnessConstants;

/// Safety margin applied to the inner budget: `K = ceil(multiplier * N1) + additive`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SafetyFactors {
    pub multiplier: f64,
    pub additive: u32,
}

impl Default for SafetyFactors {
    fn default() -> Self {
        SafetyFactors {
            multiplier: 1.5,
            additive: 5,
        }
    }
}

impl SafetyFactors {
    pub fn new(multiplier: f64, additive: u32) -> Result<Self> {
        if !(multiplier.is_finite() && multiplier >= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "safety multiplier {multiplier} must be finite and >= 1"
            )));
        }
        Ok(SafetyFactors {
            multiplier,
            additive,
        })
    }
}

/// Fully-derived run parameters for one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleParams {
    /// Inner (ascent) step size.
    pub eta1: f64,
    /// Outer (descent) step size.
    pub eta2: f64,
    /// Inner ascent steps per outer step.
    pub k_inner: u64,
    /// Outer iteration budget.
    pub t_outer: u64,
    /// Inner linear-rate factor `1 - mu/l22`.
    pub rho: f64,
    /// Inner condition number `l22/mu`.
    pub kappa: f64,
    /// Smoothness constant of the max-function `g`.
    pub l_outer: f64,
    /// `max(l12, l22)`.
    pub l_bar: f64,
    /// Uniform bound on the inner optimality gap at warm starts.
    pub delta_inner: f64,
    /// Initial outer optimality gap `g(θ0) - g*`.
    pub delta_g: f64,
    /// Target stationarity tolerance.
    pub epsilon: f64,
    pub k_safety_multiplier: f64,
    pub k_safety_additive: u32,
}

/// Smoothness constant of `g(θ) = max_α f(θ, α)`: `L = L11 + L12²/μ`.
pub fn compute_outer_smoothness(c: &SmoothnessConstants) -> f64 {
    c.l11 + c.l12 * c.l12 / c.mu
}

/// Inner iteration budget `K`.
///
/// Evaluates `N1(ε) = (2 ln(1/ε) + ln(16 L̄² Δ / μ)) / ln(1/ρ)` (natural
/// logarithms) and returns `max(1, ceil(multiplier * N1) + additive)`.
/// When `ρ = 0` (condition number 1) a single exact ascent step suffices and
/// the formula is bypassed; the same floor applies when `N1 <= 0` (the target
/// `ε` is already reachable from the warm-start gap).
pub fn compute_inner_budget(
    epsilon: f64,
    c: &SmoothnessConstants,
    delta_inner: f64,
    safety: SafetyFactors,
) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} must be finite and positive"
        )));
    }
    if !(delta_inner.is_finite() && delta_inner >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "delta_inner {delta_inner} must be finite and non-negative"
        )));
    }
    c.validate()?;
    let floor = u64::from(safety.additive) + 1;
    let rho = c.rho();
    if rho <= 0.0 {
        return Ok(floor.max(1));
    }
    let l_bar = c.l_bar();
    // delta_inner = 0 gives ln(0) = -inf and falls through to the floor.
    let n1 = (2.0 * (1.0 / epsilon).ln() + (16.0 * l_bar * l_bar * delta_inner / c.mu).ln())
        / (1.0 / rho).ln();
    if n1.is_nan() || n1 <= 0.0 {
        return Ok(floor.max(1));
    }
    let k = (safety.multiplier * n1).ceil() as u64 + u64::from(safety.additive);
    Ok(k.max(1))
}

/// Outer iteration budget `T = ceil(18 L Δg / ε²)`, clamped to at least 1.
pub fn compute_outer_budget(epsilon: f64, l_outer: f64, delta_g: f64) -> Result<u64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} must be finite and positive"
        )));
    }
    if !(l_outer.is_finite() && l_outer > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "l_outer {l_outer} must be finite and positive"
        )));
    }
    if !(delta_g.is_finite() && delta_g >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "delta_g {delta_g} must be finite and non-negative"
        )));
    }
    let t = (18.0 * l_outer * delta_g / (epsilon * epsilon)).ceil();
    Ok((t as u64).max(1))
}

impl ScheduleParams {
    /// Derives the full auto schedule from declared constants.
    pub fn derive(
        c: &SmoothnessConstants,
        epsilon: f64,
        delta_inner: f64,
        delta_g: f64,
        safety: SafetyFactors,
    ) -> Result<ScheduleParams> {
        c.validate()?;
        let l_outer = compute_outer_smoothness(c);
        let k_inner = compute_inner_budget(epsilon, c, delta_inner, safety)?;
        let t_outer = compute_outer_budget(epsilon, l_outer, delta_g)?;
        Ok(ScheduleParams {
            eta1: 1.0 / c.l22,
            eta2: 1.0 / l_outer,
            k_inner,
            t_outer,
            rho: c.rho(),
            kappa: c.kappa(),
            l_outer,
            l_bar: c.l_bar(),
            delta_inner,
            delta_g,
            epsilon,
            k_safety_multiplier: safety.multiplier,
            k_safety_additive: safety.additive,
        })
    }

    /// Flags values that disagree with the problem's declared constants.
    /// Mismatches are reported, not rejected: manual overrides are allowed.
    pub fn consistency_warnings(&self, c: &SmoothnessConstants) -> Vec<String> {
        let mut warnings = Vec::new();
        let mut check = |name: &str, got: f64, expect: f64| {
            if (got - expect).abs() > 1e-12 * expect.abs().max(1.0) {
                warnings.push(format!(
                    "schedule {name} = {got} differs from value {expect} derived from the declared constants"
                ));
            }
        };
        check("rho", self.rho, c.rho());
        check("kappa", self.kappa, c.kappa());
        check("l_bar", self.l_bar, c.l_bar());
        check("l_outer", self.l_outer, compute_outer_smoothness(c));
        check("eta1", self.eta1, 1.0 / c.l22);
        check("eta2", self.eta2, 1.0 / compute_outer_smoothness(c));
        warnings
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("epsilon", self.epsilon),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "schedule {name} = {v} must be finite and positive"
                )));
            }
        }
        if self.k_inner == 0 {
            return Err(Error::InvalidConfig("k_inner must be >= 1".into()));
        }
        if self.t_outer == 0 {
            return Err(Error::InvalidConfig("t_outer must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad2d_constants() -> SmoothnessConstants {
        SmoothnessConstants {
            l11: 1.0,
            l22: 4.0,
            l12: std::f64::consts::SQRT_2,
            mu: 1.0,
        }
    }

    #[test]
    fn outer_smoothness_examples() {
        // direct substitution
        assert!((compute_outer_smoothness(&quad2d_constants()) - 3.0).abs() < 1e-15);
        // equals the exact g'' of the degenerate problem
        let deg = SmoothnessConstants {
            l11: 0.0,
            l22: 2.0,
            l12: std::f64::consts::SQRT_2,
            mu: 2.0,
        };
        assert!((compute_outer_smoothness(&deg) - 1.0).abs() < 1e-15);
        // equals the exact g'' of the scalar strongly-concave problem
        let sc = SmoothnessConstants {
            l11: 1.0,
            l22: 1.0,
            l12: 1.0,
            mu: 1.0,
        };
        assert!((compute_outer_smoothness(&sc) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn inner_budget_matches_hand_evaluation() {
        // N1 = (2 ln 10 + ln 160) / ln(4/3) ≈ 33.65 with l_bar = 4, Δ = 0.625
        let k = compute_inner_budget(
            0.1,
            &quad2d_constants(),
            0.625,
            SafetyFactors {
                multiplier: 1.0,
                additive: 0,
            },
        )
        .unwrap();
        assert_eq!(k, 34);
        let n1 = (2.0 * 10.0_f64.ln() + 160.0_f64.ln()) / (4.0_f64 / 3.0).ln();
        assert!((n1 - 33.65).abs() < 0.01);
    }

    #[test]
    fn inner_budget_condition_number_one() {
        // κ = 1 means ρ = 0: one exact ascent step
        let sc = SmoothnessConstants {
            l11: 1.0,
            l22: 1.0,
            l12: 1.0,
            mu: 1.0,
        };
        for eps in [1.0, 0.1, 1e-6] {
            let k = compute_inner_budget(
                eps,
                &sc,
                7.0,
                SafetyFactors {
                    multiplier: 1.0,
                    additive: 0,
                },
            )
            .unwrap();
            assert_eq!(k, 1);
        }
    }

    #[test]
    fn inner_budget_boundary_n1_zero() {
        // 16 l_bar² Δ / μ = 1 and ε = 1 makes N1 = 0 exactly
        let c = SmoothnessConstants {
            l11: 1.0,
            l22: 1.0,
            l12: 0.5,
            mu: 0.5,
        };
        let delta = c.mu / 16.0;
        let k = compute_inner_budget(
            1.0,
            &c,
            delta,
            SafetyFactors {
                multiplier: 1.0,
                additive: 0,
            },
        )
        .unwrap();
        assert_eq!(k, 1);
    }

    #[test]
    fn outer_budget_examples() {
        assert_eq!(compute_outer_budget(0.1, 3.0, 1.125).unwrap(), 6075);
        // ε⁻² scaling: halving ε quadruples the budget
        assert_eq!(compute_outer_budget(0.05, 3.0, 1.125).unwrap(), 24300);
        // degenerate start clamps to one iteration
        assert_eq!(compute_outer_budget(0.1, 3.0, 0.0).unwrap(), 1);
    }

    #[test]
    fn derive_quad2d_auto_schedule() {
        let s = ScheduleParams::derive(&quad2d_constants(), 0.1, 2.5, 1.125, SafetyFactors::default())
            .unwrap();
        assert_eq!(s.eta1, 0.25);
        assert!((s.eta2 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.rho, 0.75);
        assert_eq!(s.kappa, 4.0);
        assert_eq!(s.l_bar, 4.0);
        assert!(s.consistency_warnings(&quad2d_constants()).is_empty());
        assert!(s.validate().is_ok());
    }
}
