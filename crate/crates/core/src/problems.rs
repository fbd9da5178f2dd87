//! Built-in min-max test problems with hand-derived constants and exact
//! inner oracles.
//!
//! The suite spans three regimes of the inner maximization:
//!
//! * `quad-sc` — strongly concave scalar quadratic, condition number 1.
//! * `quad-2d` — anisotropic concave quadratic (condition number 4); the
//!   workhorse instance for schedule and rate checks.
//! * `pl-sin` — genuinely non-concave inner objective whose negation
//!   `x² + 3 sin² x` satisfies the PL inequality with constant `1/32`.
//! * `quad-degenerate` — the argmax is an affine line (set-valued), which
//!   exercises stability and quadratic-growth measurements on a solution set.

use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{InnerOracle, ProblemSpec, SmoothnessConstants};
use crate::vector::Vector;

/// Names accepted everywhere a problem can be selected.
pub const PROBLEM_NAMES: [&str; 4] = ["quad-sc", "quad-2d", "pl-sin", "quad-degenerate"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinProblem {
    QuadSc,
    Quad2d,
    PlSin,
    QuadDegenerate,
}

impl BuiltinProblem {
    pub fn all() -> [BuiltinProblem; 4] {
        [
            BuiltinProblem::QuadSc,
            BuiltinProblem::Quad2d,
            BuiltinProblem::PlSin,
            BuiltinProblem::QuadDegenerate,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinProblem::QuadSc => "quad-sc",
            BuiltinProblem::Quad2d => "quad-2d",
            BuiltinProblem::PlSin => "pl-sin",
            BuiltinProblem::QuadDegenerate => "quad-degenerate",
        }
    }
}

impl std::fmt::Display for BuiltinProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinProblem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quad-sc" => Ok(BuiltinProblem::QuadSc),
            "quad-2d" => Ok(BuiltinProblem::Quad2d),
            "pl-sin" => Ok(BuiltinProblem::PlSin),
            "quad-degenerate" => Ok(BuiltinProblem::QuadDegenerate),
            other => Err(Error::UnknownProblem {
                name: other.to_string(),
                valid: PROBLEM_NAMES.join(", "),
            }),
        }
    }
}

/// Materializes a built-in instance.
pub fn make_problem(which: BuiltinProblem) -> ProblemSpec {
    match which {
        BuiltinProblem::QuadSc => quad_sc(),
        BuiltinProblem::Quad2d => quad_2d(),
        BuiltinProblem::PlSin => pl_sin(),
        BuiltinProblem::QuadDegenerate => quad_degenerate(),
    }
}

/// Looks a problem up by name.
pub fn problem_by_name(name: &str) -> Result<ProblemSpec> {
    Ok(make_problem(BuiltinProblem::from_str(name)?))
}

/// Exact minimal pairing distance between the argmax sets at two scalar outer
/// points. All built-in problems have scalar `θ`.
pub fn oracle_argmax_distance(which: BuiltinProblem, theta1: f64, theta2: f64) -> Result<f64> {
    let problem = make_problem(which);
    let oracle = problem.require_oracle("oracle_argmax_distance")?;
    let t1 = Vector::new(vec![theta1])?;
    let t2 = Vector::new(vec![theta2])?;
    Ok(oracle.set_distance(&t1, &t2))
}

/// `f = 0.5 θ² + θα - 0.5 α²`. Constants `(L11, L22, L12, μ) = (1, 1, 1, 1)`,
/// so `κ = 1` and the inner problem is solved by a single exact ascent step.
/// `g(θ) = θ²` with `g'' = 2`.
fn quad_sc() -> ProblemSpec {
    ProblemSpec {
        name: "quad-sc".into(),
        dim_theta: 1,
        dim_alpha: 1,
        eval_f: Arc::new(|t: &Vector, a: &Vector| {
            0.5 * t[0] * t[0] + t[0] * a[0] - 0.5 * a[0] * a[0]
        }),
        grad_theta: Arc::new(|t: &Vector, a: &Vector| Vector::from_raw(vec![t[0] + a[0]])),
        grad_alpha: Arc::new(|t: &Vector, a: &Vector| Vector::from_raw(vec![t[0] - a[0]])),
        constants: SmoothnessConstants {
            l11: 1.0,
            l22: 1.0,
            l12: 1.0,
            mu: 1.0,
        },
        inner_oracle: Some(InnerOracle {
            g_value: Arc::new(|t: &Vector| t[0] * t[0]),
            g_grad: Arc::new(|t: &Vector| Vector::from_raw(vec![2.0 * t[0]])),
            argmax_point: Arc::new(|t: &Vector| Vector::from_raw(vec![t[0]])),
            argmax_set_distance: None,
            dist_to_argmax: None,
            g_star: Some(0.0),
        }),
        default_init: (Vector::from_raw(vec![1.0]), Vector::from_raw(vec![0.0])),
        box_radius: 10.0,
    }
}

/// `f = 0.5 θ² + θ(α₁ + α₂) - 0.5 (α₁² + 4 α₂²)`. Constants
/// `(1, 4, √2, 1)`, so `κ = 4`, `ρ = 0.75`. Argmax `α*(θ) = (θ, θ/4)`,
/// `g(θ) = 1.125 θ²`.
fn quad_2d() -> ProblemSpec {
    ProblemSpec {
        name: "quad-2d".into(),
        dim_theta: 1,
        dim_alpha: 2,
        eval_f: Arc::new(|t: &Vector, a: &Vector| {
            0.5 * t[0] * t[0] + t[0] * (a[0] + a[1]) - 0.5 * (a[0] * a[0] + 4.0 * a[1] * a[1])
        }),
        grad_theta: Arc::new(|t: &Vector, a: &Vector| Vector::from_raw(vec![t[0] + a[0] + a[1]])),
        grad_alpha: Arc::new(|t: &Vector, a: &Vector| {
            Vector::from_raw(vec![t[0] - a[0], t[0] - 4.0 * a[1]])
        }),
        constants: SmoothnessConstants {
            l11: 1.0,
            l22: 4.0,
            l12: std::f64::consts::SQRT_2,
            mu: 1.0,
        },
        inner_oracle: Some(InnerOracle {
            g_value: Arc::new(|t: &Vector| 1.125 * t[0] * t[0]),
            g_grad: Arc::new(|t: &Vector| Vector::from_raw(vec![2.25 * t[0]])),
            argmax_point: Arc::new(|t: &Vector| Vector::from_raw(vec![t[0], t[0] / 4.0])),
            argmax_set_distance: None,
            dist_to_argmax: None,
            g_star: Some(0.0),
        }),
        default_init: (
            Vector::from_raw(vec![1.0]),
            Vector::from_raw(vec![0.0, 0.0]),
        ),
        box_radius: 10.0,
    }
}

/// `f = 0.5 θ² - (α - θ)² - 3 sin²(α - θ)`. The negated inner objective is
/// `x² + 3 sin² x` (shifted), which is non-concave in `α` yet `1/32`-PL.
/// Declared constants `(9, 8, 8, 1/32)` are conservative upper bounds;
/// `κ = 256`. Argmax `α*(θ) = θ`, `g(θ) = 0.5 θ²`.
fn pl_sin() -> ProblemSpec {
    ProblemSpec {
        name: "pl-sin".into(),
        dim_theta: 1,
        dim_alpha: 1,
        eval_f: Arc::new(|t: &Vector, a: &Vector| {
            let x = a[0] - t[0];
            0.5 * t[0] * t[0] - x * x - 3.0 * x.sin() * x.sin()
        }),
        grad_theta: Arc::new(|t: &Vector, a: &Vector| {
            let x = a[0] - t[0];
            Vector::from_raw(vec![t[0] + 2.0 * x + 3.0 * (2.0 * x).sin()])
        }),
        grad_alpha: Arc::new(|t: &Vector, a: &Vector| {
            let x = a[0] - t[0];
            Vector::from_raw(vec![-2.0 * x - 3.0 * (2.0 * x).sin()])
        }),
        constants: SmoothnessConstants {
            l11: 9.0,
            l22: 8.0,
            l12: 8.0,
            mu: 1.0 / 32.0,
        },
        inner_oracle: Some(InnerOracle {
            g_value: Arc::new(|t: &Vector| 0.5 * t[0] * t[0]),
            g_grad: Arc::new(|t: &Vector| Vector::from_raw(vec![t[0]])),
            argmax_point: Arc::new(|t: &Vector| Vector::from_raw(vec![t[0]])),
            argmax_set_distance: None,
            dist_to_argmax: None,
            g_star: Some(0.0),
        }),
        default_init: (Vector::from_raw(vec![2.0]), Vector::from_raw(vec![0.0])),
        box_radius: 10.0,
    }
}

/// `f = θ(α₁ + α₂) - 0.5 (α₁ + α₂ - 1)²`. Linear in `θ` (so `L11 = 0`) and
/// maximized on the affine line `A(θ) = {α : α₁ + α₂ = 1 + θ}`. Constants
/// `(0, 2, √2, 2)`; `g(θ) = 0.5 θ² + θ` with minimum `-0.5` at `θ = -1`.
fn quad_degenerate() -> ProblemSpec {
    ProblemSpec {
        name: "quad-degenerate".into(),
        dim_theta: 1,
        dim_alpha: 2,
        eval_f: Arc::new(|t: &Vector, a: &Vector| {
            let s = a[0] + a[1];
            t[0] * s - 0.5 * (s - 1.0) * (s - 1.0)
        }),
        grad_theta: Arc::new(|_t: &Vector, a: &Vector| Vector::from_raw(vec![a[0] + a[1]])),
        grad_alpha: Arc::new(|t: &Vector, a: &Vector| {
            let r = t[0] - (a[0] + a[1] - 1.0);
            Vector::from_raw(vec![r, r])
        }),
        constants: SmoothnessConstants {
            l11: 0.0,
            l22: 2.0,
            l12: std::f64::consts::SQRT_2,
            mu: 2.0,
        },
        inner_oracle: Some(InnerOracle {
            g_value: Arc::new(|t: &Vector| 0.5 * t[0] * t[0] + t[0]),
            g_grad: Arc::new(|t: &Vector| Vector::from_raw(vec![t[0] + 1.0])),
            argmax_point: Arc::new(|t: &Vector| {
                let half = 0.5 * (1.0 + t[0]);
                Vector::from_raw(vec![half, half])
            }),
            // parallel lines α₁ + α₂ = 1 + θ at distance |θ1 - θ2| / √2
            argmax_set_distance: Some(Arc::new(|t1: &Vector, t2: &Vector| {
                (t1[0] - t2[0]).abs() / std::f64::consts::SQRT_2
            })),
            dist_to_argmax: Some(Arc::new(|t: &Vector, a: &Vector| {
                (a[0] + a[1] - 1.0 - t[0]).abs() / std::f64::consts::SQRT_2
            })),
            g_star: Some(-0.5),
        }),
        default_init: (
            Vector::from_raw(vec![0.0]),
            Vector::from_raw(vec![0.0, 0.0]),
        ),
        box_radius: 10.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[f64]) -> Vector {
        Vector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn name_round_trip() {
        for p in BuiltinProblem::all() {
            assert_eq!(BuiltinProblem::from_str(p.name()).unwrap(), p);
        }
        let err = BuiltinProblem::from_str("nope").unwrap_err();
        assert!(err.to_string().contains("quad-2d"));
    }

    #[test]
    fn quad2d_value_example() {
        let p = make_problem(BuiltinProblem::Quad2d);
        assert_eq!(p.value(&v(&[1.0]), &v(&[0.0, 0.0])), 0.5);
    }

    #[test]
    fn pl_sin_residual_vanishes_on_diagonal() {
        let p = make_problem(BuiltinProblem::PlSin);
        let g = p.oracle().unwrap().g_value.clone();
        for theta in [-3.0, -0.5, 0.0, 1.7, 2.0] {
            let t = v(&[theta]);
            let f = p.value(&t, &v(&[theta]));
            assert!((f - 0.5 * theta * theta).abs() < 1e-15);
            assert!((f - g(&t)).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_theta_grad_independent_of_theta() {
        let p = make_problem(BuiltinProblem::QuadDegenerate);
        let a = v(&[0.3, -1.2]);
        let g1 = p.theta_grad(&v(&[0.0]), &a);
        let g2 = p.theta_grad(&v(&[5.0]), &a);
        assert_eq!(g1, g2);
        assert!((g1[0] - (0.3 + -1.2)).abs() < 1e-15);
    }

    #[test]
    fn argmax_distance_examples() {
        // parallel lines α₁+α₂ = 1 and α₁+α₂ = 2
        let d = oracle_argmax_distance(BuiltinProblem::QuadDegenerate, 0.0, 1.0).unwrap();
        assert!((d - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);

        // unique argmax map θ ↦ (θ, θ/4)
        let d = oracle_argmax_distance(BuiltinProblem::Quad2d, 0.0, 1.0).unwrap();
        assert!((d - (1.0_f64 + 1.0 / 16.0).sqrt()).abs() < 1e-12);

        for p in BuiltinProblem::all() {
            let d = oracle_argmax_distance(p, 0.7, 0.7).unwrap();
            assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn oracle_first_order_identities() {
        for which in BuiltinProblem::all() {
            let p = make_problem(which);
            let oracle = p.oracle().unwrap();
            for theta in [-2.5, -1.0, 0.0, 0.3, 1.0, 4.0] {
                let t = v(&[theta]);
                let astar = (oracle.argmax_point)(&t);
                // stationarity of the inner maximizer
                assert!(
                    p.alpha_grad(&t, &astar).norm() <= 1e-10,
                    "{which}: inner gradient at argmax"
                );
                // gradient of g equals the theta block at the argmax
                let gap = p.theta_grad(&t, &astar).sub(&(oracle.g_grad)(&t)).norm();
                assert!(gap <= 1e-10, "{which}: danskin identity, gap {gap}");
                // g matches f at the argmax
                assert!(((oracle.g_value)(&t) - p.value(&t, &astar)).abs() <= 1e-10);
            }
        }
    }
}
