//! Multi-step gradient descent-ascent for smooth min-max games whose inner
//! maximization satisfies a Polyak-Lojasiewicz (PL) condition.
//!
//! The library is organized around a small set of pieces:
//!
//! * [`problem`] — the problem-instance interface ([`ProblemSpec`]): black-box
//!   evaluators for `f`, its two gradient blocks, declared smoothness/PL
//!   constants and an optional exact inner oracle for `g(θ) = max_α f(θ, α)`.
//! * [`problems`] — built-in test problems with hand-derived constants and
//!   closed-form inner oracles, covering the strongly-concave, PL-non-concave
//!   and degenerate (set-valued argmax) regimes.
//! * [`solver`] — the multi-step descent-ascent iteration with its derived
//!   step-size/iteration schedules, a one-step baseline, and inexact gradient
//!   descent driven directly by the oracle.
//! * [`diagnostics`] — seeded estimators and verifiers for every constant the
//!   schedules rely on (PL, quadratic growth, Lipschitz blocks, argmax
//!   stability, smoothness of `g`).
//! * [`experiment`] — reproducible run/sweep harness with CSV traces, JSON
//!   summaries and SVG plot emission.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod gradcheck;
pub mod problem;
pub mod problems;
pub mod solver;
pub mod vector;

pub use error::{Error, Result};
pub use gradcheck::{check_gradients, stationarity_norms, GradCheckReport};
pub use problem::{InnerOracle, ProblemSpec, SmoothnessConstants};
pub use problems::BuiltinProblem;
pub use solver::{ScheduleParams, StationarityReport, TraceRecord};
pub use vector::Vector;
