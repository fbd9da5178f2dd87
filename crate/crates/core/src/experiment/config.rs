//! Run configuration and its resolution into a fully-derived schedule.
//!
//! A [`RunConfig`] is the single human-editable input: a problem name, a
//! target ε (or sweep list), optional schedule overrides and an optional
//! start point. Resolution fills every unspecified schedule field from the
//! derivation formulas; fields that were supplied win and are flagged as
//! manual in the persisted output, so defaults drift can never silently
//! change a recorded result.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::problems::problem_by_name;
use crate::solver::{PerturbationMode, SafetyFactors, ScheduleParams};
use crate::vector::Vector;

/// A single tolerance or a sweep list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsilonSpec {
    Single(f64),
    Sweep(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    #[default]
    MultistepGda,
    OnestepGda,
    OracleGd,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::MultistepGda => "multistep-gda",
            Algorithm::OnestepGda => "onestep-gda",
            Algorithm::OracleGd => "oracle-gd",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "multistep-gda" => Ok(Algorithm::MultistepGda),
            "onestep-gda" => Ok(Algorithm::OnestepGda),
            "oracle-gd" => Ok(Algorithm::OracleGd),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm `{other}`; valid: multistep-gda, onestep-gda, oracle-gd"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
}

/// Optional manual schedule fields; anything left unset is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScheduleOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_inner: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_outer: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_safety_multiplier: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_safety_additive: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_g: Option<f64>,
}

/// Bounded-noise request for `oracle-gd` runs; the run seed is reused for the
/// noise generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationConfig {
    pub magnitude: f64,
    pub mode: PerturbationMode,
}

fn default_true() -> bool {
    true
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: String,
    pub epsilon: EpsilonSpec,
    #[serde(default)]
    pub algorithm: Algorithm,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub early_exit: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitSpec>,
    #[serde(default)]
    pub schedule: ScheduleOverrides,
    /// Separate α-block tolerance; defaults to `epsilon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationConfig>,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    /// Informational on output (which schedule fields were manual); accepted
    /// and ignored on input so persisted configs replay unchanged.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub manual_fields: Vec<String>,
}

impl RunConfig {
    /// Minimal config for one problem at one tolerance; everything derived.
    pub fn new(problem: &str, epsilon: f64) -> Self {
        RunConfig {
            problem: problem.to_string(),
            epsilon: EpsilonSpec::Single(epsilon),
            algorithm: Algorithm::default(),
            seed: 0,
            early_exit: true,
            output: None,
            init: None,
            schedule: ScheduleOverrides::default(),
            epsilon_alpha: None,
            perturbation: None,
            jobs: default_jobs(),
            manual_fields: Vec::new(),
        }
    }

    pub fn single_epsilon(&self) -> Result<f64> {
        match &self.epsilon {
            EpsilonSpec::Single(e) => Ok(*e),
            EpsilonSpec::Sweep(_) => Err(Error::InvalidConfig(
                "this operation needs a single epsilon; the config holds a sweep list".into(),
            )),
        }
    }
}

/// A config with every derived quantity filled in.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub problem: ProblemSpec,
    pub schedule: ScheduleParams,
    pub init: (Vector, Vector),
    pub manual_fields: Vec<String>,
    /// The input config with all schedule fields pinned, suitable for
    /// byte-identical replay.
    pub resolved_config: RunConfig,
}

/// Resolves a single-ε config against its problem: validates every field,
/// measures `Δ` and `Δg` through the oracle where they were not supplied,
/// and derives the remaining schedule fields.
pub fn resolve(config: &RunConfig) -> Result<ResolvedRun> {
    let problem = problem_by_name(&config.problem)?;
    let epsilon = config.single_epsilon()?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "epsilon {epsilon} must be finite and positive"
        )));
    }
    if let Some(ea) = config.epsilon_alpha {
        if !(ea.is_finite() && ea > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "epsilon_alpha {ea} must be finite and positive"
            )));
        }
    }
    if config.jobs == 0 {
        return Err(Error::InvalidConfig("jobs must be >= 1".into()));
    }
    if config.perturbation.is_some() && config.algorithm != Algorithm::OracleGd {
        return Err(Error::InvalidConfig(
            "perturbation applies only to the oracle-gd algorithm".into(),
        ));
    }
    if config.algorithm == Algorithm::OracleGd && problem.oracle().is_none() {
        return Err(Error::OracleRequired {
            problem: problem.name.clone(),
            operation: "oracle-gd",
        });
    }
    if let Some(p) = &config.perturbation {
        if !(p.magnitude.is_finite() && p.magnitude >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "perturbation magnitude {} must be finite and non-negative",
                p.magnitude
            )));
        }
    }

    let o = &config.schedule;
    if o.k_inner == Some(0) {
        return Err(Error::InvalidConfig("k_inner must be >= 1".into()));
    }
    if o.t_outer == Some(0) {
        return Err(Error::InvalidConfig("t_outer must be >= 1".into()));
    }
    for (name, v) in [("eta1", o.eta1), ("eta2", o.eta2)] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {v} must be finite and positive"
                )));
            }
        }
    }

    let init = match &config.init {
        Some(spec) => (Vector::new(spec.theta.clone())?, Vector::new(spec.alpha.clone())?),
        None => problem.default_init.clone(),
    };
    problem.check_dims(&init.0, &init.1)?;

    let safety = SafetyFactors::new(
        o.k_safety_multiplier.unwrap_or(1.5),
        o.k_safety_additive.unwrap_or(5),
    )?;

    // Δ: four times the measured warm-start gap on oracle problems.
    let delta_inner = match o.delta_inner {
        Some(v) if v.is_finite() && v >= 0.0 => v,
        Some(v) => {
            return Err(Error::InvalidConfig(format!(
                "delta_inner {v} must be finite and non-negative"
            )))
        }
        None => match problem.oracle() {
            Some(oracle) => {
                let gap = (oracle.g_value)(&init.0) - problem.value(&init.0, &init.1);
                4.0 * gap.max(0.0)
            }
            None => {
                return Err(Error::InvalidConfig(format!(
                    "problem `{}` has no inner oracle; delta_inner must be supplied",
                    problem.name
                )))
            }
        },
    };
    // Δg: measured as g(θ0) - g* when the optimum is known.
    let delta_g = match o.delta_g {
        Some(v) if v.is_finite() && v >= 0.0 => v,
        Some(v) => {
            return Err(Error::InvalidConfig(format!(
                "delta_g {v} must be finite and non-negative"
            )))
        }
        None => match problem.oracle().and_then(|or| or.g_star.map(|gs| (or, gs))) {
            Some((oracle, g_star)) => ((oracle.g_value)(&init.0) - g_star).max(0.0),
            None => {
                return Err(Error::InvalidConfig(format!(
                    "problem `{}` has no closed-form g*; delta_g must be supplied",
                    problem.name
                )))
            }
        },
    };

    let mut schedule =
        ScheduleParams::derive(&problem.constants, epsilon, delta_inner, delta_g, safety)?;
    let mut manual = Vec::new();
    if let Some(v) = o.eta1 {
        schedule.eta1 = v;
        manual.push("eta1".to_string());
    }
    if let Some(v) = o.eta2 {
        schedule.eta2 = v;
        manual.push("eta2".to_string());
    }
    if let Some(v) = o.k_inner {
        schedule.k_inner = v;
        manual.push("k_inner".to_string());
    }
    if let Some(v) = o.t_outer {
        schedule.t_outer = v;
        manual.push("t_outer".to_string());
    }
    if o.k_safety_multiplier.is_some() {
        manual.push("k_safety_multiplier".to_string());
    }
    if o.k_safety_additive.is_some() {
        manual.push("k_safety_additive".to_string());
    }
    if o.delta_inner.is_some() {
        manual.push("delta_inner".to_string());
    }
    if o.delta_g.is_some() {
        manual.push("delta_g".to_string());
    }
    // The one-step baseline runs the same loop with K pinned to one step.
    if config.algorithm == Algorithm::OnestepGda {
        schedule.k_inner = 1;
    }
    schedule.validate()?;

    let resolved_config = RunConfig {
        problem: problem.name.clone(),
        epsilon: EpsilonSpec::Single(epsilon),
        algorithm: config.algorithm,
        seed: config.seed,
        early_exit: config.early_exit,
        output: config.output.clone(),
        init: Some(InitSpec {
            theta: init.0.as_slice().to_vec(),
            alpha: init.1.as_slice().to_vec(),
        }),
        schedule: ScheduleOverrides {
            eta1: Some(schedule.eta1),
            eta2: Some(schedule.eta2),
            k_inner: Some(schedule.k_inner),
            t_outer: Some(schedule.t_outer),
            k_safety_multiplier: Some(schedule.k_safety_multiplier),
            k_safety_additive: Some(schedule.k_safety_additive),
            delta_inner: Some(schedule.delta_inner),
            delta_g: Some(schedule.delta_g),
        },
        epsilon_alpha: config.epsilon_alpha,
        perturbation: config.perturbation,
        jobs: config.jobs,
        manual_fields: manual.clone(),
    };

    Ok(ResolvedRun {
        problem,
        schedule,
        init,
        manual_fields: manual,
        resolved_config,
    })
}
