//! The multi-step gradient descent-ascent solver and its baselines.

mod gda;
mod oracle_gd;
mod schedule;

pub use gda::{
    inner_ascent, run_multistep_gda, run_onestep_gda, GdaRun, RunOptions, StationarityReport,
    TraceRecord,
};
pub use oracle_gd::{
    run_oracle_gd, OracleGdRecord, OracleGdRun, Perturbation, PerturbationMode,
};
pub use schedule::{
    compute_inner_budget, compute_outer_budget, compute_outer_smoothness, SafetyFactors,
    ScheduleParams,
};
