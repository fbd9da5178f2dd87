//! Reproducible experiment harness: config resolution, run persistence
//! (CSV trace + JSON summary + resolved config), ε-sweeps with log-log rate
//! fitting, and plot emission.

pub mod config;
pub mod plot;
pub mod runner;
pub mod sweep;
pub mod trace_io;

pub use config::{
    resolve, Algorithm, EpsilonSpec, InitSpec, PerturbationConfig, ResolvedRun, RunConfig,
    ScheduleOverrides,
};
pub use plot::emit_plot_data;
pub use runner::{default_output_root, run_experiment, RunArtifacts, RunSummary};
pub use sweep::{least_squares_slope, run_sweep, SweepResult, SweepRow};
