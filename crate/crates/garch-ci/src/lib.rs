//! Simulation of stationary GARCH(1,1) processes and confidence intervals
//! for the second moment mu = E X^2.
//!
//! Three interval constructions are provided behind one API:
//!
//! * a normal plug-in using the closed-form long-run variance,
//! * quantiles of the logarithmic-average empirical CDF of the centered
//!   partial-sum statistic, and
//! * a stable-resampling variant that multiplies centered squared
//!   observations by heavy-tailed weights to widen the limit law.
//!
//! A seeded, parallel Monte Carlo harness measures coverage rates and mean
//! interval lengths over replicated paths and compares them against embedded
//! reference tables.

pub mod distributions;
pub mod error;
pub mod garch;
pub mod harness;
pub mod inference;
pub mod logavg;
pub mod normal;
pub mod report;
pub mod resampling;
pub mod rng;
pub mod tables;
#[cfg(test)]
mod testutil;

pub use distributions::{
    sample_stable, sample_stable_batch_with_mean_gate, GatedBatch, InnovationSpec, StableSpec,
};
pub use error::{Error, Result};
pub use garch::{
    association_sanity, check_stationarity, simulate, GarchParams, SamplePath, StationarityCheck,
};
pub use harness::{
    reproduce_table, run_experiment, CoverageReport, CoverageRow, ExperimentConfig,
    ReproduceOptions, TableId, TableReport,
};
pub use inference::{
    asclt_ci, build_ci, normal_ci, normal_ci_with_mode, ConfidenceInterval, InferenceConfig,
    Method, Tau2Mode,
};
pub use logavg::{build_logavg_cdf, t_sequence, LogAvgCdf, LogAvgConfig, StatSequence};
pub use resampling::{i_sequence, resample_ci, ResampleRun, StableGateConfig};
pub use rng::RngStream;
