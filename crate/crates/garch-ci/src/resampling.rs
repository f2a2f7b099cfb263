//! Stable resampling of the squared process and the resulting interval.
//!
//! Centered squared observations are multiplied by i.i.d. stable weights Y
//! with characteristic function exp(it - |t|^p), 1 < p < 2:
//!
//!   I_k = k^(-1/p) * sum_{i<=k} (x_i^2 - center) * y_i.
//!
//! Quantiles z of the log-average CDF of the I_k bound the statistic at
//! k = n, which inverts to the interval
//!
//!   [ (mean - z_hi * n^-((p-1)/p)) / ybar, (mean - z_lo * n^-((p-1)/p)) / ybar ].
//!
//! One Y batch is drawn per path and regenerated until |1 - mean(Y)| passes
//! the gate; the same batch drives the whole almost-sure sequence.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    sample_stable_batch_with_mean_gate, StableSpec, DEFAULT_MAX_ATTEMPTS, DEFAULT_MEAN_TOL,
};
use crate::error::{Error, Result};
use crate::garch::SamplePath;
use crate::inference::{ConfidenceInterval, Method};
use crate::logavg::{build_logavg_cdf, LogAvgCdf, LogAvgConfig, StatSequence};

/// Batch-regeneration gate for the resampling weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StableGateConfig {
    pub mean_tol: f64,
    pub max_attempts: u32,
}

impl Default for StableGateConfig {
    fn default() -> Self {
        Self { mean_tol: DEFAULT_MEAN_TOL, max_attempts: DEFAULT_MAX_ATTEMPTS }
    }
}

/// I_k = k^(-1/p) * sum_{i<=k} (x_i^2 - center) * y_i for every k.
pub fn i_sequence(path: &SamplePath, y: &[f64], center: f64, p: f64) -> Result<Vec<f64>> {
    if y.len() != path.len() {
        return Err(Error::LengthMismatch { path_len: path.len(), weights_len: y.len() });
    }
    assert!(p > 1.0 && p < 2.0, "stability order must satisfy 1 < p < 2");
    let seq = i_stat_sequence(path, y, center, p);
    Ok(seq.values().to_vec())
}

fn i_stat_sequence(path: &SamplePath, y: &[f64], center: f64, p: f64) -> StatSequence {
    let increments = path
        .x2
        .iter()
        .zip(y)
        .map(|(&x2, &w)| (x2 - center) * w)
        .collect();
    StatSequence::from_increments(increments, center, p)
}

/// A complete resampling pass over one path: the gated weight batch, the
/// statistic sequence it induces, and the interval.
#[derive(Debug, Clone)]
pub struct ResampleRun {
    pub p: f64,
    pub y: Vec<f64>,
    pub i_sequence: Vec<f64>,
    pub center: f64,
    pub y_mean: f64,
    pub attempts: u32,
    pub cdf: LogAvgCdf,
    pub interval: ConfidenceInterval,
}

/// Build the stable-resampling confidence interval for mu = E X^2.
pub fn resample_ci<R: Rng + ?Sized>(
    path: &SamplePath,
    p: f64,
    alpha: f64,
    rng: &mut R,
    logavg_cfg: &LogAvgConfig,
    gate: &StableGateConfig,
) -> Result<ResampleRun> {
    assert!(alpha > 0.0 && alpha < 1.0);
    let spec = StableSpec::new(p, 1.0)?.with_mean_tol(gate.mean_tol)?;
    let batch = sample_stable_batch_with_mean_gate(&spec, path.len(), rng, gate.max_attempts)?;

    let center = path.mean_x2();
    let seq = i_stat_sequence(path, &batch.values, center, p);
    let cdf = build_logavg_cdf(&seq, logavg_cfg)?;
    let z_lo = cdf.quantile(alpha / 2.0);
    let z_hi = cdf.quantile(1.0 - alpha / 2.0);

    let n = path.len() as f64;
    let scale = n.powf(-(p - 1.0) / p);
    let a = (center - z_hi * scale) / batch.mean;
    let b = (center - z_lo * scale) / batch.mean;
    let interval = ConfidenceInterval {
        lo: a.min(b),
        hi: a.max(b),
        method: Method::StableResample { p },
        level: 1.0 - alpha,
        center_used: center,
    };

    Ok(ResampleRun {
        p,
        i_sequence: seq.values().to_vec(),
        y: batch.values,
        center,
        y_mean: batch.mean,
        attempts: batch.attempts,
        cdf,
        interval,
    })
}
