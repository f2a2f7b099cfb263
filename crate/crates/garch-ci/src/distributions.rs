//! Innovation laws and stable resampling weights.
//!
//! Innovations are standardized to mean 0 and variance 1 so that the driving
//! noise always satisfies the model contract E xi = 0, E xi^2 = 1; the
//! Student-t and Pareto families are shifted/scaled accordingly. Both need a
//! finite fourth moment, hence nu > 4 and alpha > 4.
//!
//! Resampling weights Y are symmetric stable draws with characteristic
//! function exp(i*shift*t - |t|^p), 1 < p < 2, generated by the
//! Chambers-Mallows-Stuck transform.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Pareto, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A standardized innovation law (mean 0, variance 1, finite fourth moment).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InnovationSpec {
    Normal,
    StudentT { nu: f64 },
    Pareto { alpha: f64, xm: f64 },
}

impl InnovationSpec {
    pub fn normal() -> Self {
        InnovationSpec::Normal
    }

    /// Student-t with nu > 4 degrees of freedom, scaled by sqrt((nu-2)/nu).
    pub fn student_t(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= 4.0 {
            return Err(Error::InvalidParameter(format!(
                "student-t needs nu > 4 for a finite fourth moment, got {nu}"
            )));
        }
        Ok(InnovationSpec::StudentT { nu })
    }

    /// Pareto with shape alpha > 4 and scale xm > 0, centered and scaled.
    pub fn pareto(alpha: f64, xm: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 4.0 {
            return Err(Error::InvalidParameter(format!(
                "pareto needs alpha > 4 for a finite fourth moment, got {alpha}"
            )));
        }
        if !xm.is_finite() || xm <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "pareto needs scale xm > 0, got {xm}"
            )));
        }
        Ok(InnovationSpec::Pareto { alpha, xm })
    }

    /// One draw of the standardized law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InnovationSpec::Normal => rng.sample(StandardNormal),
            InnovationSpec::StudentT { nu } => {
                let t: f64 = StudentT::new(nu).expect("validated").sample(rng);
                t * ((nu - 2.0) / nu).sqrt()
            }
            InnovationSpec::Pareto { alpha, xm } => {
                let p: f64 = Pareto::new(xm, alpha).expect("validated").sample(rng);
                let (m, s) = pareto_mean_sd(alpha, xm);
                (p - m) / s
            }
        }
    }

    /// Exact fourth moment E xi^4 of the standardized law.
    pub fn fourth_moment(&self) -> f64 {
        match *self {
            InnovationSpec::Normal => 3.0,
            InnovationSpec::StudentT { nu } => 3.0 * (nu - 2.0) / (nu - 4.0),
            // Standard Pareto excess kurtosis; xm cancels after standardization.
            InnovationSpec::Pareto { alpha: a, .. } => {
                3.0 + 6.0 * (a * a * a + a * a - 6.0 * a - 2.0) / (a * (a - 3.0) * (a - 4.0))
            }
        }
    }

    /// Short label used in reports ("t8", "pareto(6,1)", ...).
    pub fn label(&self) -> String {
        match *self {
            InnovationSpec::Normal => "normal".to_string(),
            InnovationSpec::StudentT { nu } => {
                if nu.fract() == 0.0 {
                    format!("t{}", nu as i64)
                } else {
                    format!("t{nu}")
                }
            }
            InnovationSpec::Pareto { alpha, xm } => {
                if alpha.fract() == 0.0 && xm.fract() == 0.0 {
                    format!("pareto({},{})", alpha as i64, xm as i64)
                } else {
                    format!("pareto({alpha},{xm})")
                }
            }
        }
    }
}

fn pareto_mean_sd(alpha: f64, xm: f64) -> (f64, f64) {
    let m = alpha * xm / (alpha - 1.0);
    let var = xm * xm * alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0));
    (m, var.sqrt())
}

/// A stable law with characteristic function exp(i*shift*t - |t|^p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableSpec {
    pub p: f64,
    pub shift: f64,
    /// Batch acceptance tolerance for |1 - mean(Y)|.
    pub mean_tol: f64,
}

pub const DEFAULT_MEAN_TOL: f64 = 0.2;
pub const DEFAULT_MAX_ATTEMPTS: u32 = 1000;

impl StableSpec {
    pub fn new(p: f64, shift: f64) -> Result<Self> {
        if p.is_nan() || p <= 1.0 || p >= 2.0 {
            return Err(Error::InvalidParameter(format!(
                "stability order must satisfy 1 < p < 2, got {p}"
            )));
        }
        if shift != 0.0 && shift != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "shift must be 0 or 1, got {shift}"
            )));
        }
        Ok(Self { p, shift, mean_tol: DEFAULT_MEAN_TOL })
    }

    pub fn with_mean_tol(mut self, tol: f64) -> Result<Self> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("mean_tol must be > 0, got {tol}")));
        }
        self.mean_tol = tol;
        Ok(self)
    }
}

/// One draw with CF exp(i*shift*t - |t|^p).
///
/// Chambers-Mallows-Stuck for the symmetric case: with U uniform on
/// (-pi/2, pi/2) and W standard exponential,
///   S = sin(pU)/cos(U)^(1/p) * (cos((1-p)U)/W)^((1-p)/p).
pub fn sample_stable<R: Rng + ?Sized>(spec: &StableSpec, rng: &mut R) -> f64 {
    let p = spec.p;
    let u: f64 = rng.random_range(-std::f64::consts::FRAC_PI_2..std::f64::consts::FRAC_PI_2);
    let w: f64 = rng.sample(Exp1);
    let s = (p * u).sin() / u.cos().powf(1.0 / p)
        * (((1.0 - p) * u).cos() / w).powf((1.0 - p) / p);
    spec.shift + s
}

/// A resampling batch that passed the mean gate.
#[derive(Debug, Clone)]
pub struct GatedBatch {
    pub values: Vec<f64>,
    /// Batches drawn before one passed (1 = first try).
    pub attempts: u32,
    pub mean: f64,
}

/// Draw batches of n weights until |1 - mean| < spec.mean_tol.
///
/// The whole batch is regenerated on failure; the accepted batch and the
/// number of attempts consumed are returned.
pub fn sample_stable_batch_with_mean_gate<R: Rng + ?Sized>(
    spec: &StableSpec,
    n: usize,
    rng: &mut R,
    max_attempts: u32,
) -> Result<GatedBatch> {
    assert!(spec.shift == 1.0, "mean gate requires shift = 1");
    assert!(n >= 1 && max_attempts >= 1);
    let mut values = vec![0.0; n];
    for attempt in 1..=max_attempts {
        for v in values.iter_mut() {
            *v = sample_stable(spec, rng);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if (1.0 - mean).abs() < spec.mean_tol {
            return Ok(GatedBatch { values, attempts: attempt, mean });
        }
    }
    Err(Error::AttemptsExhausted { attempts: max_attempts, tol: spec.mean_tol })
}
