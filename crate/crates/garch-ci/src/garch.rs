//! Stationary GARCH(1,1) simulation and exact stationary moments.
//!
//! The process is X_k = sigma_k * xi_k with the volatility recursion
//!
//!   sigma_k^2 = a0 + a1 * X_{k-1}^2 + b1 * sigma_{k-1}^2,
//!
//! driven by i.i.d. standardized innovations. Second-moment stationarity
//! (a1 + b1 < 1) gives the closed forms used by the inference layer:
//!
//!   mu    = E X^2 = a0 / (1 - a1 - b1)
//!   tau^2 = a0^2 (1+a1+b1)/(1-a1-b1)^2
//!           * ( (E xi^4 (1+a1-b1) + 2 b1)/(1-rho^2) - 1/(1-a1-b1) )
//!
//! with rho^2 = E(a1 xi^2 + b1)^2, the squared-process persistence. The
//! weaker existence condition is the log-moment one,
//! E log(a1 xi^2 + b1) < 0, checked by Monte Carlo in
//! [`check_stationarity`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::InnovationSpec;
use crate::error::{Error, Result};

/// GARCH(1,1) coefficients (a0 > 0, a1 >= 0, b1 >= 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub a0: f64,
    pub a1: f64,
    pub b1: f64,
}

pub const DEFAULT_BURN_IN: usize = 500;

impl GarchParams {
    pub fn new(a0: f64, a1: f64, b1: f64) -> Result<Self> {
        if !a0.is_finite() || a0 <= 0.0 {
            return Err(Error::InvalidParameter(format!("a0 must be > 0, got {a0}")));
        }
        if !a1.is_finite() || a1 < 0.0 {
            return Err(Error::InvalidParameter(format!("a1 must be >= 0, got {a1}")));
        }
        if !b1.is_finite() || b1 < 0.0 {
            return Err(Error::InvalidParameter(format!("b1 must be >= 0, got {b1}")));
        }
        Ok(Self { a0, a1, b1 })
    }

    /// a1 + b1, the second-moment persistence.
    pub fn persistence(&self) -> f64 {
        self.a1 + self.b1
    }

    pub fn is_second_order_stationary(&self) -> bool {
        self.persistence() < 1.0
    }

    fn require_stationary(&self) -> Result<()> {
        if self.is_second_order_stationary() {
            Ok(())
        } else {
            Err(Error::NonStationary { sum: self.persistence() })
        }
    }

    /// mu = E X^2 = a0 / (1 - a1 - b1).
    pub fn stationary_mean(&self) -> Result<f64> {
        self.require_stationary()?;
        Ok(self.a0 / (1.0 - self.a1 - self.b1))
    }

    /// rho^2 = E(a1 xi^2 + b1)^2 = a1^2 E xi^4 + 2 a1 b1 + b1^2.
    pub fn rho_squared(&self, kurtosis: f64) -> f64 {
        self.a1 * self.a1 * kurtosis + 2.0 * self.a1 * self.b1 + self.b1 * self.b1
    }

    /// Long-run variance of the squared process for a known innovation law.
    pub fn tau_squared(&self, spec: &InnovationSpec) -> Result<f64> {
        self.tau_squared_with_kurtosis(spec.fourth_moment())
    }

    /// Long-run variance with the innovation fourth moment supplied directly
    /// (used both for exact plug-ins and for per-path empirical estimates).
    pub fn tau_squared_with_kurtosis(&self, kurtosis: f64) -> Result<f64> {
        self.require_stationary()?;
        let rho2 = self.rho_squared(kurtosis);
        if rho2 >= 1.0 {
            return Err(Error::MomentCondition { rho2 });
        }
        let one_minus = 1.0 - self.a1 - self.b1;
        let prefactor = self.a0 * self.a0 * (1.0 + self.a1 + self.b1) / (one_minus * one_minus);
        let inner = (kurtosis * (1.0 + self.a1 - self.b1) + 2.0 * self.b1) / (1.0 - rho2)
            - 1.0 / one_minus;
        // inner == 0 exactly at kurtosis 1 and increases with it, so it can
        // only go negative for infeasible sample estimates below 1
        Ok(prefactor * inner.max(0.0))
    }
}

/// A realized path of (X_k^2, sigma_k^2) pairs after burn-in.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub x2: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub burn_in: usize,
    pub params: GarchParams,
    pub innovation: InnovationSpec,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.x2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x2.is_empty()
    }

    /// Sample mean of X^2, the mu-surrogate used as the statistic center.
    pub fn mean_x2(&self) -> f64 {
        self.x2.iter().sum::<f64>() / self.len() as f64
    }

    /// Per-path fourth-moment estimate of the innovations,
    /// (1/n) sum (X_k^2 / sigma_k^2)^2.
    pub fn empirical_kurtosis(&self) -> f64 {
        let n = self.len() as f64;
        self.x2
            .iter()
            .zip(&self.sigma2)
            .map(|(&x2, &s2)| {
                let xi2 = x2 / s2;
                xi2 * xi2
            })
            .sum::<f64>()
            / n
    }

    /// Dump as `k,x2,sigma2` rows, one per retained step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,x2,sigma2\n");
        for (k, (x2, s2)) in self.x2.iter().zip(&self.sigma2).enumerate() {
            out.push_str(&format!("{k},{x2:.17e},{s2:.17e}\n"));
        }
        out
    }

    /// Parse a `k,x2,sigma2` dump; params and innovation describe the process
    /// that generated it.
    pub fn from_csv(
        content: &str,
        params: GarchParams,
        innovation: InnovationSpec,
    ) -> Result<Self> {
        let mut lines = content.lines();
        match lines.next() {
            Some(header) if header.trim() == "k,x2,sigma2" => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected header 'k,x2,sigma2', got {other:?}"
                )))
            }
        }
        let mut x2 = Vec::new();
        let mut sigma2 = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("row {i}: expected 3 fields")));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("row {i}: {e}")))
            };
            x2.push(parse(fields[1])?);
            sigma2.push(parse(fields[2])?);
        }
        if x2.is_empty() {
            return Err(Error::Parse("no data rows".to_string()));
        }
        Ok(SamplePath { x2, sigma2, burn_in: 0, params, innovation })
    }
}

/// Monte Carlo check of the log-moment condition E log(a1 xi^2 + b1) < 0.
#[derive(Debug, Clone, Copy)]
pub struct StationarityCheck {
    pub log_moment_estimate: f64,
    pub std_error: f64,
    /// Estimate + 3 SE < 0.
    pub is_stationary: bool,
}

pub fn check_stationarity<R: Rng + ?Sized>(
    params: &GarchParams,
    spec: &InnovationSpec,
    n_mc: usize,
    rng: &mut R,
) -> Result<StationarityCheck> {
    if params.a1 == 0.0 && params.b1 == 0.0 {
        return Err(Error::DegenerateGarch);
    }
    assert!(n_mc >= 2);
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..n_mc {
        let xi = spec.sample(rng);
        let v = (params.a1 * xi * xi + params.b1).ln();
        sum += v;
        sum2 += v * v;
    }
    let n = n_mc as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    let se = (var / n).sqrt();
    Ok(StationarityCheck {
        log_moment_estimate: mean,
        std_error: se,
        is_stationary: mean + 3.0 * se < 0.0,
    })
}

/// Simulate a stationary path: sigma_0^2 starts at the unconditional variance
/// and the first `burn_in` steps are discarded.
pub fn simulate<R: Rng + ?Sized>(
    params: &GarchParams,
    spec: &InnovationSpec,
    n: usize,
    burn_in: usize,
    rng: &mut R,
) -> Result<SamplePath> {
    params.stationary_mean()?;
    assert!(n >= 1);
    let mut x2 = Vec::with_capacity(n);
    let mut sigma2_out = Vec::with_capacity(n);
    let mut sigma2 = params.a0 / (1.0 - params.a1 - params.b1);
    let mut prev_x2 = f64::NAN;
    for k in 0..burn_in + n {
        if k > 0 {
            sigma2 = params.a0 + params.a1 * prev_x2 + params.b1 * sigma2;
        }
        let xi = spec.sample(rng);
        let cur_x2 = sigma2 * xi * xi;
        if k >= burn_in {
            x2.push(cur_x2);
            sigma2_out.push(sigma2);
        }
        prev_x2 = cur_x2;
    }
    Ok(SamplePath { x2, sigma2: sigma2_out, burn_in, params: *params, innovation: *spec })
}

/// Empirical Cov(X_k^2, X_{k+lag}^2) for each requested lag. Association of
/// the squared process implies these are nonnegative up to noise.
pub fn association_sanity(path: &SamplePath, lags: &[usize]) -> Vec<f64> {
    let n = path.len();
    let mean = path.mean_x2();
    lags.iter()
        .map(|&lag| {
            assert!(lag < n, "lag {lag} exceeds path length {n}");
            let m = n - lag;
            let mut acc = 0.0;
            for i in 0..m {
                acc += (path.x2[i] - mean) * (path.x2[i + lag] - mean);
            }
            acc / m as f64
        })
        .collect()
}
