//! Logarithmic-average empirical CDF of a normalized partial-sum statistic.
//!
//! For a sequence of centered increments d_1, d_2, ... the statistic is
//!
//!   T_k = k^(-1/order) * (d_1 + ... + d_k),
//!
//! with order = 2 for the plain centered-sum statistic and order = p for the
//! stable-weighted one. The almost-sure approximation of the law of T_n is
//! the weighted empirical CDF of the realized T_k with weights 1/k,
//! normalized by sum(1/k) so the result is a proper distribution function.
//! The protocol skips the first k_min-1 statistics and averages the CDFs
//! obtained by restarting the partial sums at shifted origins.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::garch::SamplePath;

/// Skip/shift protocol for the log-average CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogAvgConfig {
    /// First statistic index included in the sums.
    pub k_min: usize,
    /// Offset between consecutive shift origins.
    pub shift_stride: usize,
    /// Number of shifted sequences averaged (1 = no shifting).
    pub n_shifts: usize,
    /// Read "shifts of length `shift_stride`" as disjoint windows instead of
    /// restarted suffixes. Off by default; kept for protocol comparisons.
    pub windowed: bool,
}

impl Default for LogAvgConfig {
    fn default() -> Self {
        Self { k_min: 5, shift_stride: 100, n_shifts: 5, windowed: false }
    }
}

/// Compensated (Kahan) accumulator; keeps the CDF mass-1 invariant tight.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// A normalized partial-sum statistic sequence T_k, reproducible from its
/// centered increments.
#[derive(Debug, Clone)]
pub struct StatSequence {
    increments: Vec<f64>,
    values: Vec<f64>,
    center: f64,
    norm_order: f64,
}

impl StatSequence {
    /// Build from centered increments: T_k = k^(-1/order) * sum_{i<=k} d_i.
    ///
    /// Plain left-to-right summation, so the values agree bit for bit with a
    /// naive recomputation of each partial sum.
    pub fn from_increments(increments: Vec<f64>, center: f64, norm_order: f64) -> Self {
        assert!(norm_order > 0.0);
        let mut values = Vec::with_capacity(increments.len());
        let mut acc = 0.0;
        for (i, &d) in increments.iter().enumerate() {
            acc += d;
            values.push(acc / ((i + 1) as f64).powf(1.0 / norm_order));
        }
        Self { increments, values, center, norm_order }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn norm_order(&self) -> f64 {
        self.norm_order
    }
}

/// T_k = (sum_{i<=k} x_i^2 - k*center) / sqrt(k).
pub fn t_sequence(path: &SamplePath, center: f64) -> StatSequence {
    let increments = path.x2.iter().map(|&x| x - center).collect();
    StatSequence::from_increments(increments, center, 2.0)
}

/// The normalized logarithmic-average empirical CDF.
#[derive(Debug, Clone)]
pub struct LogAvgCdf {
    support: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    k_min: usize,
    shift_offsets: Vec<usize>,
    /// sum of 1/k over the included indices, one entry per shift.
    normalizers: Vec<f64>,
}

impl LogAvgCdf {
    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn shift_offsets(&self) -> &[usize] {
        &self.shift_offsets
    }

    pub fn normalizers(&self) -> &[f64] {
        &self.normalizers
    }

    pub fn total_mass(&self) -> f64 {
        *self.cumulative.last().expect("support nonempty")
    }

    /// Right-continuous CDF value at t.
    pub fn cdf(&self, t: f64) -> f64 {
        let idx = self.support.partition_point(|&v| v <= t);
        if idx == 0 {
            0.0
        } else {
            self.cumulative[idx - 1]
        }
    }

    /// Left-continuous generalized inverse: the smallest support value with
    /// CDF(t) >= q.
    pub fn quantile(&self, q: f64) -> f64 {
        assert!(q > 0.0 && q < 1.0, "quantile level must be in (0, 1)");
        let idx = self.cumulative.partition_point(|&c| c < q);
        if idx >= self.support.len() {
            // accumulation left total mass a hair under q
            *self.support.last().expect("support nonempty")
        } else {
            self.support[idx]
        }
    }

    /// Dump as `t,cdf` rows for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,cdf\n");
        for (t, c) in self.support.iter().zip(&self.cumulative) {
            out.push_str(&format!("{t:.17e},{c:.17e}\n"));
        }
        out
    }
}

/// Build the shift-averaged log-average CDF of a statistic sequence.
///
/// For each shift the partial sums restart at the shifted origin with the
/// same center, each shift's CDF is normalized by its own sum of 1/k, and
/// the shifts are averaged with equal weight.
pub fn build_logavg_cdf(seq: &StatSequence, cfg: &LogAvgConfig) -> Result<LogAvgCdf> {
    assert!(cfg.k_min >= 1 && cfg.n_shifts >= 1);
    assert!(cfg.n_shifts == 1 || cfg.shift_stride >= 1);
    let n = seq.len();
    // every shifted sequence must contribute at least the k_min-th statistic
    let needed = cfg.k_min + cfg.shift_stride * (cfg.n_shifts - 1);
    if n < needed {
        return Err(Error::InsufficientLength { needed, got: n });
    }

    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut shift_offsets = Vec::with_capacity(cfg.n_shifts);
    let mut normalizers = Vec::with_capacity(cfg.n_shifts);
    let shift_weight = 1.0 / cfg.n_shifts as f64;

    for s in 0..cfg.n_shifts {
        let start = s * cfg.shift_stride;
        let end = if cfg.windowed { n.min(start + cfg.shift_stride) } else { n };
        let seg = &seq.increments[start..end];
        if seg.len() < cfg.k_min {
            return Err(Error::InsufficientLength { needed: start + cfg.k_min, got: n });
        }

        let mut normalizer = KahanSum::default();
        for k in cfg.k_min..=seg.len() {
            normalizer.add(1.0 / k as f64);
        }
        let norm = normalizer.value();

        let mut sum = 0.0;
        for (i, &d) in seg.iter().enumerate() {
            sum += d;
            let k = i + 1;
            if k >= cfg.k_min {
                let value = sum / (k as f64).powf(1.0 / seq.norm_order);
                atoms.push((value, shift_weight / (k as f64 * norm)));
            }
        }
        shift_offsets.push(start);
        normalizers.push(norm);
    }

    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));

    // merge ties, accumulate in sorted order
    let mut support = Vec::with_capacity(atoms.len());
    let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
    let mut cumulative = Vec::with_capacity(atoms.len());
    let mut running = KahanSum::default();
    for (value, w) in atoms {
        running.add(w);
        if support.last() == Some(&value) {
            *weights.last_mut().expect("nonempty") += w;
            *cumulative.last_mut().expect("nonempty") = running.value();
        } else {
            support.push(value);
            weights.push(w);
            cumulative.push(running.value());
        }
    }

    Ok(LogAvgCdf { support, weights, cumulative, k_min: cfg.k_min, shift_offsets, normalizers })
}
