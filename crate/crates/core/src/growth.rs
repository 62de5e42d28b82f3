//! Decision rules for reading boundedness or blow-up off a sequence of
//! estimates taken on successively doubled grids.

use serde::{Deserialize, Serialize};

/// Outcome of [`classify_growth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    /// Successive changes within the stability tolerance and no blow-up.
    BoundedConsistent,
    /// Factor `>= power_factor` per doubling on `power_steps` consecutive
    /// doublings.
    PowerBlowUp,
    /// `E_{i+1}² - E_i² >= log_fraction·E_i²/log₂N_i` on the last
    /// `log_steps` doublings, with the squared increments not decaying
    /// faster than `log_persistence` per step: growth like `√log N`, which
    /// a factor-per-doubling rule cannot see.
    LogBlowUp,
    Inconclusive,
}

impl GrowthVerdict {
    pub fn is_blow_up(self) -> bool {
        matches!(self, GrowthVerdict::PowerBlowUp | GrowthVerdict::LogBlowUp)
    }
}

/// Thresholds of the growth rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRule {
    pub power_factor: f64,
    pub power_steps: usize,
    pub log_fraction: f64,
    pub log_steps: usize,
    pub log_persistence: f64,
    pub stable_tolerance: f64,
}

impl Default for GrowthRule {
    fn default() -> Self {
        Self {
            power_factor: 2.0,
            power_steps: 2,
            log_fraction: 0.5,
            log_steps: 3,
            log_persistence: 0.75,
            stable_tolerance: 0.5,
        }
    }
}

/// Evidence behind a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthAnalysis {
    pub points: Vec<usize>,
    pub values: Vec<f64>,
    /// `E_{i+1}/E_i`.
    pub factors: Vec<f64>,
    /// `(E_{i+1}² - E_i²)·log₂N_i/E_i²`.
    pub log_increments: Vec<f64>,
    pub verdict: GrowthVerdict,
}

/// Classifies estimates `values[i]` taken at `points[i]` points per axis,
/// each grid twice as fine as the previous one.
pub fn classify_growth(points: &[usize], values: &[f64], rule: &GrowthRule) -> GrowthAnalysis {
    let factors: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    let log_increments: Vec<f64> = values
        .windows(2)
        .zip(points)
        .map(|(w, &n)| (w[1] * w[1] - w[0] * w[0]) * (n as f64).log2() / (w[0] * w[0]))
        .collect();
    let tail_all = |xs: &[f64], k: usize, pred: &dyn Fn(f64) -> bool| {
        k > 0 && xs.len() >= k && xs[xs.len() - k..].iter().all(|&x| pred(x))
    };
    let squares: Vec<f64> = values.windows(2).map(|w| w[1] * w[1] - w[0] * w[0]).collect();
    let persistent = squares.len() >= rule.log_steps
        && squares[squares.len() - rule.log_steps..]
            .windows(2)
            .all(|w| w[1] >= rule.log_persistence * w[0]);
    let finite = values.iter().all(|v| v.is_finite() && *v > 0.0);
    let verdict = if !finite || values.len() < 2 {
        GrowthVerdict::Inconclusive
    } else if tail_all(&factors, rule.power_steps, &|f| f >= rule.power_factor) {
        GrowthVerdict::PowerBlowUp
    } else if persistent && tail_all(&log_increments, rule.log_steps, &|g| g >= rule.log_fraction) {
        GrowthVerdict::LogBlowUp
    } else if factors
        .iter()
        .all(|f| (f - 1.0).abs() <= rule.stable_tolerance)
    {
        GrowthVerdict::BoundedConsistent
    } else {
        GrowthVerdict::Inconclusive
    };
    GrowthAnalysis {
        points: points.to_vec(),
        values: values.to_vec(),
        factors,
        log_increments,
        verdict,
    }
}
