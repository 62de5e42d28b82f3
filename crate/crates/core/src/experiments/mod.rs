//! Scripted reproductions: Ching unboundedness, the wavefront flip,
//! continuity tables and σ-order estimation, each producing an
//! [`ExperimentReport`].

mod continuity;
mod phenomena;
mod plot;
mod report;
mod sigma;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use continuity::{
    adversarial_inputs, continuity_sweep, hilbert_weights, run_continuity_table, CaseResult, ContinuityCase,
    ContinuityParams, GridOperator, NormEstimate, SymbolFamily,
};
pub use phenomena::{
    counterexample_input, harmonic_coefficient, holder_exponent, lacunary_series, run_counterexample, run_wavefront,
    CounterexampleParams, WavefrontParams,
};
pub use plot::line_chart;
pub use report::{tagged_f64, Environment, ExperimentReport, FrameSummary, ReportRow, Series, Verdict};
pub use sigma::{run_sigma_estimate, SigmaParams};

/// Where a report is written.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputPaths {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub dat: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// Experiment selection with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentParams {
    Counterexample(CounterexampleParams),
    Wavefront(WavefrontParams),
    Continuity(ContinuityParams),
    Sigma(SigmaParams),
}

impl ExperimentParams {
    /// Default parameters for `counterexample`, `wavefront`, `continuity`
    /// or `sigma`.
    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "counterexample" => Self::Counterexample(CounterexampleParams::default()),
            "wavefront" => Self::Wavefront(WavefrontParams::default()),
            "continuity" => Self::Continuity(ContinuityParams::default()),
            "sigma" => Self::Sigma(SigmaParams::default()),
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Counterexample(_) => "counterexample",
            Self::Wavefront(_) => "wavefront",
            Self::Continuity(_) => "continuity",
            Self::Sigma(_) => "sigma",
        }
    }

    pub fn run(&self, dim: usize, frame: &crate::frame::LpFrame) -> crate::Result<ExperimentReport> {
        match self {
            Self::Counterexample(p) => run_counterexample(p),
            Self::Wavefront(p) => run_wavefront(p),
            Self::Continuity(p) => run_continuity_table(p, dim, frame),
            Self::Sigma(p) => run_sigma_estimate(p, frame),
        }
    }
}
