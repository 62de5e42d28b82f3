//! JSON run configuration shared by the command line and the experiments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::experiments::{ExperimentParams, ExperimentReport, OutputPaths, SymbolFamily};
use crate::frame::{LpFrame, ModulationFunction, Profile};
use crate::grid::GridSpec;
use crate::growth::GrowthRule;
use crate::symbol::{parse_symbol_spec, SymbolRef};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Dimension, 1 or 2.
    pub n: usize,
    /// Points per axis, a power of two.
    #[serde(rename = "N")]
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 1, points: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameConfig {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub h: u32,
    pub profile: Profile,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            r: 1.0,
            big_r: 2.0,
            h: 3,
            profile: Profile::Bump,
        }
    }
}

/// Gate tolerances. `identity` and `growth` replace the corresponding
/// fields of the experiment parameters when a run is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub identity: f64,
    pub factorization: f64,
    /// Relative squared mass below which a spectrum counts as empty.
    pub support: f64,
    pub stability: f64,
    pub growth: GrowthRule,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            factorization: 1e-8,
            support: 1e-10,
            stability: 1.5,
            growth: GrowthRule::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub frame: FrameConfig,
    /// Symbol description such as `ching:d=0,theta=+1,jmax=6`.
    pub symbol: Option<String>,
    pub experiment: Option<ExperimentParams>,
    pub seed: u64,
    pub outputs: OutputPaths,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid.n, self.grid.points)
    }

    pub fn lp_frame(&self) -> Result<LpFrame> {
        let psi = ModulationFunction::with_profile(self.frame.r, self.frame.big_r, self.frame.profile)?;
        LpFrame::new(psi, self.frame.h)
    }

    pub fn symbol(&self) -> Result<Option<SymbolRef>> {
        match &self.symbol {
            None => Ok(None),
            Some(s) => {
                let spec = self.grid_spec()?;
                let frame = self.lp_frame()?;
                parse_symbol_spec(s)?.build(&spec, &frame).map(Some)
            }
        }
    }

    /// Checks every field that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        self.lp_frame()?;
        if let Some(s) = &self.symbol {
            parse_symbol_spec(s)?;
        }
        let t = &self.thresholds;
        for (name, v) in [
            ("identity", t.identity),
            ("factorization", t.factorization),
            ("support", t.support),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("threshold `{name}` must be positive, got {v}")));
            }
        }
        if !(t.stability >= 1.0) {
            return Err(invalid(format!("threshold `stability` must be >= 1, got {}", t.stability)));
        }
        let g = &t.growth;
        if !(g.power_factor > 1.0) || g.power_steps == 0 || g.log_steps == 0 || !(g.stable_tolerance > 0.0) {
            return Err(invalid("growth rule needs power_factor > 1, nonzero step counts and a positive tolerance"));
        }
        Ok(())
    }

    /// The configuration with thresholds, seed and symbol pushed into the
    /// experiment parameters. Running the result again gives the same report.
    pub fn resolved(&self) -> Result<Self> {
        self.validate()?;
        let mut c = self.clone();
        let t = c.thresholds;
        match &mut c.experiment {
            Some(ExperimentParams::Counterexample(p)) => p.tolerance = t.identity,
            Some(ExperimentParams::Wavefront(p)) => p.tolerance = t.identity,
            Some(ExperimentParams::Continuity(p)) => {
                p.rule = t.growth;
                p.seed = c.seed;
                if let Some(s) = &c.symbol {
                    p.symbol = SymbolFamily::Fixed {
                        spec: parse_symbol_spec(s)?,
                    };
                }
            }
            Some(ExperimentParams::Sigma(p)) => p.rule = t.growth,
            None => {}
        }
        Ok(c)
    }
}

/// Runs the configured experiment and embeds the resolved configuration in
/// the report.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentReport> {
    let c = config.resolved()?;
    let exp = c
        .experiment
        .as_ref()
        .ok_or_else(|| invalid("configuration has no `experiment` section"))?;
    let frame = c.lp_frame()?;
    let mut rep = exp.run(c.grid.n, &frame)?;
    rep.config = Some(serde_json::to_value(&c)?);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back = RunConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(c, back);
        let sparse = RunConfig::from_json(r#"{"grid":{"N":64},"frame":{"R":2.5}}"#).unwrap();
        assert_eq!(sparse.grid.points, 64);
        assert_eq!(sparse.frame.big_r, 2.5);
        assert_eq!(sparse.frame.h, 3);
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(RunConfig::from_json(r#"{"grid":{"N":100}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"frame":{"r":2,"R":1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"thresholds":{"identity":-1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"symbol":"nonsense:q=1"}"#).is_err());
        assert!(RunConfig::from_json(r#"{"colour":1}"#).is_err());
    }

    #[test]
    fn experiment_section_parses() {
        let c = RunConfig::from_json(r#"{"experiment":{"kind":"counterexample","n_list":[2,3]},"thresholds":{"identity":1e-9}}"#)
            .unwrap();
        match c.resolved().unwrap().experiment {
            Some(ExperimentParams::Counterexample(p)) => {
                assert_eq!(p.n_list, vec![2, 3]);
                assert_eq!(p.tolerance, 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
