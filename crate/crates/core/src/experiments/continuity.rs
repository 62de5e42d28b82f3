use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Environment, ExperimentReport, Series};
use crate::corpus::{random_band_limited, TrigPolynomial};
use crate::error::{invalid, PdError, Result};
use crate::frame::LpFrame;
use crate::grid::{fft_forward, fft_inverse, sobolev_norm, GridFunction, GridSpec, SpectralFunction};
use crate::growth::{classify_growth, GrowthAnalysis, GrowthRule, GrowthVerdict};
use crate::operator::{embed_spectrum, output_spectrum, SparseOperator};
use crate::spaces::{space_norm, Scale, SpaceParams};
use crate::symbol::{ChingSymbol, SymbolRef, SymbolSpec};

/// Symbol whose truncation follows the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SymbolFamily {
    /// A fixed symbol description.
    Fixed { spec: SymbolSpec },
    /// Ching symbol with the largest `j_max` the grid admits.
    Ching {
        d: f64,
        #[serde(default)]
        r: u32,
        #[serde(default = "one")]
        scale: u32,
        #[serde(default = "default_width")]
        width: f64,
    },
}

fn one() -> u32 {
    1
}

fn default_width() -> f64 {
    0.2
}

impl SymbolFamily {
    pub fn ching(d: f64, r: u32, scale: u32) -> Self {
        SymbolFamily::Ching {
            d,
            r,
            scale,
            width: 0.2,
        }
    }

    pub fn build(&self, spec: &GridSpec, frame: &LpFrame) -> Result<SymbolRef> {
        match self {
            SymbolFamily::Fixed { spec: s } => s.build(spec, frame),
            SymbolFamily::Ching { d, r, scale, width } => {
                let bump = SymbolSpec::ching_bump(*r, *width)?;
                let theta = vec![1i64; 1].into_iter().chain(std::iter::repeat(0)).take(spec.dim()).collect::<Vec<_>>();
                for j in (0..=40usize).rev() {
                    let a = ChingSymbol::new(*d, &theta, bump, j)?.with_scale(*scale)?;
                    if a.check_grid(spec).is_ok() {
                        return Ok(std::sync::Arc::new(a));
                    }
                }
                Err(invalid(format!("grid with {} points is too coarse for a Ching symbol", spec.points())))
            }
        }
    }
}

/// Hilbert weights `σ(η)` with `‖u‖ = (2π)^{n/2}‖σ·û‖_{ℓ²}`, when the space is
/// a weighted `ℓ²` space on the lattice.
pub fn hilbert_weights(sp: &SpaceParams, spec: &GridSpec) -> Option<Vec<f64>> {
    match sp.scale {
        Scale::Sobolev => Some(
            (0..spec.len())
                .map(|i| (1.0 + spec.frequency_norm(i).powi(2)).powf(sp.s / 2.0))
                .collect(),
        ),
        _ if sp.p == 2.0 && sp.q == 2.0 => {
            let blocks = sp.frame.grid_blocks(spec);
            Some(
                (0..spec.len())
                    .map(|i| {
                        blocks
                            .iter()
                            .enumerate()
                            .map(|(j, b)| (2.0 * sp.s * j as f64).exp2() * b[i] * b[i])
                            .sum::<f64>()
                            .sqrt()
                    })
                    .collect(),
            )
        }
        _ => None,
    }
}

fn spectral_norm(c: &SpectralFunction, sp: &SpaceParams) -> Result<f64> {
    match sp.scale {
        Scale::Sobolev => Ok(sobolev_norm(c, sp.s)),
        _ => space_norm(&fft_inverse(c), sp),
    }
}

/// Lacunary and single-mode inputs `Σ_j b_j e^{i(2^j+m)θ·x}` with
/// `b_j = 2^{-js}` or `2^{-js}/j`, for `θ = ±e₁` and offsets `m < 4`.
pub fn adversarial_inputs(spec: GridSpec, s: f64) -> Vec<GridFunction> {
    let n = spec.dim();
    let top = (spec.points().trailing_zeros() as usize).saturating_sub(2);
    let mut out = Vec::new();
    for sign in [1i64, -1] {
        for m in 0..4i64 {
            let freq = |j: usize| {
                let mut f = [0i64; 2];
                f[0] = sign * ((1i64 << j) + m);
                f
            };
            for harmonic in [false, true] {
                let mut c = SpectralFunction::zeros(spec);
                for j in 1..=top {
                    let w = (-(j as f64) * s).exp2() / if harmonic { j as f64 } else { 1.0 };
                    let i = spec.frequency_index(&freq(j)[..n]);
                    c.coeffs_mut()[i] += Complex64::new(w, 0.0);
                }
                out.push(fft_inverse(&c));
            }
            for j in 1..=top {
                out.push(fft_inverse(&SpectralFunction::mode(spec, &freq(j)[..n])));
            }
        }
    }
    out
}

/// Empirical norm of `a(x,D)` from `source` to `target` on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub points: usize,
    pub trials: f64,
    pub adversarial: f64,
    pub power: Option<f64>,
    pub estimate: f64,
}

/// A symbol on one grid, with its Fourier-basis matrix when affordable.
pub struct GridOperator {
    pub spec: GridSpec,
    pub symbol: SymbolRef,
    pub matrix: Option<SparseOperator>,
}

impl GridOperator {
    pub fn new(family: &SymbolFamily, spec: GridSpec, frame: &LpFrame) -> Result<Self> {
        let symbol = family.build(&spec, frame)?;
        let matrix = match SparseOperator::build(symbol.as_ref(), spec) {
            Ok(m) => Some(m),
            Err(PdError::SizeGuard { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { spec, symbol, matrix })
    }

    fn output(&self, u: &GridFunction) -> Result<SpectralFunction> {
        match &self.matrix {
            Some(m) => Ok(m.apply(&fft_forward(u))),
            None => output_spectrum(self.symbol.clone(), u),
        }
    }

    fn ratio(&self, u: &GridFunction, source: &SpaceParams, target: &SpaceParams) -> Result<f64> {
        let big = self.spec.refined();
        let den = spectral_norm(&embed_spectrum(&fft_forward(u), big), source)?;
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok(spectral_norm(&self.output(u)?, target)? / den)
    }

    /// Max ratio over random trials, the adversarial family and, for
    /// Hilbert pairs, power iteration.
    pub fn estimate(
        &self,
        source: &SpaceParams,
        target: &SpaceParams,
        trials: usize,
        seed: u64,
        continuum_radius: i64,
    ) -> Result<NormEstimate> {
        let spec = self.spec;
        let inputs: Vec<GridFunction> = (0..trials)
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t as u64));
                if t % 2 == 0 {
                    TrigPolynomial::random(spec.dim(), continuum_radius, &mut rng).sample(spec)
                } else {
                    random_band_limited(spec, spec.nyquist() as f64 / 2.0, &mut rng)
                }
            })
            .collect();
        let max_ratio = |us: &[GridFunction]| -> Result<f64> {
            Ok(us
                .par_iter()
                .map(|u| self.ratio(u, source, target))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max))
        };
        let trial_max = max_ratio(&inputs)?;
        let adversarial = max_ratio(&adversarial_inputs(spec, source.s))?;
        let power = match (&self.matrix, hilbert_weights(source, &spec)) {
            (Some(m), Some(w_in)) => hilbert_weights(target, &m.big()).map(|w_out| m.weighted_norm(&w_in, &w_out, 400, seed)),
            _ => None,
        };
        let estimate = trial_max.max(adversarial).max(power.unwrap_or(0.0));
        Ok(NormEstimate {
            points: spec.points(),
            trials: trial_max,
            adversarial,
            power,
            estimate,
        })
    }
}

/// Source/target pair with an optional expected verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityCase {
    pub source: String,
    pub target: String,
    /// `bounded` or `blow-up`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<String>,
}

impl ContinuityCase {
    pub fn new(source: &str, target: &str, expect: Option<&str>) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            expect: expect.map(Into::into),
        }
    }

    pub fn spaces(&self, frame: &LpFrame) -> Result<(SpaceParams, SpaceParams)> {
        Ok((
            SpaceParams::parse(&self.source)?.with_frame(frame.clone()),
            SpaceParams::parse(&self.target)?.with_frame(frame.clone()),
        ))
    }
}

/// Parameters of [`run_continuity_table`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContinuityParams {
    pub symbol: SymbolFamily,
    pub cases: Vec<ContinuityCase>,
    pub trials: usize,
    pub log2_points: Vec<u32>,
    pub seed: u64,
    pub continuum_radius: i64,
    pub rule: GrowthRule,
}

impl Default for ContinuityParams {
    fn default() -> Self {
        Self {
            symbol: SymbolFamily::ching(0.0, 0, 1),
            cases: vec![
                ContinuityCase::new("F:s=0,p=2,q=1", "H:s=0", Some("bounded")),
                ContinuityCase::new("B:s=0,p=2,q=2", "H:s=0", Some("blow-up")),
            ],
            trials: 8,
            log2_points: vec![7, 8, 9, 10, 11],
            seed: 0,
            continuum_radius: 16,
            rule: GrowthRule::default(),
        }
    }
}

/// Estimates and verdict of one case across the grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub source: String,
    pub target: String,
    pub estimates: Vec<NormEstimate>,
    pub analysis: GrowthAnalysis,
}

/// Evaluates every case on every grid, building each grid operator once.
pub fn continuity_sweep(
    family: &SymbolFamily,
    cases: &[(SpaceParams, SpaceParams)],
    dim: usize,
    log2_points: &[u32],
    frame: &LpFrame,
    trials: usize,
    seed: u64,
    continuum_radius: i64,
    rule: &GrowthRule,
) -> Result<Vec<CaseResult>> {
    let mut per_case: Vec<Vec<NormEstimate>> = vec![Vec::new(); cases.len()];
    for &k in log2_points {
        let spec = GridSpec::new(dim, 1usize << k)?;
        let op = GridOperator::new(family, spec, frame)?;
        for (i, (s, t)) in cases.iter().enumerate() {
            per_case[i].push(op.estimate(s, t, trials, seed, continuum_radius)?);
        }
    }
    Ok(cases
        .iter()
        .zip(per_case)
        .map(|((s, t), estimates)| {
            let points: Vec<usize> = estimates.iter().map(|e| e.points).collect();
            let values: Vec<f64> = estimates.iter().map(|e| e.estimate).collect();
            CaseResult {
                source: s.to_string(),
                target: t.to_string(),
                analysis: classify_growth(&points, &values, rule),
                estimates,
            }
        })
        .collect())
}

fn verdict_name(v: GrowthVerdict) -> &'static str {
    match v {
        GrowthVerdict::BoundedConsistent => "bounded-consistent",
        GrowthVerdict::PowerBlowUp => "blow-up (power)",
        GrowthVerdict::LogBlowUp => "blow-up (logarithmic)",
        GrowthVerdict::Inconclusive => "inconclusive",
    }
}

/// Empirical operator norms across grid doublings with a bounded/blow-up
/// verdict per source/target pair.
pub fn run_continuity_table(p: &ContinuityParams, dim: usize, frame: &LpFrame) -> Result<ExperimentReport> {
    if p.log2_points.len() < 2 {
        return Err(invalid("continuity table needs at least two grids"));
    }
    let cases: Vec<(SpaceParams, SpaceParams)> = p
        .cases
        .iter()
        .map(|c| c.spaces(frame))
        .collect::<Result<_>>()?;
    let results = continuity_sweep(
        &p.symbol,
        &cases,
        dim,
        &p.log2_points,
        frame,
        p.trials,
        p.seed,
        p.continuum_radius,
        &p.rule,
    )?;
    let mut rep = ExperimentReport::new(
        "continuity",
        serde_json::to_value(p)?,
        Environment::new(dim, p.log2_points.iter().map(|k| 1usize << k).collect(), frame, vec![p.seed]),
    );
    for (case, res) in p.cases.iter().zip(&results) {
        let tag = format!("{} -> {}", res.source, res.target);
        for e in &res.estimates {
            rep.row(format!("{tag} @ {}", e.points), e.estimate, "max(trials, adversarial, power)");
        }
        let v = res.analysis.verdict;
        let passed = match case.expect.as_deref() {
            Some("bounded") => v == GrowthVerdict::BoundedConsistent,
            Some("blow-up") => v.is_blow_up(),
            Some(other) => return Err(invalid(format!("unknown expectation `{other}`"))),
            None => true,
        };
        rep.verdict(
            tag.clone(),
            passed,
            format!(
                "{} (expected {}), factors {:?}",
                verdict_name(v),
                case.expect.as_deref().unwrap_or("-"),
                res.analysis.factors
            ),
        );
        rep.series.push(Series {
            name: tag,
            x_label: "log2 N".into(),
            y_label: "norm estimate".into(),
            points: res
                .estimates
                .iter()
                .map(|e| ((e.points as f64).log2(), e.estimate))
                .collect(),
        });
    }
    let same: Vec<(SpaceParams, SpaceParams)> = cases.iter().map(|(s, _)| (s.clone(), s.clone())).collect();
    let id = continuity_sweep(
        &SymbolFamily::Fixed { spec: SymbolSpec::Identity },
        &same,
        dim,
        &p.log2_points[..2],
        frame,
        p.trials.min(2),
        p.seed,
        p.continuum_radius,
        &p.rule,
    )?;
    let worst = id
        .iter()
        .flat_map(|r| r.estimates.iter().map(|e| (e.estimate - 1.0).abs()))
        .fold(0.0, f64::max);
    rep.row("identity_control_deviation", worst, "max |ratio - 1| for a = 1 from each source space to itself");
    rep.verdict("negative control: identity", worst <= 1e-9, format!("{worst:.3e}"));
    Ok(rep)
}

