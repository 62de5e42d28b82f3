//! Seeded test-function and symbol generators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{PdError, Result};
use crate::frame::{LpFrame, ModulationFunction};
use crate::grid::{fft_inverse, GridFunction, GridSpec, SpectralFunction};
use crate::symbol::ElementarySymbol;

fn unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Independent uniform samples in `[-1, 1]² ⊂ ℂ` at every grid point.
/// Deterministic generator used by every seeded corpus.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_grid_function(spec: GridSpec, rng: &mut impl Rng) -> GridFunction {
    let values = (0..spec.len()).map(|_| unit_complex(rng)).collect();
    GridFunction::from_raw(spec, values)
}

/// Random coefficients on `|η| <= radius`, zero elsewhere.
pub fn random_band_limited(spec: GridSpec, radius: f64, rng: &mut impl Rng) -> GridFunction {
    let coeffs = (0..spec.len())
        .map(|i| {
            let c = unit_complex(rng);
            if spec.frequency_norm(i) <= radius && spec.represents(&spec.frequency(i)[..spec.dim()]) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft_inverse(&SpectralFunction::from_raw(spec, coeffs))
}

/// Random coefficients on the corona `lo <= |η| <= hi`.
pub fn random_shell(spec: GridSpec, lo: f64, hi: f64, rng: &mut impl Rng) -> GridFunction {
    let coeffs = (0..spec.len())
        .map(|i| {
            let c = unit_complex(rng);
            let r = spec.frequency_norm(i);
            if r >= lo && r <= hi {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    fft_inverse(&SpectralFunction::from_raw(spec, coeffs))
}

/// Elementary symbol `Σ_{j<levels} m_j(x)Φ_j(η)` with `m_j` band-limited to
/// `|ξ| <= 2^j` and `sup|m_j| <= 1`; a type 1,1 symbol of order 0.
pub fn random_elementary_symbol(
    spec: GridSpec,
    frame: &LpFrame,
    levels: usize,
    rng: &mut impl Rng,
) -> ElementarySymbol {
    let multipliers = (0..levels.max(1))
        .map(|j| {
            let m = random_band_limited(spec, (j as f64).exp2(), rng);
            let s = m.sup_norm();
            if s > 0.0 {
                m.scale(Complex64::new(1.0 / s, 0.0))
            } else {
                m
            }
        })
        .collect();
    ElementarySymbol::new(multipliers, frame.clone()).expect("multipliers share a grid")
}

/// A trigonometric polynomial defined independently of any grid, so the
/// same function can be sampled under refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub dim: usize,
    pub terms: Vec<([i64; 2], Complex64)>,
}

impl TrigPolynomial {
    pub fn new(dim: usize, terms: Vec<([i64; 2], Complex64)>) -> Self {
        Self { dim, terms }
    }

    pub fn random(dim: usize, radius: i64, rng: &mut impl Rng) -> Self {
        let mut terms = Vec::new();
        let r2 = radius * radius;
        let range2 = if dim == 2 { -radius..=radius } else { 0..=0 };
        for a in -radius..=radius {
            for b in range2.clone() {
                if a * a + b * b <= r2 {
                    terms.push(([a, b], unit_complex(rng)));
                }
            }
        }
        Self { dim, terms }
    }

    /// Largest frequency norm present.
    pub fn radius(&self) -> f64 {
        self.terms
            .iter()
            .map(|(f, _)| ((f[0] * f[0] + f[1] * f[1]) as f64).sqrt())
            .fold(0.0, f64::max)
    }

    /// Coefficients on `spec`; frequencies outside its range are dropped.
    pub fn spectrum(&self, spec: GridSpec) -> SpectralFunction {
        let mut c = SpectralFunction::zeros(spec);
        for (f, v) in &self.terms {
            if spec.represents(&f[..spec.dim()]) {
                let i = spec.frequency_index(&f[..spec.dim()]);
                c.coeffs_mut()[i] += v;
            }
        }
        c
    }

    pub fn sample(&self, spec: GridSpec) -> GridFunction {
        fft_inverse(&self.spectrum(spec))
    }
}

/// `𝓕^{-1}[ψ(η/R)]`: a bump concentrated at `x = 0` with width `~1/R`,
/// normalised to `sup = 1`.
pub fn shrinking_bump(spec: GridSpec, radius: f64) -> GridFunction {
    let psi = ModulationFunction::new(1.0, 2.0).expect("valid radii");
    let coeffs = (0..spec.len())
        .map(|i| Complex64::new(psi.radial(spec.frequency_norm(i) / radius), 0.0))
        .collect();
    let u = fft_inverse(&SpectralFunction::from_raw(spec, coeffs));
    let s = u.sup_norm();
    u.scale(Complex64::new(1.0 / s, 0.0))
}


/// Input generator described by a string such as `single:eta=32`,
/// `random:seed=3,radius=8`, `shell:seed=1,lo=8,hi=16`, `bump:radius=8` or
/// `white:seed=5`. Two-dimensional frequencies are written `eta=3:4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputSpec {
    Single { eta: Vec<i64> },
    Random { seed: u64, radius: f64 },
    Shell { seed: u64, lo: f64, hi: f64 },
    Bump { radius: f64 },
    White { seed: u64 },
    Trig { seed: u64, radius: i64 },
}

impl InputSpec {
    pub fn parse(input: &str) -> Result<Self> {
        let err = |reason: String| PdError::Parse {
            input: input.to_string(),
            reason,
        };
        let (kind, rest) = input.split_once(':').unwrap_or((input, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{item}`")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let keys: &[&str] = match kind {
            "single" => &["eta"],
            "random" => &["seed", "radius"],
            "shell" => &["seed", "lo", "hi"],
            "bump" => &["radius"],
            "white" => &["seed"],
            "trig" => &["seed", "radius"],
            other => return Err(err(format!("unknown input kind `{other}`"))),
        };
        if let Some((k, _)) = pairs.iter().find(|(k, _)| !keys.contains(k)) {
            return Err(err(format!("unknown key `{k}` for `{kind}`")));
        }
        let get = |k: &str| pairs.iter().find(|p| p.0 == k).map(|p| p.1);
        fn num<T: std::str::FromStr>(v: Option<&str>, default: Option<T>, key: &str) -> std::result::Result<T, String> {
            match v {
                Some(v) => v.trim_start_matches('+').parse().map_err(|_| format!("bad value `{v}` for `{key}`")),
                None => default.ok_or_else(|| format!("missing `{key}`")),
            }
        }
        let spec = match kind {
            "single" => {
                let eta = get("eta")
                    .ok_or_else(|| err("missing `eta`".into()))?
                    .split(':')
                    .map(|c| num::<i64>(Some(c), None, "eta"))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(err)?;
                InputSpec::Single { eta }
            }
            "random" => InputSpec::Random {
                seed: num(get("seed"), Some(0), "seed").map_err(err)?,
                radius: num(get("radius"), Some(8.0), "radius").map_err(err)?,
            },
            "shell" => InputSpec::Shell {
                seed: num(get("seed"), Some(0), "seed").map_err(err)?,
                lo: num(get("lo"), None, "lo").map_err(err)?,
                hi: num(get("hi"), None, "hi").map_err(err)?,
            },
            "bump" => InputSpec::Bump {
                radius: num(get("radius"), Some(8.0), "radius").map_err(err)?,
            },
            "white" => InputSpec::White {
                seed: num(get("seed"), Some(0), "seed").map_err(err)?,
            },
            _ => InputSpec::Trig {
                seed: num(get("seed"), Some(0), "seed").map_err(err)?,
                radius: num(get("radius"), Some(4), "radius").map_err(err)?,
            },
        };
        Ok(spec)
    }

    /// The grid-independent polynomial behind a `trig:` spec.
    pub fn trig_polynomial(&self, dim: usize) -> Option<TrigPolynomial> {
        match self {
            InputSpec::Trig { seed, radius } => {
                Some(TrigPolynomial::random(dim, *radius, &mut ChaCha8Rng::seed_from_u64(*seed)))
            }
            _ => None,
        }
    }

    /// Samples the generator on `spec`.
    pub fn build(&self, spec: GridSpec) -> Result<GridFunction> {
        let n = spec.dim();
        Ok(match self {
            InputSpec::Single { eta } => {
                if eta.len() != n {
                    return Err(PdError::ShapeMismatch(format!(
                        "frequency {eta:?} on a {n}-dimensional grid"
                    )));
                }
                if !spec.represents(eta) {
                    return Err(PdError::Precondition(format!("frequency {eta:?} is not on the grid")));
                }
                fft_inverse(&SpectralFunction::mode(spec, eta))
            }
            InputSpec::Random { seed, radius } => {
                random_band_limited(spec, *radius, &mut ChaCha8Rng::seed_from_u64(*seed))
            }
            InputSpec::Shell { seed, lo, hi } => random_shell(spec, *lo, *hi, &mut ChaCha8Rng::seed_from_u64(*seed)),
            InputSpec::Bump { radius } => shrinking_bump(spec, *radius),
            InputSpec::White { seed } => random_grid_function(spec, &mut ChaCha8Rng::seed_from_u64(*seed)),
            InputSpec::Trig { .. } => self.trig_polynomial(n).expect("trig spec").sample(spec),
        })
    }
}
