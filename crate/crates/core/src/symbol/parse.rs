use std::path::PathBuf;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ching_symbol, FnSymbol, RadialBump, SymbolRef};
use crate::error::{PdError, Result};
use crate::frame::LpFrame;
use crate::grid::GridSpec;

/// Parsed form of a symbol description such as `ching:d=0,theta=+1,jmax=8`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SymbolSpec {
    Identity,
    Bessel {
        d: f64,
    },
    Ching {
        d: f64,
        theta: Vec<i64>,
        jmax: usize,
        scale: u32,
        /// Order of the zero of `A` at radius 1.
        r: u32,
        zero_width: f64,
    },
    /// JSON list of multiplier grid functions.
    Elementary {
        file: PathBuf,
    },
    Random {
        seed: u64,
        levels: Option<usize>,
    },
    Table {
        file: PathBuf,
    },
}

fn perr(input: &str, reason: impl Into<String>) -> PdError {
    PdError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn num<T: std::str::FromStr>(input: &str, key: &str, v: &str) -> Result<T> {
    v.trim_start_matches('+')
        .parse()
        .map_err(|_| perr(input, format!("bad value `{v}` for `{key}`")))
}

/// Parses `kind[:key=value,...]`.
pub fn parse_symbol_spec(input: &str) -> Result<SymbolSpec> {
    let (kind, rest) = input.split_once(':').unwrap_or((input, ""));
    let mut pairs = Vec::new();
    for item in rest.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| perr(input, format!("expected key=value, got `{item}`")))?;
        pairs.push((k.trim(), v.trim()));
    }
    let get = |key: &str| pairs.iter().find(|p| p.0 == key).map(|p| p.1);
    let allow = |keys: &[&str]| -> Result<()> {
        for (k, _) in &pairs {
            if !keys.contains(k) {
                return Err(perr(input, format!("unknown key `{k}` for `{kind}`")));
            }
        }
        Ok(())
    };
    match kind {
        "identity" => {
            allow(&[])?;
            Ok(SymbolSpec::Identity)
        }
        "bessel" => {
            allow(&["d"])?;
            let d = get("d").map_or(Ok(0.0), |v| num(input, "d", v))?;
            Ok(SymbolSpec::Bessel { d })
        }
        "ching" => {
            allow(&["d", "theta", "jmax", "scale", "variant", "r", "width"])?;
            let d = get("d").map_or(Ok(0.0), |v| num(input, "d", v))?;
            let theta = match get("theta") {
                None => vec![1],
                Some(v) => v
                    .split(':')
                    .map(|c| num::<i64>(input, "theta", c))
                    .collect::<Result<Vec<_>>>()?,
            };
            let jmax = get("jmax")
                .ok_or_else(|| perr(input, "missing `jmax`"))
                .and_then(|v| num(input, "jmax", v))?;
            let mut scale = get("scale").map_or(Ok(1), |v| num(input, "scale", v))?;
            match get("variant") {
                None | Some("theta") => {}
                Some("2theta") => scale = 2,
                Some(v) => return Err(perr(input, format!("unknown variant `{v}`"))),
            }
            let r = get("r").map_or(Ok(0), |v| num(input, "r", v))?;
            let zero_width = get("width").map_or(Ok(0.2), |v| num(input, "width", v))?;
            Ok(SymbolSpec::Ching {
                d,
                theta,
                jmax,
                scale,
                r,
                zero_width,
            })
        }
        "elementary" => {
            allow(&["file"])?;
            let file = get("file").ok_or_else(|| perr(input, "missing `file`"))?;
            Ok(SymbolSpec::Elementary { file: file.into() })
        }
        "random" => {
            allow(&["seed", "levels"])?;
            let seed = get("seed").map_or(Ok(0), |v| num(input, "seed", v))?;
            let levels = get("levels").map(|v| num(input, "levels", v)).transpose()?;
            Ok(SymbolSpec::Random { seed, levels })
        }
        "table" => {
            allow(&["file"])?;
            let file = get("file").ok_or_else(|| perr(input, "missing `file`"))?;
            Ok(SymbolSpec::Table { file: file.into() })
        }
        other => Err(perr(input, format!("unknown symbol kind `{other}`"))),
    }
}

impl SymbolSpec {
    /// The radial profile `A` described by a Ching spec.
    pub fn ching_bump(r: u32, width: f64) -> Result<RadialBump> {
        RadialBump::standard().with_zero(1.0, r, width)
    }

    /// Instantiates the symbol for use on `grid`.
    pub fn build(&self, grid: &GridSpec, frame: &LpFrame) -> Result<SymbolRef> {
        Ok(match self {
            SymbolSpec::Identity => Arc::new(FnSymbol::identity(grid.dim())),
            SymbolSpec::Bessel { d } => Arc::new(FnSymbol::bessel(grid.dim(), *d)),
            SymbolSpec::Ching {
                d,
                theta,
                jmax,
                scale,
                r,
                zero_width,
            } => {
                let bump = Self::ching_bump(*r, *zero_width)?;
                let a = ching_symbol(*d, theta, bump, *jmax, grid)?;
                let a = a.with_scale(*scale)?;
                a.check_grid(grid)?;
                Arc::new(a)
            }
            SymbolSpec::Elementary { file } => {
                Arc::new(crate::io::read_elementary(file, frame.clone())?)
            }
            SymbolSpec::Random { seed, levels } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let levels = levels.unwrap_or_else(|| frame.covering_index(grid) + 1);
                Arc::new(crate::corpus::random_elementary_symbol(*grid, frame, levels, &mut rng))
            }
            SymbolSpec::Table { file } => {
                let t = crate::io::read_pdsy(file)?;
                if t.spec() != *grid {
                    return Err(PdError::ShapeMismatch(format!(
                        "table {} is on a different grid",
                        file.display()
                    )));
                }
                Arc::new(t)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ching() {
        let s = parse_symbol_spec("ching:d=0,theta=+1,jmax=8").unwrap();
        assert_eq!(
            s,
            SymbolSpec::Ching {
                d: 0.0,
                theta: vec![1],
                jmax: 8,
                scale: 1,
                r: 0,
                zero_width: 0.2
            }
        );
        let s = parse_symbol_spec("ching:d=1.5,theta=1:-1,jmax=3,variant=2theta,r=2").unwrap();
        match s {
            SymbolSpec::Ching { theta, scale, r, .. } => {
                assert_eq!(theta, vec![1, -1]);
                assert_eq!(scale, 2);
                assert_eq!(r, 2);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_symbol_spec("ching:d=0").is_err());
        assert!(parse_symbol_spec("ching:jmax=x").is_err());
        assert!(parse_symbol_spec("nope").is_err());
        assert!(parse_symbol_spec("identity:foo=1").is_err());
        assert!(parse_symbol_spec("elementary").is_err());
    }

    #[test]
    fn builds_with_guard() {
        let g = GridSpec::one_d(64).unwrap();
        let f = LpFrame::standard();
        assert!(parse_symbol_spec("ching:jmax=4").unwrap().build(&g, &f).is_ok());
        assert!(parse_symbol_spec("ching:jmax=5").unwrap().build(&g, &f).is_err());
        assert!(parse_symbol_spec("ching:jmax=4,variant=2theta").unwrap().build(&g, &f).is_err());
        assert!(parse_symbol_spec("random:seed=4").unwrap().build(&g, &f).is_ok());
    }
}
