//! Binary and JSON persistence for grid functions and symbol tables.
//!
//! `.pdgf`: magic `PDGF`, `u32 n`, `u32 N`, `u32 0`, then `N^n` complex
//! values as interleaved little-endian `f64` pairs.
//!
//! `.pdsy`: magic `PDSY`, `u32 n`, `u32 N`, `u32 0`, `f64 d`, then the
//! `N^n × N^n` table column by column (one column per lattice `η`).

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PdError, Result};
use crate::frame::LpFrame;
use crate::grid::{GridFunction, GridSpec};
use crate::symbol::{ElementarySymbol, SymbolTable};

const GF_MAGIC: &[u8; 4] = b"PDGF";
const SY_MAGIC: &[u8; 4] = b"PDSY";

fn header(magic: &[u8; 4], spec: GridSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(16);
    out.extend_from_slice(magic);
    out.extend_from_slice(&(spec.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(spec.points() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out
}

fn push_values(out: &mut Vec<u8>, values: &[Complex64]) {
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
}

fn read_header(bytes: &[u8], magic: &[u8; 4]) -> Result<GridSpec> {
    if bytes.len() < 16 || &bytes[..4] != magic {
        return Err(PdError::Format(format!(
            "missing {} header",
            String::from_utf8_lossy(magic)
        )));
    }
    let u = |k: usize| u32::from_le_bytes(bytes[k..k + 4].try_into().expect("4 bytes"));
    GridSpec::new(u(4) as usize, u(8) as usize)
}

fn read_values(bytes: &[u8], count: usize) -> Result<Vec<Complex64>> {
    if bytes.len() != count * 16 {
        return Err(PdError::Format(format!(
            "expected {} payload bytes, found {}",
            count * 16,
            bytes.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().expect("8 bytes"));
    Ok((0..count)
        .map(|i| Complex64::new(f(16 * i), f(16 * i + 8)))
        .collect())
}

pub fn encode_pdgf(u: &GridFunction) -> Vec<u8> {
    let mut out = header(GF_MAGIC, u.spec());
    push_values(&mut out, u.values());
    out
}

pub fn decode_pdgf(bytes: &[u8]) -> Result<GridFunction> {
    let spec = read_header(bytes, GF_MAGIC)?;
    let values = read_values(&bytes[16..], spec.len())?;
    GridFunction::new(spec, values)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut f = fs::File::open(path).map_err(|e| {
        PdError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let mut buf = Vec::new();
    f.read_to_end(&mut buf)?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| {
        PdError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    f.write_all(bytes)?;
    Ok(())
}

pub fn write_pdgf(path: &Path, u: &GridFunction) -> Result<()> {
    write_file(path, &encode_pdgf(u))
}

pub fn read_pdgf(path: &Path) -> Result<GridFunction> {
    decode_pdgf(&read_file(path)?)
}

pub fn encode_pdsy(t: &SymbolTable) -> Vec<u8> {
    let mut out = header(SY_MAGIC, t.spec());
    out.extend_from_slice(&t.order_value().to_le_bytes());
    push_values(&mut out, t.data());
    out
}

pub fn decode_pdsy(bytes: &[u8]) -> Result<SymbolTable> {
    let spec = read_header(bytes, SY_MAGIC)?;
    if bytes.len() < 24 {
        return Err(PdError::Format("truncated PDSY header".into()));
    }
    let d = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    let data = read_values(&bytes[24..], spec.len() * spec.len())?;
    SymbolTable::from_columns(spec, d, data)
}

pub fn write_pdsy(path: &Path, t: &SymbolTable) -> Result<()> {
    write_file(path, &encode_pdsy(t))
}

pub fn read_pdsy(path: &Path) -> Result<SymbolTable> {
    decode_pdsy(&read_file(path)?)
}

/// JSON form of a grid function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunctionJson {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&GridFunction> for GridFunctionJson {
    fn from(u: &GridFunction) -> Self {
        Self {
            n: u.spec().dim(),
            points: u.spec().points(),
            re: u.values().iter().map(|v| v.re).collect(),
            im: u.values().iter().map(|v| v.im).collect(),
        }
    }
}

impl GridFunctionJson {
    pub fn into_grid_function(self) -> Result<GridFunction> {
        let spec = GridSpec::new(self.n, self.points)?;
        if self.re.len() != self.im.len() {
            return Err(PdError::Format("re and im lengths differ".into()));
        }
        let values = self
            .re
            .into_iter()
            .zip(self.im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect();
        GridFunction::new(spec, values)
    }
}

pub fn write_grid_json(path: &Path, u: &GridFunction) -> Result<()> {
    write_file(path, serde_json::to_string(&GridFunctionJson::from(u))?.as_bytes())
}

pub fn read_grid_json(path: &Path) -> Result<GridFunction> {
    let j: GridFunctionJson = serde_json::from_slice(&read_file(path)?)?;
    j.into_grid_function()
}

/// Reads `.pdgf` or `.json` by extension.
pub fn read_grid_function(path: &Path) -> Result<GridFunction> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => read_grid_json(path),
        _ => read_pdgf(path),
    }
}

/// Writes `.pdgf` or `.json` by extension.
pub fn write_grid_function(path: &Path, u: &GridFunction) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => write_grid_json(path, u),
        _ => write_pdgf(path, u),
    }
}

/// JSON description of an elementary symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementaryJson {
    #[serde(default)]
    pub order: f64,
    pub multipliers: Vec<GridFunctionJson>,
}

pub fn read_elementary(path: &Path, frame: LpFrame) -> Result<ElementarySymbol> {
    let j: ElementaryJson = serde_json::from_slice(&read_file(path)?)?;
    let ms = j
        .multipliers
        .into_iter()
        .map(GridFunctionJson::into_grid_function)
        .collect::<Result<Vec<_>>>()?;
    Ok(ElementarySymbol::new(ms, frame)?.with_order(j.order))
}

pub fn write_elementary(path: &Path, a: &ElementarySymbol) -> Result<()> {
    use crate::symbol::Symbol;
    let j = ElementaryJson {
        order: a.order(),
        multipliers: a.multipliers().iter().map(GridFunctionJson::from).collect(),
    };
    write_file(path, serde_json::to_string(&j)?.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_elementary_symbol, random_grid_function};
    use crate::symbol::{ChingSymbol, RadialBump, Symbol};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pdgf_round_trip_and_layout() {
        let g = GridSpec::new(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_grid_function(g, &mut rng);
        let bytes = encode_pdgf(&u);
        assert_eq!(&bytes[..4], b"PDGF");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(bytes.len(), 16 + 64 * 16);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), u.values()[0].re);
        assert_eq!(decode_pdgf(&bytes).unwrap(), u);
    }

    #[test]
    fn pdgf_rejects_bad_input() {
        assert!(decode_pdgf(b"XXXX").is_err());
        let g = GridSpec::one_d(8).unwrap();
        let mut b = encode_pdgf(&GridFunction::zeros(g));
        b.pop();
        assert!(decode_pdgf(&b).is_err());
    }

    #[test]
    fn pdsy_and_json_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::one_d(16).unwrap();
        let a = ChingSymbol::new(0.5, &[1], RadialBump::standard(), 2).unwrap();
        let t = SymbolTable::tabulate(&a, g).unwrap();
        let p = dir.path().join("a.pdsy");
        write_pdsy(&p, &t).unwrap();
        let back = read_pdsy(&p).unwrap();
        assert_eq!(back.data(), t.data());
        assert_eq!(back.order(), 0.5);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_grid_function(g, &mut rng);
        let pj = dir.path().join("u.json");
        write_grid_function(&pj, &u).unwrap();
        assert_eq!(read_grid_function(&pj).unwrap(), u);

        let e = random_elementary_symbol(g, &LpFrame::standard(), 3, &mut rng);
        let pe = dir.path().join("e.json");
        write_elementary(&pe, &e).unwrap();
        let e2 = read_elementary(&pe, LpFrame::standard()).unwrap();
        assert_eq!(e2.multipliers(), e.multipliers());
    }

    #[test]
    fn missing_file_names_path() {
        let err = read_pdgf(Path::new("/nonexistent/u.pdgf")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/u.pdgf"));
    }
}
