use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{fold_spectrum, Bilinear};
use crate::error::{PdError, Result};
use crate::frame::{norm, LpFrame};
use crate::grid::{fft_inverse, GridFunction, SpectralFunction};
use crate::symbol::SymbolRef;

/// One summand of the paradifferential split.
#[derive(Debug, Clone)]
pub struct Summand {
    /// 1, 2 or 3.
    pub term: u8,
    pub k: usize,
    /// Unaliased spectrum on the doubled grid.
    pub spectrum: SpectralFunction,
}

/// `a^{(1)}u`, `a^{(2)}u`, `a^{(3)}u` and their per-`k` summands.
#[derive(Debug, Clone)]
pub struct ParadiffTerms {
    pub t1: GridFunction,
    pub t2: GridFunction,
    pub t3: GridFunction,
    pub summands: Vec<Summand>,
    pub frame: LpFrame,
    /// Highest block index used.
    pub k_max: usize,
}

impl ParadiffTerms {
    pub fn total(&self) -> GridFunction {
        self.t1.add(&self.t2).and_then(|s| s.add(&self.t3)).expect("same grid")
    }
}

/// Splits `a(x, D)u` as
/// `Σ_{k>=h} a^{k-h}u_k + Σ_k [(a^k - a^{k-h})u_k + a_k(u^{k-1} - u^{k-h})] +
/// Σ_{j>=h} a_j u^{j-h}` with all indices up to the covering index of the
/// grid.
pub fn paradiff_split(a: SymbolRef, u: &GridFunction, frame: &LpFrame) -> Result<ParadiffTerms> {
    let spec = u.spec();
    if a.dim() != spec.dim() {
        return Err(PdError::ShapeMismatch("symbol and input dimensions differ".into()));
    }
    let engine = Bilinear::new(a, u)?;
    let k_max = frame.covering_index(&spec);
    let h = i64::from(frame.h());
    let f = frame.clone();
    let ball = move |j: i64, v: &[f64]| f.ball_radial(j, norm(v));
    let f2 = frame.clone();
    let corona = move |j: i64, v: &[f64]| if j < 0 { 0.0 } else { f2.block(j as usize, v) };

    let mut jobs: Vec<(u8, usize)> = Vec::new();
    for k in 0..=k_max {
        if k as i64 >= h {
            jobs.push((1, k));
            jobs.push((3, k));
        }
        jobs.push((2, k));
    }
    let summands: Vec<Summand> = jobs
        .par_iter()
        .map(|&(term, k)| {
            let k = k as i64;
            let spectrum = match term {
                1 => engine.spectrum(&|xi| ball(k - h, xi), &|eta| corona(k, eta)),
                3 => engine.spectrum(&|xi| corona(k, xi), &|eta| ball(k - h, eta)),
                _ => {
                    let mut s = engine.spectrum(&|xi| ball(k, xi) - ball(k - h, xi), &|eta| corona(k, eta));
                    if k >= 1 {
                        let t = engine.spectrum(&|xi| corona(k, xi), &|eta| ball(k - 1, eta) - ball(k - h, eta));
                        s.coeffs_mut()
                            .iter_mut()
                            .zip(t.coeffs())
                            .for_each(|(a, b)| *a += b);
                    }
                    s
                }
            };
            Summand {
                term,
                k: k as usize,
                spectrum,
            }
        })
        .collect();
    let big = engine.big();
    let sum_term = |t: u8| {
        let mut acc = SpectralFunction::zeros(big);
        for s in summands.iter().filter(|s| s.term == t) {
            acc.coeffs_mut()
                .iter_mut()
                .zip(s.spectrum.coeffs())
                .for_each(|(a, b)| *a += b);
        }
        fft_inverse(&fold_spectrum(&acc, spec))
    };
    Ok(ParadiffTerms {
        t1: sum_term(1),
        t2: sum_term(2),
        t3: sum_term(3),
        summands,
        frame: frame.clone(),
        k_max,
    })
}

/// Spectral containment of one summand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoronaRow {
    pub term: String,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub outside_mass: f64,
    pub total_mass: f64,
    /// `outside_mass / total_mass` (0 for a vanishing summand).
    pub relative: f64,
}

/// Containment of every summand in its corona or ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoronaReport {
    pub r_h: f64,
    pub rows: Vec<CoronaRow>,
    pub max_relative: f64,
    /// With a twisted diagonal constant: rows for the lower bound
    /// `r2^k/(2^{h+1}B) <= |ξ|` on the `t2` summands.
    pub tdc_rows: Vec<CoronaRow>,
    /// First `k` from which every `tdc_rows` entry is clean.
    pub tdc_eventual_from: Option<usize>,
}

fn mass_outside(s: &SpectralFunction, lo: f64, hi: f64) -> (f64, f64) {
    let spec = s.spec();
    let mut out = 0.0;
    let mut all = 0.0;
    for (i, v) in s.coeffs().iter().enumerate() {
        let m = v.norm_sqr();
        all += m;
        let r = spec.frequency_norm(i);
        if r < lo || r > hi {
            out += m;
        }
    }
    (out, all)
}

fn row(term: &str, k: usize, s: &SpectralFunction, lo: f64, hi: f64) -> CoronaRow {
    let (outside, total) = mass_outside(s, lo, hi);
    CoronaRow {
        term: term.into(),
        k,
        lower: lo,
        upper: hi,
        outside_mass: outside,
        total_mass: total,
        relative: if total > 0.0 { outside / total } else { 0.0 },
    }
}

/// Mass of each summand outside `R_h2^k <= |ξ| <= (5R/4)2^k` (terms 1, 3)
/// or `|ξ| <= 2R2^k` (term 2).
pub fn corona_ball_report(terms: &ParadiffTerms, b: Option<f64>) -> CoronaReport {
    let psi = terms.frame.psi();
    let (r, big_r) = (psi.inner(), psi.outer());
    let h = terms.frame.h();
    let r_h = terms.frame.inner_corona_factor();
    let mut rows = Vec::new();
    let mut tdc_rows = Vec::new();
    for s in &terms.summands {
        let p = (s.k as f64).exp2();
        match s.term {
            1 | 3 => rows.push(row(
                if s.term == 1 { "t1" } else { "t3" },
                s.k,
                &s.spectrum,
                r_h * p,
                1.25 * big_r * p,
            )),
            _ => {
                rows.push(row("t2", s.k, &s.spectrum, 0.0, 2.0 * big_r * p));
                if let Some(b) = b {
                    let lo = r * p / (f64::from(1u32 << (h + 1)) * b);
                    tdc_rows.push(row("t2-tdc", s.k, &s.spectrum, lo, 2.0 * big_r * p));
                }
            }
        }
    }
    let max_relative = rows.iter().map(|r| r.relative).fold(0.0, f64::max);
    let tdc_eventual_from = if tdc_rows.is_empty() {
        None
    } else {
        let mut sorted = tdc_rows.clone();
        sorted.sort_by_key(|r| r.k);
        let mut from = None;
        for r in sorted.iter().rev() {
            if r.relative <= 1e-10 {
                from = Some(r.k);
            } else {
                break;
            }
        }
        from
    };
    CoronaReport {
        r_h,
        rows,
        max_relative,
        tdc_rows,
        tdc_eventual_from,
    }
}
