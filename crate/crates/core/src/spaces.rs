//! Besov and Lizorkin–Triebel quasi-norms relative to a Littlewood–Paley
//! frame, with the embedding, maximal and summation probes built on them.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PdError, Result};
use crate::frame::{corona_blocks, norm, LpFrame};
use crate::grid::{fft_forward, lp_norm, lp_norm_of, sobolev_norm, GridFunction, GridSpec};
use crate::pointwise::{peetre_maximal, MaximalParams};

/// Which quasi-norm a [`SpaceParams`] denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    Besov,
    TriebelLizorkin,
    /// `H^s = F^s_{2,2}` evaluated through the Bessel potential (`p = 2`).
    Sobolev,
}

/// Smoothness, exponents, scale and frame of a function space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub scale: Scale,
    pub frame: LpFrame,
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v <= 0.0 {
        return Err(invalid(format!("{name} must be in (0, ∞], got {v}")));
    }
    Ok(())
}

impl SpaceParams {
    pub fn new(scale: Scale, s: f64, p: f64, q: f64, frame: LpFrame) -> Result<Self> {
        if !s.is_finite() {
            return Err(invalid(format!("smoothness must be finite, got {s}")));
        }
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        match scale {
            Scale::TriebelLizorkin if p.is_infinite() => {
                return Err(invalid("Lizorkin–Triebel spaces need p < ∞"))
            }
            Scale::Sobolev if p != 2.0 || q != 2.0 => {
                return Err(invalid("the Bessel-potential scale is implemented for p = q = 2 only"))
            }
            _ => {}
        }
        Ok(Self { s, p, q, scale, frame })
    }

    pub fn besov(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(Scale::Besov, s, p, q, LpFrame::standard())
    }

    pub fn triebel(s: f64, p: f64, q: f64) -> Result<Self> {
        Self::new(Scale::TriebelLizorkin, s, p, q, LpFrame::standard())
    }

    pub fn sobolev(s: f64) -> Self {
        Self::new(Scale::Sobolev, s, 2.0, 2.0, LpFrame::standard()).expect("valid exponents")
    }

    pub fn with_s(&self, s: f64) -> Self {
        Self { s, ..self.clone() }
    }

    pub fn with_frame(&self, frame: LpFrame) -> Self {
        Self { frame, ..self.clone() }
    }

    /// Parses `F:s=0.5,p=2,q=1`, `B:s=0,p=2,q=inf` or `H:s=1`.
    pub fn parse(input: &str) -> Result<Self> {
        let bad = |reason: String| PdError::Parse {
            input: input.to_string(),
            reason,
        };
        let (head, rest) = input.split_once(':').unwrap_or((input, ""));
        let scale = match head.trim() {
            "B" | "b" => Scale::Besov,
            "F" | "f" => Scale::TriebelLizorkin,
            "H" | "h" => Scale::Sobolev,
            other => return Err(bad(format!("unknown scale '{other}' (expected B, F or H)"))),
        };
        let (mut s, mut p, mut q) = (0.0, 2.0, 2.0);
        for item in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got '{item}'")))?;
            let v = parse_exponent(v.trim()).map_err(|e| bad(format!("{k}: {e}")))?;
            match k.trim() {
                "s" => s = v,
                "p" => p = v,
                "q" => q = v,
                other => return Err(bad(format!("unknown key '{other}'"))),
            }
        }
        Self::new(scale, s, p, q, LpFrame::standard())
    }
}

fn parse_exponent(v: &str) -> std::result::Result<f64, String> {
    match v {
        "inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        _ => v.parse::<f64>().map_err(|e| e.to_string()),
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.scale {
            Scale::Besov => "B",
            Scale::TriebelLizorkin => "F",
            Scale::Sobolev => return write!(f, "H^{}", self.s),
        };
        write!(f, "{tag}^{}_{{{},{}}}", self.s, self.p, self.q)
    }
}

/// `(Σ|v|^q)^{1/q}`, the max for `q = ∞`.
pub fn lq_sum(values: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Index `J` of the last block: the sums stop at the covering index of the
/// grid, where the blocks already sum to one.
pub fn truncation_index(spec: &GridSpec, frame: &LpFrame) -> usize {
    frame.covering_index(spec)
}

/// Weighted block norms `2^{sj}‖Φ_j(D)u‖_p`, `j = 0..=J`.
pub fn besov_profile(u: &GridFunction, sp: &SpaceParams) -> Result<Vec<f64>> {
    let blocks = corona_blocks(u, &sp.frame);
    blocks
        .par_iter()
        .enumerate()
        .map(|(j, b)| Ok((sp.s * j as f64).exp2() * lp_norm(b, sp.p)?))
        .collect()
}

/// `(Σ_j 2^{sjq}‖Φ_j(D)u‖_p^q)^{1/q}`.
pub fn besov_norm(u: &GridFunction, sp: &SpaceParams) -> Result<f64> {
    Ok(lq_sum(besov_profile(u, sp)?.into_iter(), sp.q))
}

/// Pointwise `(Σ_j 2^{sjq}|v_j(x)|^q)^{1/q}` of a block sequence.
pub fn block_lq(blocks: &[GridFunction], s: f64, q: f64) -> Vec<f64> {
    let len = blocks.first().map_or(0, |b| b.spec().len());
    let weights: Vec<f64> = (0..blocks.len()).map(|j| (s * j as f64).exp2()).collect();
    (0..len)
        .into_par_iter()
        .map(|x| lq_sum(blocks.iter().zip(&weights).map(|(b, w)| w * b.values()[x].norm()), q))
        .collect()
}

/// `‖(Σ_j 2^{sjq}|Φ_j(D)u|^q)^{1/q}‖_p`; `p = ∞` is rejected.
pub fn triebel_norm(u: &GridFunction, sp: &SpaceParams) -> Result<f64> {
    if sp.p.is_infinite() {
        return Err(invalid("Lizorkin–Triebel norms need p < ∞"));
    }
    let blocks = corona_blocks(u, &sp.frame);
    let g = block_lq(&blocks, sp.s, sp.q);
    lp_norm_of(u.spec(), g.into_iter(), sp.p)
}

/// Dispatches on the scale.
pub fn space_norm(u: &GridFunction, sp: &SpaceParams) -> Result<f64> {
    match sp.scale {
        Scale::Besov => besov_norm(u, sp),
        Scale::TriebelLizorkin => triebel_norm(u, sp),
        Scale::Sobolev => Ok(sobolev_norm(&fft_forward(u), sp.s)),
    }
}

/// Hölder–Zygmund norm `‖u‖_∞ + sup_{x,h} |u(x+h) + u(x-h) - 2u(x)|/|h|^s`
/// over grid offsets, for `0 < s < 2`.
pub fn zygmund_norm(u: &GridFunction, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(invalid(format!("Zygmund norm needs 0 < s < 2, got {s}")));
    }
    let spec = u.spec();
    if spec.len() > 4096 {
        return Err(PdError::SizeGuard {
            what: "Zygmund norm",
            size: spec.len(),
            limit: 4096,
        });
    }
    let v = u.values();
    let semi = (1..spec.len())
        .into_par_iter()
        .map(|h| {
            let hn = spec.torus_norm(h).powf(s);
            let neg = spec.sub_index(0, h);
            (0..spec.len())
                .map(|x| {
                    let d = v[spec.add_index(x, h)] + v[spec.add_index(x, neg)] - v[x] * 2.0;
                    d.norm() / hn
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(u.sup_norm() + semi)
}

/// Fitted constants of the embeddings checked by [`embedding_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub truncation_index: usize,
    /// `max ‖u‖_{F^s_{p,q}}/‖u‖_{B^s_{p,min(p,q)}}`.
    pub lower: f64,
    /// `max ‖u‖_{B^s_{p,max(p,q)}}/‖u‖_{F^s_{p,q}}`.
    pub upper: f64,
    /// `(s0, p0, s1, p1)` and `max ‖u‖_{F^{s1}_{p1,q}}/‖u‖_{F^{s0}_{p0,q}}`.
    pub sobolev: Option<((f64, f64, f64, f64), f64)>,
    /// Range of `‖u‖_{C^s_*}/‖u‖_{B^s_{∞,∞}}` over the corpus.
    pub zygmund: Option<(f64, f64)>,
}

/// Sandwich `B^s_{p,min(p,q)} ↪ F^s_{p,q} ↪ B^s_{p,max(p,q)}`, the Sobolev
/// embedding into `p1 = 2p` with `s1 = s - n/p + n/p1`, and `C^s_* = B^s_{∞,∞}`
/// when `0 < s < 2`.
pub fn embedding_report(corpus: &[GridFunction], s: f64, p: f64, q: f64) -> Result<EmbeddingReport> {
    let first = corpus
        .first()
        .ok_or_else(|| invalid("embedding report needs a nonempty corpus"))?;
    let dim = first.spec().dim() as f64;
    let f = SpaceParams::triebel(s, p, q)?;
    let b_lo = SpaceParams::besov(s, p, p.min(q))?;
    let b_hi = SpaceParams::besov(s, p, p.max(q))?;
    let p1 = 2.0 * p;
    let s1 = s - dim / p + dim / p1;
    let f1 = SpaceParams::triebel(s1, p1, q)?;
    let zyg = s > 0.0 && s < 2.0 && first.spec().len() <= 4096;
    let b_inf = SpaceParams::besov(s, f64::INFINITY, f64::INFINITY)?;
    let rows = corpus
        .par_iter()
        .map(|u| {
            let nf = triebel_norm(u, &f)?;
            let lo = nf / besov_norm(u, &b_lo)?;
            let hi = besov_norm(u, &b_hi)? / nf;
            let sob = triebel_norm(u, &f1)? / nf;
            let z = if zyg {
                Some(zygmund_norm(u, s)? / besov_norm(u, &b_inf)?)
            } else {
                None
            };
            Ok((lo, hi, sob, z))
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    let zs: Vec<f64> = rows.iter().filter_map(|r| r.3).collect();
    Ok(EmbeddingReport {
        s,
        p,
        q,
        truncation_index: truncation_index(&first.spec(), &f.frame),
        lower: max(&mut rows.iter().map(|r| r.0)),
        upper: max(&mut rows.iter().map(|r| r.1)),
        sobolev: Some(((s, p, s1, p1), max(&mut rows.iter().map(|r| r.2)))),
        zygmund: if zs.is_empty() {
            None
        } else {
            Some((
                zs.iter().cloned().fold(f64::INFINITY, f64::min),
                zs.iter().cloned().fold(0.0, f64::max),
            ))
        },
    })
}

/// Largest `max/min` ratio between corresponding constants of two reports.
pub fn embedding_spread(a: &EmbeddingReport, b: &EmbeddingReport) -> f64 {
    let ratio = |x: f64, y: f64| x.max(y) / x.min(y);
    let mut r = ratio(a.lower, b.lower).max(ratio(a.upper, b.upper));
    if let (Some(x), Some(y)) = (a.sobolev, b.sobolev) {
        r = r.max(ratio(x.1, y.1));
    }
    r
}

/// Fitted constant of the vector-valued maximal inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorMaximalFit {
    pub p: f64,
    pub q: f64,
    pub n_exp: f64,
    pub ratios: Vec<f64>,
    pub c: f64,
}

/// `∫‖(u_k*(N, R2^k; x))_k‖_{ℓq}^p dx / ∫‖(u_k(x))_k‖_{ℓq}^p dx` over a
/// corpus of block sequences with `supp û_k ⊂ {|ξ| <= R2^k}`.
pub fn vector_maximal_check(
    corpus: &[Vec<GridFunction>],
    p: f64,
    q: f64,
    n_exp: f64,
    radius: f64,
) -> Result<VectorMaximalFit> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if p.is_infinite() {
        return Err(invalid("vector maximal check needs p < ∞"));
    }
    let dim = corpus
        .first()
        .and_then(|b| b.first())
        .map(|u| u.spec().dim())
        .ok_or_else(|| invalid("vector maximal check needs a nonempty corpus"))?;
    let need = dim as f64 / p.min(q);
    if !(n_exp > need) {
        return Err(invalid(format!(
            "vector maximal inequality needs N > n/min(p,q) = {need}, got {n_exp}"
        )));
    }
    for blocks in corpus {
        for (k, u) in blocks.iter().enumerate() {
            let limit = radius * (k as f64).exp2();
            if crate::pointwise::spectral_radius(u) > limit + 1e-9 && u.sup_norm() > 0.0 {
                return Err(PdError::Precondition(format!(
                    "block {k} has spectrum beyond radius {limit}"
                )));
            }
        }
    }
    let ratios = corpus
        .par_iter()
        .map(|blocks| {
            let stars = blocks
                .iter()
                .enumerate()
                .map(|(k, u)| {
                    let params = MaximalParams::new(n_exp, radius * (k as f64).exp2())?;
                    Ok(peetre_maximal(u, &params))
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = blocks[0].spec();
            let num = lp_norm_of(spec, block_lq(&stars, 0.0, q).into_iter(), p)?;
            let den = lp_norm_of(spec, block_lq(blocks, 0.0, q).into_iter(), p)?;
            Ok((num / den).powf(p))
        })
        .collect::<Result<Vec<f64>>>()?;
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(VectorMaximalFit {
        p,
        q,
        n_exp,
        ratios,
        c,
    })
}

/// Random block sequence `u_k`, `k = 0..levels`, with spectra in the balls
/// `|ξ| <= radius·2^k`.
pub fn random_ball_blocks(spec: GridSpec, levels: usize, radius: f64, rng: &mut impl Rng) -> Vec<GridFunction> {
    (0..levels)
        .map(|k| crate::corpus::random_band_limited(spec, radius * (k as f64).exp2(), rng))
        .collect()
}

/// Fit of the summation lemma on corpus A and verification on corpus B.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummationFit {
    pub s: f64,
    pub q: f64,
    pub c: f64,
    /// `(1 - 2^s)^{-1}`, `(1 - 2^{sq})^{-1}` raised to `q` for finite `q >= 1`.
    pub reference: f64,
    pub violations: usize,
    pub checked: usize,
}

/// `(LHS, RHS)` of `Σ_j 2^{sjq}(Σ_{k<=j}|b_k|)^q <= cΣ_j 2^{sjq}|b_j|^q`
/// (sup forms for `q = ∞`).
pub fn summation_sides(b: &[f64], s: f64, q: f64) -> (f64, f64) {
    let mut partial = 0.0;
    let (mut lhs, mut rhs): (f64, f64) = (0.0, 0.0);
    for (j, v) in b.iter().enumerate() {
        partial += v.abs();
        let w = (s * j as f64).exp2();
        if q.is_infinite() {
            lhs = lhs.max(w * partial);
            rhs = rhs.max(w * v.abs());
        } else {
            lhs += (w * partial).powf(q);
            rhs += (w * v.abs()).powf(q);
        }
    }
    (lhs, rhs)
}

/// Fits `c` on `fit` and counts sequences of `verify` exceeding `1.01c`.
pub fn summation_lemma_check(s: f64, q: f64, fit: &[Vec<f64>], verify: &[Vec<f64>]) -> Result<SummationFit> {
    if !(s < 0.0) {
        return Err(invalid(format!("summation lemma needs s < 0, got {s}")));
    }
    check_exponent("q", q)?;
    let ratio = |b: &Vec<f64>| {
        let (l, r) = summation_sides(b, s, q);
        if r > 0.0 {
            l / r
        } else {
            0.0
        }
    };
    let c = fit.iter().map(ratio).fold(0.0, f64::max);
    let violations = verify
        .iter()
        .chain(fit.iter())
        .filter(|b| {
            let (l, r) = summation_sides(b, s, q);
            l > 1.01 * c * r
        })
        .count();
    let geo = 1.0 / (1.0 - s.exp2());
    let reference = if q.is_infinite() {
        geo
    } else if q >= 1.0 {
        geo.powf(q)
    } else {
        1.0 / (1.0 - (s * q).exp2())
    };
    Ok(SummationFit {
        s,
        q,
        c,
        reference,
        violations,
        checked: fit.len() + verify.len(),
    })
}

/// `count` random nonnegative sequences of length `len`, half of them sparse.
pub fn random_sequences(count: usize, len: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            (0..len)
                .map(|_| {
                    if i % 2 == 0 && rng.gen_bool(0.9) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0f64).powi(3)
                    }
                })
                .collect()
        })
        .collect()
}

/// Fitting corpus: unit vectors, geometric sequences `2^{tk}` for
/// `t ∈ [-2, 2]`, then random sequences up to `count`.
pub fn summation_corpus(count: usize, len: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..len)
        .map(|k| (0..len).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect();
    for i in 0..=80 {
        let t = -2.0 + 0.05 * f64::from(i);
        out.push((0..len).map(|k| (t * k as f64).exp2()).collect());
    }
    out.truncate(count);
    let rest = count - out.len();
    out.extend(random_sequences(rest, len, rng));
    out
}

/// Spectral condition imposed on a block series `Σu_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SeriesMode {
    /// `|ξ| <= A2^j`.
    Ball,
    /// `A^{-1}2^j <= |ξ| <= A2^j` (`j >= 1`).
    Corona,
    /// `A^{-1}2^{θj} <= |ξ| <= A2^j` (`j >= 1`).
    Asymmetric { theta: f64 },
}

/// Outcome of [`corona_series_sum`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub mode: SeriesMode,
    /// `‖(Σ_j 2^{sjq}|u_j|^q)^{1/q}‖_p`.
    pub block_bound: f64,
    /// Norm of the sum in the target space.
    pub norm: f64,
    pub ratio: f64,
    #[serde(skip)]
    pub sum: Option<GridFunction>,
}

/// Sums `u_j` after checking their spectra against `mode` with constant
/// `a`, and compares the target norm of the sum with the block bound of
/// smoothness `s`.
pub fn corona_series_sum(
    blocks: &[GridFunction],
    mode: SeriesMode,
    a: f64,
    s: f64,
    target: &SpaceParams,
) -> Result<SeriesReport> {
    let first = blocks
        .first()
        .ok_or_else(|| invalid("series needs at least one block"))?;
    let spec = first.spec();
    if !(a >= 1.0) {
        return Err(invalid(format!("spectral constant must be >= 1, got {a}")));
    }
    for (j, u) in blocks.iter().enumerate() {
        if u.spec() != spec {
            return Err(PdError::ShapeMismatch(format!("block {j} lives on another grid")));
        }
        let c = fft_forward(u);
        let top = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let jf = j as f64;
        let hi = a * jf.exp2();
        let lo = match mode {
            SeriesMode::Ball => 0.0,
            _ if j == 0 => 0.0,
            SeriesMode::Corona => jf.exp2() / a,
            SeriesMode::Asymmetric { theta } => (theta * jf).exp2() / a,
        };
        for (i, v) in c.coeffs().iter().enumerate() {
            if v.norm() > 1e-13 * top {
                let r = norm(&spec.frequency_vec(i));
                if r > hi + 1e-9 || r < lo - 1e-9 {
                    return Err(PdError::Precondition(format!(
                        "block {j} has spectrum at |ξ| = {r} outside [{lo}, {hi}]"
                    )));
                }
            }
        }
    }
    let mut sum = GridFunction::zeros(spec);
    for u in blocks {
        sum = sum.add(u)?;
    }
    let g = block_lq(blocks, s, target.q);
    let block_bound = lp_norm_of(spec, g.into_iter(), target.p)?;
    let n = space_norm(&sum, target)?;
    Ok(SeriesReport {
        mode,
        block_bound,
        norm: n,
        ratio: if block_bound > 0.0 { n / block_bound } else { 0.0 },
        sum: Some(sum),
    })
}

/// Random blocks obeying `mode` with `A = 2`: block `j` is a random shell
/// on the admissible band.
pub fn random_series_blocks(spec: GridSpec, levels: usize, mode: SeriesMode, rng: &mut impl Rng) -> Vec<GridFunction> {
    (0..levels)
        .map(|j| {
            let jf = j as f64;
            let hi = 2.0 * jf.exp2();
            let lo = match mode {
                SeriesMode::Ball => 0.0,
                _ if j == 0 => 0.0,
                SeriesMode::Corona => jf.exp2() / 2.0,
                SeriesMode::Asymmetric { theta } => (theta * jf).exp2() / 2.0,
            };
            let u = crate::corpus::random_shell(spec, lo, hi, rng);
            let w = (-(jf) * 0.5).exp2();
            u.scale(Complex64::new(w, 0.0))
        })
        .collect()
}

/// Range of `‖u‖_{sp}/‖u‖_{sp with other frame}` over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEquivalence {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
}

pub fn frame_equivalence(corpus: &[GridFunction], sp: &SpaceParams, other: &LpFrame) -> Result<FrameEquivalence> {
    let alt = sp.with_frame(other.clone());
    let ratios = corpus
        .par_iter()
        .map(|u| Ok(space_norm(u, sp)? / space_norm(u, &alt)?))
        .collect::<Result<Vec<f64>>>()?;
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    Ok(FrameEquivalence {
        min,
        max,
        spread: max / min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_band_limited, TrigPolynomial};
    use crate::frame::{block_project, BlockKind, ModulationFunction, Profile};
    use crate::grid::{fft_inverse, SpectralFunction};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn g64() -> GridSpec {
        GridSpec::one_d(64).unwrap()
    }

    #[test]
    fn constant_function_norms() {
        let one = GridFunction::from_fn(g64(), |_| Complex64::new(1.0, 0.0));
        for p in [1.0, 2.0, 3.0] {
            let b = besov_norm(&one, &SpaceParams::besov(1.5, p, 1.0).unwrap()).unwrap();
            assert!((b - (2.0 * PI).powf(1.0 / p)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_mode_block_oracle() {
        let g = g64();
        let u = fft_inverse(&SpectralFunction::mode(g, &[4]));
        let frame = LpFrame::standard();
        let sp = SpaceParams::besov(0.5, 2.0, 1.0).unwrap();
        let mut expect = 0.0;
        for j in 0..=frame.covering_index(&g) {
            let m = frame.block_radial(j, 4.0);
            expect += (0.5 * j as f64).exp2() * m.abs() * (2.0 * PI).sqrt();
        }
        assert_eq!(frame.block_radial(2, 4.0), 1.0);
        let b = besov_norm(&u, &sp).unwrap();
        assert!((b - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn besov_equals_triebel_at_p_eq_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, s) in [(1.0, 0.3), (2.0, -0.5), (0.7, 1.0)] {
            let u = random_band_limited(g64(), 20.0, &mut rng);
            let b = besov_norm(&u, &SpaceParams::besov(s, p, p).unwrap()).unwrap();
            let f = triebel_norm(&u, &SpaceParams::triebel(s, p, p).unwrap()).unwrap();
            assert!((b - f).abs() <= 1e-12 * b);
        }
    }

    #[test]
    fn smoothness_reweighting() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = random_band_limited(g64(), 30.0, &mut rng);
        let sp = SpaceParams::besov(0.0, 2.0, 2.0).unwrap();
        let prof = besov_profile(&u, &sp).unwrap();
        let b = besov_norm(&u, &sp.with_s(0.7)).unwrap();
        let expect = lq_sum(prof.iter().enumerate().map(|(j, v)| v * (0.7 * j as f64).exp2()), 2.0);
        assert!((b - expect).abs() < 1e-12 * b);
    }

    #[test]
    fn triebel_against_sobolev_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sp = SpaceParams::triebel(0.0, 2.0, 2.0).unwrap();
        for _ in 0..50 {
            let u = random_band_limited(g64(), 31.0, &mut rng);
            let r = triebel_norm(&u, &sp).unwrap() / sobolev_norm(&fft_forward(&u), 0.0);
            assert!(r >= 1.0 / 2f64.sqrt() && r <= 2f64.sqrt(), "{r}");
        }
    }

    #[test]
    fn triebel_rejects_p_infinity_and_parse() {
        assert!(SpaceParams::triebel(0.0, f64::INFINITY, 2.0).is_err());
        let sp = SpaceParams::parse("F:s=0.5,p=2,q=1").unwrap();
        assert_eq!((sp.scale, sp.s, sp.p, sp.q), (Scale::TriebelLizorkin, 0.5, 2.0, 1.0));
        let sp = SpaceParams::parse("B:s=0,p=2,q=inf").unwrap();
        assert!(sp.q.is_infinite());
        assert_eq!(SpaceParams::parse("H:s=-1").unwrap().scale, Scale::Sobolev);
        assert!(SpaceParams::parse("X:s=1").is_err());
        assert!(SpaceParams::parse("F:s=1,p=inf").is_err());
    }

    #[test]
    fn sandwich_and_sobolev_embeddings() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let corpus: Vec<GridFunction> = (0..10)
            .map(|_| TrigPolynomial::random(1, 12, &mut rng).sample(g64()))
            .collect();
        let rep = embedding_report(&corpus, 0.5, 2.0, 1.0).unwrap();
        assert!(rep.lower <= 1.0 + 1e-12 && rep.upper <= 1.0 + 1e-12);
        let (zmin, zmax) = rep.zygmund.unwrap();
        assert!(zmin > 0.0 && zmax.is_finite());
        let eq = embedding_report(&corpus, 0.5, 2.0, 2.0).unwrap();
        assert!((eq.lower - 1.0).abs() < 1e-12 && (eq.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_maximal_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let corpus: Vec<Vec<GridFunction>> = (0..4).map(|_| random_ball_blocks(g64(), 4, 2.0, &mut rng)).collect();
        assert!(vector_maximal_check(&corpus, 2.0, 2.0, 0.4, 2.0).is_err());
        let fit = vector_maximal_check(&corpus, 2.0, 2.0, 1.0, 2.0).unwrap();
        assert!(fit.c >= 1.0 && fit.c.is_finite());
        let modes: Vec<Vec<GridFunction>> = vec![(0..3)
            .map(|_| fft_inverse(&SpectralFunction::mode(g64(), &[1])))
            .collect()];
        let fit = vector_maximal_check(&modes, 2.0, 2.0, 1.0, 2.0).unwrap();
        assert!((fit.c - 1.0).abs() < 1e-12);
        let bad = vec![vec![fft_inverse(&SpectralFunction::mode(g64(), &[9]))]];
        assert!(vector_maximal_check(&bad, 2.0, 2.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn summation_lemma_examples() {
        let mut delta = vec![0.0; 64];
        delta[0] = 1.0;
        let (l, r) = summation_sides(&delta, -1.0, 1.0);
        assert!((l / r - (2.0 - 2f64.powi(-63))).abs() < 1e-12);
        assert_eq!(summation_sides(&[0.0; 8], -1.0, 2.0), (0.0, 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = summation_corpus(200, 64, &mut rng);
        let b = random_sequences(1000, 64, &mut rng);
        for q in [0.5, 1.0, 2.0, f64::INFINITY] {
            let fit = summation_lemma_check(-0.5, q, &a, &b).unwrap();
            assert_eq!(fit.violations, 0, "{fit:?}");
            assert!(fit.c <= fit.reference * (1.0 + 1e-12), "{fit:?}");
        }
        assert!(summation_lemma_check(0.0, 1.0, &a, &b).is_err());
    }

    #[test]
    fn corona_series_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = random_band_limited(g64(), 31.0, &mut rng);
        let frame = LpFrame::standard();
        let blocks: Vec<GridFunction> = (0..=frame.covering_index(&g64()))
            .map(|j| block_project(&u, &frame, j, BlockKind::Corona))
            .collect();
        let sp = SpaceParams::triebel(0.5, 2.0, 2.0).unwrap();
        let rep = corona_series_sum(&blocks, SeriesMode::Corona, 4.0, 0.5, &sp).unwrap();
        assert!(rep.sum.unwrap().max_abs_diff(&u) < 1e-12);
        assert!((rep.norm - triebel_norm(&u, &sp).unwrap()).abs() < 1e-12);
        let wrong = corona_series_sum(&blocks, SeriesMode::Corona, 1.0, 0.5, &sp);
        assert!(wrong.is_err());
    }

    #[test]
    fn frame_equivalence_is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let corpus: Vec<GridFunction> = (0..10).map(|_| random_band_limited(g64(), 31.0, &mut rng)).collect();
        let other = LpFrame::new(ModulationFunction::with_profile(0.8, 1.6, Profile::Septic).unwrap(), 3).unwrap();
        let sp = SpaceParams::besov(0.5, 2.0, 2.0).unwrap();
        let eq = frame_equivalence(&corpus, &sp, &other).unwrap();
        assert!(eq.min > 0.0 && eq.spread.is_finite() && eq.spread < 4.0);
    }
}
