//! Peetre–Fefferman–Stein maximal functions, symbol factors and the
//! pointwise estimates built from them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, PdError, Result};
use crate::frame::{norm, ModulationFunction};
use crate::grid::{fft_forward, fft_in_place, lp_norm_of, GridFunction, GridSpec};
use crate::operator::{apply, Bilinear};
use crate::symbol::{derivative_column, least_squares_slope};
use crate::symbol::{x_highpass_symbol, FnSymbol, Symbol, SymbolRef};

/// Exponent `N` and spectral radius `R` of `u*(N, R; x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximalParams {
    pub n_exp: f64,
    pub r_spec: f64,
}

impl MaximalParams {
    pub fn new(n_exp: f64, r_spec: f64) -> Result<Self> {
        if !(n_exp > 0.0) || !(r_spec > 0.0) {
            return Err(invalid(format!(
                "maximal parameters need N > 0 and R > 0, got N={n_exp}, R={r_spec}"
            )));
        }
        Ok(Self { n_exp, r_spec })
    }

    /// `N = ⌊n/2⌋ + 1`.
    pub fn default_exponent(dim: usize) -> f64 {
        (dim / 2 + 1) as f64
    }

    fn weight(&self, y: f64) -> f64 {
        (1.0 + self.r_spec * y).powf(self.n_exp)
    }
}

/// `u*(x) = max_y |u(x-y)|/(1+R|y|)^N` over grid offsets `y` (torus
/// representative in `[-π, π)^n`).
pub fn peetre_maximal(u: &GridFunction, p: &MaximalParams) -> GridFunction {
    let spec = u.spec();
    let len = spec.len();
    let inv_w: Vec<f64> = (0..len).map(|y| 1.0 / p.weight(spec.torus_norm(y))).collect();
    let moduli: Vec<f64> = u.values().iter().map(|v| v.norm()).collect();
    let out = (0..len)
        .into_par_iter()
        .map(|x| {
            let mut best: f64 = 0.0;
            for (y, w) in inv_w.iter().enumerate() {
                let m = moduli[spec.sub_index(x, y)];
                best = best.max(m * w);
            }
            Complex64::new(best, 0.0)
        })
        .collect();
    GridFunction::new(spec, out).expect("finite")
}

/// `F_a(x) = (2π/N)^n Σ_y (1+R|y|)^N |k_x(y)|` with
/// `k_x(y) = (2π)^{-n} Σ_η a(x,η)χ(η)e^{iy·η}`.
pub fn symbol_factor(
    a: &dyn Symbol,
    p: &MaximalParams,
    chi: &(dyn Fn(&[f64]) -> f64 + Sync),
    spec: GridSpec,
) -> Result<Vec<f64>> {
    let len = spec.len();
    let active: Vec<(usize, f64)> = (0..len)
        .map(|e| (e, chi(&spec.frequency_vec(e))))
        .filter(|&(_, c)| c != 0.0)
        .collect();
    if active.len() * len > 1 << 25 {
        return Err(PdError::SizeGuard {
            what: "symbol factor",
            size: active.len() * len,
            limit: 1 << 25,
        });
    }
    let cols: Vec<Vec<Complex64>> = active
        .par_iter()
        .map(|&(e, c)| {
            a.column(&spec, &spec.frequency_vec(e))
                .into_iter()
                .map(|v| v * c)
                .collect()
        })
        .collect();
    let weights: Vec<f64> = (0..len).map(|y| p.weight(spec.torus_norm(y))).collect();
    let scale = spec.cell_volume() / (2.0 * PI).powi(spec.dim() as i32);
    Ok((0..len)
        .into_par_iter()
        .map(|x| {
            let mut g = vec![Complex64::new(0.0, 0.0); len];
            for ((e, _), col) in active.iter().zip(&cols) {
                g[*e] = col[x];
            }
            fft_in_place(spec, &mut g, true);
            g.iter().zip(&weights).map(|(k, w)| k.norm() * w).sum::<f64>() * scale
        })
        .collect())
}

/// Pointwise comparison `|a(x,D)u(x)|` against `F_a(x)·u*(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub params: MaximalParams,
    pub max_ratio: f64,
    pub violations: usize,
    /// `(x index, lhs, rhs, ratio)`.
    pub rows: Vec<(usize, f64, f64, f64)>,
}

/// Checks `|a(x,D)u(x)| <= F_a(x)u*(x)` at every grid point. The spectrum
/// of `u` must lie where `χ = 1` and inside the ball of radius `R`.
pub fn factorization_check(
    a: &dyn Symbol,
    u: &GridFunction,
    p: &MaximalParams,
    chi: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Result<FactorizationReport> {
    let spec = u.spec();
    let c = fft_forward(u);
    let top = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (i, v) in c.coeffs().iter().enumerate() {
        if v.norm() > 1e-13 * top {
            let eta = spec.frequency_vec(i);
            if chi(&eta) != 1.0 {
                return Err(PdError::Precondition(format!(
                    "spectrum of u reaches {eta:?} where the cutoff is not 1"
                )));
            }
            if norm(&eta) > p.r_spec {
                return Err(PdError::Precondition(format!(
                    "spectrum of u reaches {eta:?} outside the ball of radius {}",
                    p.r_spec
                )));
            }
        }
    }
    let lhs = apply(a, u)?;
    let f = symbol_factor(a, p, chi, spec)?;
    let star = peetre_maximal(u, p);
    let mut rows = Vec::with_capacity(spec.len());
    let mut max_ratio: f64 = 0.0;
    let mut violations = 0;
    for x in 0..spec.len() {
        let l = lhs.values()[x].norm();
        let r = f[x] * star.values()[x].re;
        let ratio = if r > 0.0 {
            l / r
        } else if l > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > 1.0 + 1e-8 {
            violations += 1;
        }
        max_ratio = max_ratio.max(ratio);
        rows.push((x, l, r, ratio));
    }
    Ok(FactorizationReport {
        params: *p,
        max_ratio,
        violations,
        rows,
    })
}

/// Largest frequency norm carrying a nonzero coefficient (at least 1).
pub fn spectral_radius(u: &GridFunction) -> f64 {
    let c = fft_forward(u);
    let spec = u.spec();
    let top = c.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
    c.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > 1e-13 * top)
        .map(|(i, _)| spec.frequency_norm(i))
        .fold(1.0, f64::max)
}

/// `‖u*‖_p/‖u‖_p` for each member, with `R` the spectral radius of the
/// member. No hypothesis on `N` is enforced.
pub fn maximal_lp_ratios(corpus: &[GridFunction], p_exp: f64, n_exp: f64) -> Result<Vec<f64>> {
    corpus
        .par_iter()
        .map(|u| {
            let params = MaximalParams::new(n_exp, spectral_radius(u))?;
            let star = peetre_maximal(u, &params);
            let num = lp_norm_of(u.spec(), star.values().iter().map(|v| v.re), p_exp)?;
            let den = lp_norm_of(u.spec(), u.values().iter().map(|v| v.norm()), p_exp)?;
            Ok(num / den)
        })
        .collect()
}

/// `max ‖u*‖_p/‖u‖_p` over the corpus; requires `N > n/p`.
pub fn maximal_lp_constant(corpus: &[GridFunction], p_exp: f64, n_exp: f64) -> Result<f64> {
    let dim = corpus.first().map_or(1, |u| u.spec().dim());
    if !(n_exp > dim as f64 / p_exp) {
        return Err(invalid(format!(
            "maximal inequality needs N > n/p, got N={n_exp}, n/p={}",
            dim as f64 / p_exp
        )));
    }
    Ok(maximal_lp_ratios(corpus, p_exp, n_exp)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Two-grid evaluation of [`maximal_lp_constant`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalStability {
    pub p: f64,
    pub n_exp: f64,
    pub points: Vec<usize>,
    pub constants: Vec<f64>,
    /// `max/min` of the constants.
    pub spread: f64,
    pub stable: bool,
}

/// Evaluates the fitted constant on each corpus (one per grid) and flags the
/// fit stable when the spread is at most `slack`.
pub fn maximal_lp_stability(
    corpora: &[Vec<GridFunction>],
    p_exp: f64,
    n_exp: f64,
    slack: f64,
    enforce_hypothesis: bool,
) -> Result<MaximalStability> {
    let constants: Vec<f64> = corpora
        .iter()
        .map(|c| {
            if enforce_hypothesis {
                maximal_lp_constant(c, p_exp, n_exp)
            } else {
                Ok(maximal_lp_ratios(c, p_exp, n_exp)?.into_iter().fold(0.0, f64::max))
            }
        })
        .collect::<Result<_>>()?;
    let hi = constants.iter().cloned().fold(0.0, f64::max);
    let lo = constants.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = hi / lo;
    Ok(MaximalStability {
        p: p_exp,
        n_exp,
        points: corpora.iter().map(|c| c[0].spec().points()).collect(),
        constants,
        spread,
        stable: spread <= slack,
    })
}

/// `k`: the least integer with `k > N + n/2`.
pub fn mihlin_order(n_exp: f64, dim: usize) -> usize {
    let t = n_exp + dim as f64 / 2.0;
    t.floor() as usize + 1
}

/// Both sides of the Mihlin-type bound at every grid point: `F_a(x)` with
/// `χ = ψ(·/R)`, and `Σ_{|α|<=k}(Σ_{η∈R supp ψ}|R^{|α|}D^α_η a(x,η)|²/R^n)^{1/2}`.
pub fn mihlin_sides(
    a: &dyn Symbol,
    p: &MaximalParams,
    psi: &ModulationFunction,
    spec: GridSpec,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let dim = spec.dim();
    let k = mihlin_order(p.n_exp, dim);
    if k > 4 {
        return Err(invalid(format!("derivative order {k} exceeds the budget of 4")));
    }
    let r = p.r_spec;
    let psi_c = *psi;
    let lhs = symbol_factor(a, p, &move |eta| psi_c.radial(norm(eta) / r), spec)?;
    let mut alphas = Vec::new();
    for a0 in 0..=k {
        for a1 in 0..=(if dim == 2 { k - a0 } else { 0 }) {
            alphas.push([a0, a1]);
        }
    }
    let etas: Vec<usize> = (0..spec.len())
        .filter(|&e| spec.frequency_norm(e) < r * psi.outer())
        .collect();
    let len = spec.len();
    let mut rhs = vec![0.0; len];
    for alpha in alphas {
        let la = (alpha[0] + alpha[1]) as i32;
        let sums = crate::ordered_fold(
            etas.len(),
            || Ok(vec![0.0; len]),
            |acc: Result<Vec<f64>>, i| {
                let mut acc = acc?;
                let col = derivative_column(a, &spec, &spec.frequency_vec(etas[i]), alpha, [0, 0])?;
                acc.iter_mut().zip(&col).for_each(|(p, v)| *p += v.norm_sqr());
                Ok(acc)
            },
            |x, y| {
                let (mut x, y) = (x?, y?);
                x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                Ok(x)
            },
        )?;
        let f = r.powi(la);
        for (o, s) in rhs.iter_mut().zip(sums) {
            *o += f * (s / r.powi(dim as i32)).sqrt();
        }
    }
    Ok((lhs, rhs))
}

/// Fit-on-A / verify-on-B result for the Mihlin-type bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MihlinReport {
    pub k: usize,
    pub c_fit: f64,
    /// Max of `lhs/(c_fit·rhs) - 1` over corpus B (positive means violation).
    pub worst_excess: f64,
    pub holds: bool,
}

/// Fits `c` with `F_a <= c·RHS` on corpus A and checks corpus B within 1%.
pub fn mihlin_bound_check(
    corpus_a: &[SymbolRef],
    corpus_b: &[SymbolRef],
    p: &MaximalParams,
    psi: &ModulationFunction,
    spec: GridSpec,
) -> Result<MihlinReport> {
    let ratio = |a: &SymbolRef| -> Result<f64> {
        let (l, r) = mihlin_sides(a.as_ref(), p, psi, spec)?;
        Ok(l.iter()
            .zip(&r)
            .map(|(l, r)| if *r > 0.0 { l / r } else if *l > 0.0 { f64::INFINITY } else { 0.0 })
            .fold(0.0, f64::max))
    };
    let mut c_fit: f64 = 0.0;
    for a in corpus_a {
        c_fit = c_fit.max(ratio(a)?);
    }
    let mut worst = f64::NEG_INFINITY;
    for b in corpus_b {
        worst = worst.max(ratio(b)? / c_fit - 1.0);
    }
    Ok(MihlinReport {
        k: mihlin_order(p.n_exp, spec.dim()),
        c_fit,
        worst_excess: worst,
        holds: worst <= 0.01,
    })
}

/// Exponent fit of `log sup_x F(R)` against `log R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    /// `(parameter, value)`.
    pub points: Vec<(f64, f64)>,
    pub exponent: f64,
    /// First parameter from which the values vanish identically.
    pub vanishes_from: Option<f64>,
}

fn fit_exponent(points: Vec<(f64, f64)>) -> ExponentFit {
    let pos: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let vanishes_from = points
        .iter()
        .rev()
        .take_while(|p| p.1 == 0.0)
        .last()
        .map(|p| p.0);
    let exponent = if pos.len() >= 2 {
        least_squares_slope(&pos)
    } else {
        f64::NEG_INFINITY
    };
    ExponentFit {
        points,
        exponent,
        vanishes_from,
    }
}

/// `sup_x F_a(N, R; x)` over dyadic `R` with the corona cutoff
/// `χ = ψ(·/R) - ψ(2·/R)`; the exponent should be close to the order `d`.
pub fn symbol_factor_growth(
    a: &dyn Symbol,
    n_exp: f64,
    radii: &[f64],
    psi: &ModulationFunction,
    spec: GridSpec,
) -> Result<ExponentFit> {
    let mut pts = Vec::new();
    for &r in radii {
        let p = MaximalParams::new(n_exp, r)?;
        let psi_c = *psi;
        let f = symbol_factor(a, &p, &move |eta| psi_c.corona(norm(eta) / r), spec)?;
        pts.push((r, f.into_iter().fold(0.0, f64::max)));
    }
    Ok(fit_exponent(pts))
}

/// Decay of `sup_x F_{a_Q}` along dyadic `Q` for `a_Q = (1-ψ)(Q^{-1}D_x)a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDecay {
    pub fit: ExponentFit,
    pub m: f64,
    /// Superpolynomial decay (exact vanishing) or exponent `<= -M + 0.5`.
    pub holds: bool,
}

pub fn moment_decay_check(
    a: SymbolRef,
    phi: &ModulationFunction,
    qs: &[f64],
    m: f64,
    p: &MaximalParams,
    spec: GridSpec,
) -> Result<MomentDecay> {
    let mut pts = Vec::new();
    let r = p.r_spec;
    let psi_c = *phi;
    for &q in qs {
        let aq = x_highpass_symbol(a.clone(), q, *phi, spec);
        let f = symbol_factor(&aq, p, &move |eta| psi_c.radial(norm(eta) / r), spec)?;
        let top = f.into_iter().fold(0.0, f64::max);
        pts.push((q, if top < 1e-13 { 0.0 } else { top }));
    }
    let fit = fit_exponent(pts);
    let holds = fit.vanishes_from.is_some() || fit.exponent <= -m + 0.5;
    Ok(MomentDecay { fit, m, holds })
}

/// Growth of `sup_x |OP(Φ(2^{-k}D_x)a(x,η)Ψ(2^{-k}η))v|` along `k`, as a
/// base-2 exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffGrowth {
    /// `(k, sup)`.
    pub points: Vec<(f64, f64)>,
    pub exponent: f64,
    pub predicted: f64,
    pub within_bound: bool,
}

pub fn cutoff_growth(
    a: SymbolRef,
    v: &GridFunction,
    big_phi: &ModulationFunction,
    big_psi: &ModulationFunction,
    ks: &[u32],
    order_v: f64,
) -> Result<CutoffGrowth> {
    let engine = Bilinear::new(a.clone(), v)?;
    let mut pts = Vec::new();
    for &k in ks {
        let s = f64::from(k);
        let (f, g) = (*big_phi, *big_psi);
        let y = engine.values(&move |xi| f.dilated(s, xi), &move |eta| g.dilated(s, eta));
        pts.push((s, y.sup_norm()));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|p| (p.0, p.1.log2())).collect();
    let exponent = least_squares_slope(&logs);
    let predicted = (order_v + a.order()).max(0.0);
    Ok(CutoffGrowth {
        points: pts,
        exponent,
        predicted,
        within_bound: exponent <= predicted + 0.5,
    })
}

/// `a(x, η) = 1` as a shared symbol.
pub fn unit_symbol(dim: usize) -> SymbolRef {
    std::sync::Arc::new(FnSymbol::identity(dim))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_band_limited, random_elementary_symbol, random_grid_function, TrigPolynomial};
    use crate::frame::LpFrame;
    use crate::grid::{fft_inverse, SpectralFunction};
    use crate::symbol::ChingSymbol;
    use crate::symbol::RadialBump;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn maximal_function_basics() {
        let g = GridSpec::one_d(64).unwrap();
        let p = MaximalParams::new(1.0, 4.0).unwrap();
        let one = GridFunction::from_fn(g, |_| Complex64::new(1.0, 0.0));
        let s = peetre_maximal(&one, &p);
        assert!(s.values().iter().all(|v| (v.re - 1.0).abs() < 1e-15));
        let mode = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[0]));
        let s = peetre_maximal(&mode, &p);
        assert!(s.values().iter().all(|v| (v.re - 1.0).abs() < 1e-12));
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let u = random_grid_function(g, &mut rng);
        let s = peetre_maximal(&u, &p);
        for (a, b) in s.values().iter().zip(u.values()) {
            assert!(a.re >= b.norm());
        }
    }

    #[test]
    fn symbol_factor_of_identity_is_constant() {
        let g = GridSpec::one_d(64).unwrap();
        let p = MaximalParams::new(1.0, 8.0).unwrap();
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        let chi = move |eta: &[f64]| psi.radial(norm(eta) / 4.0);
        let f = symbol_factor(&FnSymbol::identity(1), &p, &chi, g).unwrap();
        for v in &f {
            assert!((v - f[0]).abs() < 1e-12 * f[0]);
        }
        assert!(f[0] >= 1.0);
    }

    #[test]
    fn symbol_factor_subadditive() {
        let g = GridSpec::one_d(32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let frame = LpFrame::standard();
        let a = random_elementary_symbol(g, &frame, 5, &mut rng);
        let b = random_elementary_symbol(g, &frame, 5, &mut rng);
        let (ac, bc) = (a.clone(), b.clone());
        let sum = FnSymbol::new(1, 0.0, "a+b", move |x, eta| ac.eval(x, eta) + bc.eval(x, eta));
        let p = MaximalParams::new(1.0, 8.0).unwrap();
        let chi = |eta: &[f64]| if norm(eta) <= 8.0 { 1.0 } else { 0.0 };
        let fa = symbol_factor(&a, &p, &chi, g).unwrap();
        let fb = symbol_factor(&b, &p, &chi, g).unwrap();
        let fs = symbol_factor(&sum, &p, &chi, g).unwrap();
        for i in 0..g.len() {
            assert!(fs[i] <= fa[i] + fb[i] + 1e-12);
        }
    }

    #[test]
    fn factorization_holds_and_checks_preconditions() {
        let g = GridSpec::one_d(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let frame = LpFrame::standard();
        let a = random_elementary_symbol(g, &frame, 6, &mut rng);
        let u = random_band_limited(g, 6.0, &mut rng);
        let p = MaximalParams::new(1.0, 6.0).unwrap();
        let psi = ModulationFunction::new(6.0, 12.0).unwrap();
        let chi = move |eta: &[f64]| psi.eval(eta);
        let rep = factorization_check(&a, &u, &p, &chi).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.max_ratio <= 1.0 + 1e-8);
        let narrow = |eta: &[f64]| if norm(eta) <= 2.0 { 1.0 } else { 0.0 };
        assert!(factorization_check(&a, &u, &p, &narrow).is_err());
    }

    #[test]
    fn maximal_constant_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let g = GridSpec::one_d(64).unwrap();
        let corpus: Vec<GridFunction> = (0..5)
            .map(|_| TrigPolynomial::random(1, 4, &mut rng).sample(g))
            .collect();
        assert!(maximal_lp_constant(&corpus, 2.0, 0.4).is_err());
        let c1 = maximal_lp_constant(&corpus, 2.0, 1.0).unwrap();
        let c2 = maximal_lp_constant(&corpus, 2.0, 2.0).unwrap();
        assert!(c1 >= c2 && c2 >= 1.0);
        let mode = vec![fft_inverse(&SpectralFunction::mode(g, &[3]))];
        assert!((maximal_lp_constant(&mode, f64::INFINITY, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corona_growth_exponent_matches_order() {
        let g = GridSpec::one_d(256).unwrap();
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        let a = FnSymbol::bessel(1, 1.0);
        let fit = symbol_factor_growth(&a, 1.0, &[4.0, 8.0, 16.0, 32.0], &psi, g).unwrap();
        assert!((fit.exponent - 1.0).abs() <= 0.3, "{fit:?}");
    }

    #[test]
    fn moment_decay_for_ching() {
        let g = GridSpec::one_d(128).unwrap();
        let a: SymbolRef = Arc::new(ChingSymbol::new(0.0, &[1], RadialBump::standard(), 5).unwrap());
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        let p = MaximalParams::new(1.0, 16.0).unwrap();
        let rep = moment_decay_check(a, &psi, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0], 2.0, &p, g).unwrap();
        assert!(rep.holds, "{rep:?}");
        let x_indep = moment_decay_check(unit_symbol(1), &psi, &[1.0, 2.0], 2.0, &p, g).unwrap();
        assert_eq!(x_indep.fit.vanishes_from, Some(1.0));
    }

    #[test]
    fn cutoff_growth_rate() {
        let g = GridSpec::one_d(512).unwrap();
        let delta = fft_inverse(&SpectralFunction::from_raw(g, vec![Complex64::new(1.0, 0.0); 512]));
        let phi = ModulationFunction::new(1.0, 2.0).unwrap();
        for d in [0.0, 1.0] {
            let a: SymbolRef = Arc::new(FnSymbol::bessel(1, d));
            let rep = cutoff_growth(a, &delta, &phi, &phi, &[2, 3, 4, 5, 6], 1.0).unwrap();
            assert!((rep.exponent - rep.predicted).abs() <= 0.5, "{rep:?}");
        }
    }
}
