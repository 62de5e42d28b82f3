use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{localize_symbol, MultiIndex, Symbol, SymbolRef};
use crate::error::{invalid, PdError, Result};
use crate::frame::norm;
use crate::grid::{fft_in_place, GridSpec};

/// Step used for derivatives in `η`.
pub const ETA_STEP: f64 = 0.5;

/// Lattice cells kept clear of the Nyquist boundary when sampling `η`.
pub const NYQUIST_MARGIN: i64 = 2;

/// Central-difference stencil `(offset, weight)` for the `k`-th derivative
/// with unit step, `k <= 4`.
pub fn finite_difference_stencil(k: usize) -> Result<Vec<(i64, f64)>> {
    Ok(match k {
        0 => vec![(0, 1.0)],
        1 => vec![(-1, -0.5), (1, 0.5)],
        2 => vec![(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => vec![(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => vec![(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => return Err(invalid(format!("derivative order {k} exceeds the budget of 4"))),
    })
}

fn stencil_product(alpha: &[usize]) -> Result<Vec<([i64; 2], f64)>> {
    let s0 = finite_difference_stencil(alpha[0])?;
    let s1 = if alpha.len() > 1 {
        finite_difference_stencil(alpha[1])?
    } else {
        vec![(0, 1.0)]
    };
    let mut out = Vec::new();
    for &(o0, w0) in &s0 {
        for &(o1, w1) in &s1 {
            out.push(([o0, o1], w0 * w1));
        }
    }
    Ok(out)
}

fn d_factor(order: usize) -> Complex64 {
    // D = -i∂
    Complex64::new(0.0, -1.0).powu(order as u32)
}

/// `D^α_η D^β_x a(·, η)` at every grid point, by central differences
/// (`η`-step 0.5, `x`-step one grid cell).
pub fn derivative_column(
    a: &dyn Symbol,
    grid: &GridSpec,
    eta: &[f64],
    alpha: MultiIndex,
    beta: MultiIndex,
) -> Result<Vec<Complex64>> {
    let n = grid.dim();
    let (al, be) = (&alpha[..n], &beta[..n]);
    let la: usize = al.iter().sum();
    let lb: usize = be.iter().sum();
    if la + lb > 4 {
        return Err(invalid("derivative budget |α|+|β| <= 4 exceeded"));
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (off, w) in stencil_product(al)? {
        let mut e = [0.0; 2];
        for k in 0..n {
            e[k] = eta[k] + off[k] as f64 * ETA_STEP;
        }
        let col = a.column(grid, &e[..n]);
        acc.iter_mut().zip(col).for_each(|(s, c)| *s += c * w);
    }
    if lb > 0 {
        let np = grid.points() as i64;
        let src = acc.clone();
        acc.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (off, w) in stencil_product(be)? {
            for (i, v) in acc.iter_mut().enumerate() {
                let j = if n == 1 {
                    (i as i64 + off[0]).rem_euclid(np) as usize
                } else {
                    let (r, c) = ((i as i64) / np, (i as i64) % np);
                    ((r + off[0]).rem_euclid(np) * np + (c + off[1]).rem_euclid(np)) as usize
                };
                *v += src[j] * w;
            }
        }
    }
    let scale = d_factor(la + lb) / (ETA_STEP.powi(la as i32) * grid.spacing().powi(lb as i32));
    acc.iter_mut().for_each(|v| *v *= scale);
    Ok(acc)
}

/// Lattice frequencies kept for sampling: at least `margin` cells inside the
/// Nyquist box.
fn sample_frequencies(grid: &GridSpec, margin: i64, cap: usize) -> Vec<usize> {
    let ny = grid.nyquist();
    let keep: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            grid.frequency(i)[..grid.dim()]
                .iter()
                .all(|&k| k.abs() <= ny - margin)
        })
        .collect();
    let stride = keep.len().div_ceil(cap).max(1);
    keep.into_iter().step_by(stride).collect()
}

/// `sup |D^α_η D^β_x a| / (1+|η|)^{d-|α|+|β|}` over grid points and lattice
/// `η` away from the Nyquist boundary.
pub fn symbol_seminorm(
    a: &dyn Symbol,
    alpha: MultiIndex,
    beta: MultiIndex,
    grid: &GridSpec,
) -> Result<f64> {
    let n = grid.dim();
    let la: usize = alpha[..n].iter().sum();
    let lb: usize = beta[..n].iter().sum();
    let margin = NYQUIST_MARGIN + 2;
    let exp = a.order() - la as f64 + lb as f64;
    let etas = sample_frequencies(grid, margin, 4096);
    let sups: Result<Vec<f64>> = etas
        .par_iter()
        .map(|&e| {
            let eta = grid.frequency_vec(e);
            let col = derivative_column(a, grid, &eta, alpha, beta)?;
            let w = (1.0 + norm(&eta)).powf(exp);
            Ok(col.iter().map(|v| v.norm()).fold(0.0, f64::max) / w)
        })
        .collect();
    Ok(sups?.into_iter().fold(0.0, f64::max))
}

/// Outcome of a twisted diagonal test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TdcReport {
    pub b: f64,
    pub tau: f64,
    pub violation_mass: f64,
    pub total_mass: f64,
    pub relative: f64,
    pub holds: bool,
}

/// Squared mass of `â(ξ, η)` where `B(|ξ+η|+1) < |η|`, relative to the total.
pub fn check_twisted_diagonal(a: &dyn Symbol, b: f64, tau: f64, grid: &GridSpec) -> Result<TdcReport> {
    if !(b >= 1.0) {
        return Err(invalid(format!("B must be >= 1, got {b}")));
    }
    let n = grid.dim();
    let (bad, all) = (0..grid.len())
        .into_par_iter()
        .map(|e| {
            let eta = grid.frequency_vec(e);
            let mut col = a.column(grid, &eta);
            fft_in_place(*grid, &mut col, false);
            let s = 1.0 / grid.len() as f64;
            let en = norm(&eta);
            let mut bad = 0.0;
            let mut all = 0.0;
            for (k, v) in col.iter().enumerate() {
                let m = (v * s).norm_sqr();
                if m == 0.0 {
                    continue;
                }
                all += m;
                let f = grid.frequency(k);
                let mut sum = [0.0; 2];
                for c in 0..n {
                    sum[c] = f[c] as f64 + eta[c];
                }
                if b * (norm(&sum[..n]) + 1.0) < en {
                    bad += m;
                }
            }
            (bad, all)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let relative = if all > 0.0 { bad / all } else { 0.0 };
    Ok(TdcReport {
        b,
        tau,
        violation_mass: bad,
        total_mass: all,
        relative,
        holds: relative <= tau,
    })
}

/// Squared mass of `b̂(ξ, η)` where `|ξ+η| > B(|η|+1)`, relative to the
/// total: the support shape of the adjoint of a symbol satisfying the
/// twisted diagonal condition with constant `B`.
pub fn check_adjoint_support(b_sym: &dyn Symbol, b: f64, tau: f64, grid: &GridSpec) -> Result<TdcReport> {
    if !(b >= 1.0) {
        return Err(invalid(format!("B must be >= 1, got {b}")));
    }
    let n = grid.dim();
    let parts: Vec<(f64, f64)> = (0..grid.len())
        .into_par_iter()
        .map(|e| {
            let eta = grid.frequency_vec(e);
            let mut col = b_sym.column(grid, &eta);
            fft_in_place(*grid, &mut col, false);
            let s = 1.0 / grid.len() as f64;
            let bound = b * (norm(&eta) + 1.0);
            let (mut bad, mut all) = (0.0, 0.0);
            for (k, v) in col.iter().enumerate() {
                let m = (v * s).norm_sqr();
                if m == 0.0 {
                    continue;
                }
                all += m;
                let f = grid.frequency(k);
                let mut sum = [0.0; 2];
                for c in 0..n {
                    sum[c] = f[c] as f64 + eta[c];
                }
                if norm(&sum[..n]) > bound {
                    bad += m;
                }
            }
            (bad, all)
        })
        .collect();
    let (bad, all) = parts.into_iter().fold((0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let relative = if all > 0.0 { bad / all } else { 0.0 };
    Ok(TdcReport {
        b,
        tau,
        violation_mass: bad,
        total_mass: all,
        relative,
        holds: relative <= tau,
    })
}

/// Result of [`sigma_order_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaFit {
    pub alpha: MultiIndex,
    /// `(ε, value(ε))`.
    pub values: Vec<(f64, f64)>,
    /// Per `ε`, the shell values `(R, value)` whose sup gives `value(ε)`.
    pub shells: Vec<Vec<(f64, f64)>>,
    pub slope: f64,
    pub sigma_hat: f64,
}

/// Annulus values `R^{|α|-d}(Σ_{R<=|η|<2R} |D^α_η a_{χ,ε}|²/R^n)^{1/2}`, sup
/// over `x`, for dyadic `R` up to the Nyquist radius.
pub fn annulus_values(
    a: &SymbolRef,
    alpha: MultiIndex,
    eps: f64,
    grid: &GridSpec,
) -> Result<Vec<(f64, f64)>> {
    let n = grid.dim();
    let loc = localize_symbol(a.clone(), eps, *grid)?;
    let la: usize = alpha[..n].iter().sum();
    let top = (grid.nyquist() - NYQUIST_MARGIN - 2) as f64;
    let mut radii = Vec::new();
    let mut r = 1.0;
    while 2.0 * r <= top {
        radii.push(r);
        r *= 2.0;
    }
    let shells = radii.len();
    let len = grid.len();
    let etas: Vec<(usize, usize)> = (0..len)
        .filter_map(|e| {
            let en = grid.frequency_norm(e);
            radii
                .iter()
                .position(|&r| en >= r && en < 2.0 * r)
                .map(|s| (e, s))
        })
        .collect();
    let sums = crate::ordered_fold(
        etas.len(),
        || Ok(vec![0.0; shells * len]),
        |acc: Result<Vec<f64>>, i| {
            let mut acc = acc?;
            let (e, s) = etas[i];
            let col = derivative_column(&loc, grid, &grid.frequency_vec(e), alpha, [0, 0])?;
            for (x, v) in col.iter().enumerate() {
                acc[s * len + x] += v.norm_sqr();
            }
            Ok(acc)
        },
        |a, b| {
            let (mut a, b) = (a?, b?);
            a.iter_mut().zip(b).for_each(|(p, q)| *p += q);
            Ok(a)
        },
    )?;
    let d = a.order();
    Ok(radii
        .iter()
        .enumerate()
        .map(|(s, &r)| {
            let best = sums[s * len..(s + 1) * len].iter().cloned().fold(0.0, f64::max);
            let v = r.powf(la as f64 - d) * (best / r.powi(n as i32)).sqrt();
            (r, v)
        })
        .collect())
}

/// Fits `log value(ε)` against `log ε`; `σ̂ = slope - n/2 + |α|`.
pub fn sigma_order_estimate(
    a: &SymbolRef,
    alpha: MultiIndex,
    eps_grid: &[f64],
    grid: &GridSpec,
) -> Result<SigmaFit> {
    if eps_grid.len() < 2 {
        return Err(invalid("need at least two eps values"));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(invalid("eps values must lie in (0, 1)"));
    }
    let n = grid.dim();
    let la: usize = alpha[..n].iter().sum();
    let shells: Result<Vec<Vec<(f64, f64)>>> = eps_grid
        .par_iter()
        .map(|&e| annulus_values(a, alpha, e, grid))
        .collect();
    let shells = shells?;
    let values: Vec<(f64, f64)> = eps_grid
        .iter()
        .zip(&shells)
        .map(|(&e, s)| (e, s.iter().map(|p| p.1).fold(0.0, f64::max)))
        .collect();
    let pts: Vec<(f64, f64)> = values
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let (slope, sigma_hat) = if pts.is_empty() {
        (f64::INFINITY, f64::INFINITY)
    } else if pts.len() < 2 {
        return Err(PdError::Precondition(
            "only one eps value gives a nonzero localized symbol".into(),
        ));
    } else {
        let slope = least_squares_slope(&pts);
        (slope, slope - n as f64 / 2.0 + la as f64)
    };
    Ok(SigmaFit {
        alpha,
        values,
        shells,
        slope,
        sigma_hat,
    })
}

/// Slope of the least-squares line through `pts`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{ChingSymbol, FnSymbol, RadialBump};
    use std::sync::Arc;

    #[test]
    fn stencils_differentiate_polynomials() {
        for k in 0..=4usize {
            let st = finite_difference_stencil(k).unwrap();
            // k-th derivative of t^k / k! is 1
            let f = |t: f64| t.powi(k as i32) / (1..=k).product::<usize>().max(1) as f64;
            let v: f64 = st.iter().map(|&(o, w)| w * f(0.3 + o as f64)).sum();
            assert!((v - 1.0).abs() < 1e-9, "order {k}: {v}");
        }
        assert!(finite_difference_stencil(5).is_err());
    }

    #[test]
    fn seminorms_of_identity() {
        let g = GridSpec::one_d(32).unwrap();
        let a = FnSymbol::identity(1);
        assert!((symbol_seminorm(&a, [0, 0], [0, 0], &g).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(symbol_seminorm(&a, [1, 0], [0, 0], &g).unwrap(), 0.0);
        assert_eq!(symbol_seminorm(&a, [0, 0], [2, 0], &g).unwrap(), 0.0);
    }

    #[test]
    fn seminorm_of_modulated_bessel() {
        let g = GridSpec::one_d(64).unwrap();
        let d = 1.5;
        let a = FnSymbol::new(1, d, "mb", move |x, eta| {
            Complex64::from_polar((1.0 + eta[0] * eta[0]).powf(d / 2.0), x[0])
        });
        let p = symbol_seminorm(&a, [0, 0], [0, 0], &g).unwrap();
        // ((1+η²)/(1+|η|)²)^{d/2} is maximal (= 1) at η = 0
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn x_derivative_of_single_mode() {
        let g = GridSpec::one_d(128).unwrap();
        let a = FnSymbol::new(1, 0.0, "m", |x, _| Complex64::from_polar(1.0, 3.0 * x[0]));
        let col = derivative_column(&a, &g, &[0.0], [0, 0], [1, 0]).unwrap();
        // D_x e^{3ix} = 3e^{3ix}; central difference gives sin(3h)/h
        let h = g.spacing();
        let expect = (3.0 * h).sin() / h;
        for (i, v) in col.iter().enumerate() {
            let x = g.point(i)[0];
            assert!((v - Complex64::from_polar(expect, 3.0 * x)).norm() < 1e-12);
        }
    }

    #[test]
    fn ching_x_seminorms_are_finite() {
        let g = GridSpec::one_d(256).unwrap();
        let a = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 6).unwrap();
        let mut prev = 0.0;
        for b in 0..=2usize {
            let p = symbol_seminorm(&a, [0, 0], [b, 0], &g).unwrap();
            assert!(p.is_finite() && p > 0.0);
            assert!(p < 10.0, "beta={b}: {p}");
            prev = p.max(prev);
        }
        assert!(prev > 0.0);
    }

    #[test]
    fn twisted_diagonal_reports() {
        let g = GridSpec::one_d(128).unwrap();
        let mult = FnSymbol::bessel(1, 2.0);
        assert!(check_twisted_diagonal(&mult, 1.0, 1e-10, &g).unwrap().holds);
        let plain = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 5).unwrap();
        for b in [1.0, 2.0, 4.0] {
            let r = check_twisted_diagonal(&plain, b, 1e-10, &g).unwrap();
            assert!(!r.holds);
        }
        let doubled = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 4)
            .unwrap()
            .with_scale(2)
            .unwrap();
        let r = check_twisted_diagonal(&doubled, 2.0, 1e-10, &g).unwrap();
        assert!(r.holds && r.violation_mass == 0.0);
    }

    #[test]
    fn sigma_infinite_for_strict_tdc() {
        let g = GridSpec::one_d(256).unwrap();
        let a: SymbolRef = Arc::new(
            ChingSymbol::new(0.0, &[1], RadialBump::standard(), 5)
                .unwrap()
                .with_scale(2)
                .unwrap(),
        );
        let fit = sigma_order_estimate(&a, [0, 0], &[0.1, 0.2], &g).unwrap();
        assert!(fit.sigma_hat.is_infinite());
    }
}
