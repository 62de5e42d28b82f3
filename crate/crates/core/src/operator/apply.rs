use num_complex::Complex64;

use super::engine::{fold_spectrum, Bilinear};
use crate::error::{PdError, Result};
use crate::grid::{fft_forward, fft_inverse, roots_of_unity, GridFunction, GridSpec, SpectralFunction};
use crate::symbol::{ElementarySymbol, Symbol, SymbolRef, SymbolTable};

/// Largest `N^n` accepted by [`apply_direct`].
pub const DIRECT_LIMIT: usize = 16384;

fn shape(a: &dyn Symbol, spec: &GridSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(PdError::ShapeMismatch(format!(
            "symbol dimension {} vs grid dimension {}",
            a.dim(),
            spec.dim()
        )));
    }
    Ok(())
}

/// `Σ_η a(x, η) c_η e^{ix·η}` by direct summation over the lattice.
pub fn apply_direct(a: &dyn Symbol, u: &GridFunction) -> Result<GridFunction> {
    let spec = u.spec();
    shape(a, &spec)?;
    if spec.len() > DIRECT_LIMIT {
        return Err(PdError::SizeGuard {
            what: "direct apply",
            size: spec.len(),
            limit: DIRECT_LIMIT,
        });
    }
    let c = fft_forward(u);
    let roots = roots_of_unity(spec.points());
    let len = spec.len();
    let zero = || vec![Complex64::new(0.0, 0.0); len];
    let out = crate::ordered_fold(len, zero, |mut acc, e| {
            if c.coeffs()[e].norm_sqr() == 0.0 {
                return acc;
            }
            let col = a.column(&spec, &spec.frequency_vec(e));
            let ce = c.coeffs()[e];
            for (x, v) in acc.iter_mut().enumerate() {
                *v += col[x] * ce * roots[spec.phase_index(x, e)];
            }
            acc
        }, add_vecs);
    Ok(GridFunction::from_raw(spec, out))
}

/// [`apply_direct`] for a tabulated symbol.
pub fn apply_table(t: &SymbolTable, u: &GridFunction) -> Result<GridFunction> {
    if t.spec() != u.spec() {
        return Err(PdError::ShapeMismatch("table and input grids differ".into()));
    }
    apply_direct(t, u)
}

/// `Σ_t m_t(x)·[μ_t(D)u](x)` for a symbol with separable form.
pub fn apply_separable(a: &dyn Symbol, u: &GridFunction) -> Result<GridFunction> {
    let spec = u.spec();
    shape(a, &spec)?;
    let terms = a
        .separable_terms()
        .ok_or_else(|| PdError::Precondition(format!("{} has no separable form", a.describe())))?;
    let c = fft_forward(u);
    let len = spec.len();
    let zero = || vec![Complex64::new(0.0, 0.0); len];
    let out = crate::ordered_fold(terms, zero, |mut acc, t| {
            let (mx, mu) = a.separable_term(&spec, t);
            if mu.iter().all(|v| v.norm_sqr() == 0.0) {
                return acc;
            }
            let coeffs: Vec<Complex64> = c.coeffs().iter().zip(&mu).map(|(a, b)| a * b).collect();
            let v = fft_inverse(&SpectralFunction::from_raw(spec, coeffs));
            acc.iter_mut()
                .zip(mx.iter().zip(v.values()))
                .for_each(|(o, (m, w))| *o += m * w);
            acc
        }, add_vecs);
    Ok(GridFunction::from_raw(spec, out))
}

/// `Σ_j m_j·Φ_j(D)u`.
pub fn apply_fast_elementary(a: &ElementarySymbol, u: &GridFunction) -> Result<GridFunction> {
    apply_separable(a, u)
}

/// `a(x, D)u`: the separable fast path when available, otherwise direct
/// summation.
pub fn apply(a: &dyn Symbol, u: &GridFunction) -> Result<GridFunction> {
    if a.separable_terms().is_some() {
        apply_separable(a, u)
    } else {
        apply_direct(a, u)
    }
}

/// Unaliased spectrum of `a(x, D)u` on the grid with `2N` points per axis.
pub fn output_spectrum(a: SymbolRef, u: &GridFunction) -> Result<SpectralFunction> {
    let b = Bilinear::new(a, u)?;
    Ok(b.spectrum(&|_| 1.0, &|_| 1.0))
}

/// Grid values from an unaliased output spectrum.
pub fn values_from_spectrum(big: &SpectralFunction, spec: GridSpec) -> GridFunction {
    fft_inverse(&fold_spectrum(big, spec))
}

fn add_vecs(mut p: Vec<Complex64>, q: Vec<Complex64>) -> Vec<Complex64> {
    p.iter_mut().zip(&q).for_each(|(x, y)| *x += y);
    p
}
