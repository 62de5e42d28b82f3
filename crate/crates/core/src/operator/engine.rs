use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{PdError, Result};
use crate::grid::{fft_forward, fft_in_place, fft_inverse, GridFunction, GridSpec, SpectralFunction};
use crate::symbol::SymbolRef;

/// Largest `N^n` for which per-`η` symbol columns are cached.
const CACHE_LIMIT: usize = 1 << 22;

/// Coefficients of `c` placed on the lattice of a finer grid.
pub fn embed_spectrum(c: &SpectralFunction, target: GridSpec) -> SpectralFunction {
    let spec = c.spec();
    let mut out = SpectralFunction::zeros(target);
    for (i, v) in c.coeffs().iter().enumerate() {
        if v.norm_sqr() != 0.0 {
            let f = spec.frequency(i);
            out.coeffs_mut()[target.frequency_index(&f[..spec.dim()])] += v;
        }
    }
    out
}

/// Aliases coefficients of a finer grid back onto `spec`.
pub fn fold_spectrum(big: &SpectralFunction, spec: GridSpec) -> SpectralFunction {
    let b = big.spec();
    let mut out = SpectralFunction::zeros(spec);
    for (i, v) in big.coeffs().iter().enumerate() {
        if v.norm_sqr() != 0.0 {
            let f = b.frequency(i);
            out.coeffs_mut()[spec.frequency_index(&f[..spec.dim()])] += v;
        }
    }
    out
}

enum Kind {
    Separable {
        /// `m̂_t` on the base lattice.
        xs: Vec<Vec<Complex64>>,
        /// `μ_t` on the base lattice.
        mus: Vec<Vec<Complex64>>,
    },
    Dense {
        symbol: SymbolRef,
        /// `(η index, â(·, η))` for the `η` where the input is nonzero.
        cache: Option<Vec<(usize, Vec<Complex64>)>>,
    },
}

/// Unaliased output spectra of `OP(F(D_x)a(x,η)G(η))u` for many filter
/// pairs `(F, G)` with a fixed symbol `a` and input `u`.
///
/// Output frequencies `ξ + η` are collected on the grid with twice as many
/// points per axis, where they never wrap.
pub struct Bilinear {
    spec: GridSpec,
    big: GridSpec,
    input: SpectralFunction,
    kind: Kind,
}

fn hat_column(a: &SymbolRef, spec: &GridSpec, e: usize) -> Vec<Complex64> {
    let mut col = a.column(spec, &spec.frequency_vec(e));
    fft_in_place(*spec, &mut col, false);
    let s = 1.0 / spec.len() as f64;
    col.iter_mut().for_each(|v| *v *= s);
    col
}

impl Bilinear {
    /// Uses the separable form of `a` when it has one.
    pub fn new(a: SymbolRef, u: &GridFunction) -> Result<Self> {
        if a.separable_terms().is_some() {
            Self::separable(a, u)
        } else {
            Self::dense(a, u)
        }
    }

    pub fn separable(a: SymbolRef, u: &GridFunction) -> Result<Self> {
        let spec = u.spec();
        check_dim(&a, &spec)?;
        let terms = a
            .separable_terms()
            .ok_or_else(|| PdError::Precondition("symbol has no separable form".into()))?;
        let (xs, mus) = (0..terms)
            .into_par_iter()
            .map(|t| {
                let (mut mx, mu) = a.separable_term(&spec, t);
                fft_in_place(spec, &mut mx, false);
                let s = 1.0 / spec.len() as f64;
                mx.iter_mut().for_each(|v| *v *= s);
                (mx, mu)
            })
            .unzip();
        Ok(Self {
            spec,
            big: spec.refined(),
            input: fft_forward(u),
            kind: Kind::Separable { xs, mus },
        })
    }

    pub fn dense(a: SymbolRef, u: &GridFunction) -> Result<Self> {
        let spec = u.spec();
        check_dim(&a, &spec)?;
        let input = fft_forward(u);
        let active: Vec<usize> = (0..spec.len())
            .filter(|&e| input.coeffs()[e].norm_sqr() != 0.0)
            .collect();
        let cache = (active.len() * spec.len() <= CACHE_LIMIT).then(|| {
            active
                .par_iter()
                .map(|&e| (e, hat_column(&a, &spec, e)))
                .collect()
        });
        Ok(Self {
            spec,
            big: spec.refined(),
            input,
            kind: Kind::Dense { symbol: a, cache },
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// The doubled grid carrying unaliased output frequencies.
    pub fn big(&self) -> GridSpec {
        self.big
    }

    pub fn input(&self) -> &SpectralFunction {
        &self.input
    }

    /// Spectrum of `OP(F(D_x)a(x,η)G(η))u` on [`Self::big`].
    pub fn spectrum(
        &self,
        f: &(dyn Fn(&[f64]) -> f64 + Sync),
        g: &(dyn Fn(&[f64]) -> f64 + Sync),
    ) -> SpectralFunction {
        let spec = self.spec;
        let ftab: Vec<f64> = (0..spec.len()).map(|i| f(&spec.frequency_vec(i))).collect();
        let gtab: Vec<f64> = (0..spec.len()).map(|i| g(&spec.frequency_vec(i))).collect();
        match &self.kind {
            Kind::Separable { xs, mus } => self.separable_spectrum(xs, mus, &ftab, &gtab),
            Kind::Dense { symbol, cache } => self.dense_spectrum(symbol, cache.as_deref(), &ftab, &gtab),
        }
    }

    /// Grid values of `OP(F(D_x)a G)u`.
    pub fn values(
        &self,
        f: &(dyn Fn(&[f64]) -> f64 + Sync),
        g: &(dyn Fn(&[f64]) -> f64 + Sync),
    ) -> GridFunction {
        fft_inverse(&fold_spectrum(&self.spectrum(f, g), self.spec))
    }

    fn separable_spectrum(
        &self,
        xs: &[Vec<Complex64>],
        mus: &[Vec<Complex64>],
        ftab: &[f64],
        gtab: &[f64],
    ) -> SpectralFunction {
        let spec = self.spec;
        let big = self.big;
        let zero = || vec![Complex64::new(0.0, 0.0); big.len()];
        let acc = crate::ordered_fold(xs.len(), zero, |mut acc, t| {
                let (mx, mu) = (&xs[t], &mus[t]);
                let mut p = zero();
                let mut q = zero();
                let mut any_p = false;
                let mut any_q = false;
                for i in 0..spec.len() {
                    let f = spec.frequency(i);
                    let k = big.frequency_index(&f[..spec.dim()]);
                    let a = mx[i] * ftab[i];
                    let b = mu[i] * gtab[i] * self.input.coeffs()[i];
                    any_p |= a.norm_sqr() != 0.0;
                    any_q |= b.norm_sqr() != 0.0;
                    p[k] = a;
                    q[k] = b;
                }
                if !(any_p && any_q) {
                    return acc;
                }
                fft_in_place(big, &mut p, true);
                fft_in_place(big, &mut q, true);
                p.iter_mut().zip(&q).for_each(|(x, y)| *x *= y);
                fft_in_place(big, &mut p, false);
                let s = 1.0 / big.len() as f64;
                acc.iter_mut().zip(&p).for_each(|(o, v)| *o += v * s);
                acc
            }, add_vec);
        SpectralFunction::from_raw(big, acc)
    }

    fn dense_spectrum(
        &self,
        symbol: &SymbolRef,
        cache: Option<&[(usize, Vec<Complex64>)]>,
        ftab: &[f64],
        gtab: &[f64],
    ) -> SpectralFunction {
        let spec = self.spec;
        let big = self.big;
        let n = spec.dim();
        // big-grid index of each base frequency, and the offset map ξ+η
        let freq: Vec<[i64; 2]> = (0..spec.len()).map(|i| spec.frequency(i)).collect();
        let zero = || vec![Complex64::new(0.0, 0.0); big.len()];
        let accumulate = |mut acc: Vec<Complex64>, e: usize, col: &[Complex64]| {
            let w = gtab[e] * self.input.coeffs()[e];
            if w.norm_sqr() == 0.0 {
                return acc;
            }
            let fe = freq[e];
            for (k, v) in col.iter().enumerate() {
                if ftab[k] == 0.0 || v.norm_sqr() == 0.0 {
                    continue;
                }
                let fk = freq[k];
                let z = [fk[0] + fe[0], fk[1] + fe[1]];
                acc[big.frequency_index(&z[..n])] += v * ftab[k] * w;
            }
            acc
        };
        let acc = match cache {
            Some(cols) => crate::ordered_fold(cols.len(), zero, |acc, i| {
                accumulate(acc, cols[i].0, &cols[i].1)
            }, add_vec),
            None => crate::ordered_fold(spec.len(), zero, |acc, e| {
                if self.input.coeffs()[e].norm_sqr() == 0.0 || gtab[e] == 0.0 {
                    return acc;
                }
                let col = hat_column(symbol, &spec, e);
                accumulate(acc, e, &col)
            }, add_vec),
        };
        SpectralFunction::from_raw(big, acc)
    }
}

fn add_vec(mut a: Vec<Complex64>, b: Vec<Complex64>) -> Vec<Complex64> {
    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
    a
}

fn check_dim(a: &SymbolRef, spec: &GridSpec) -> Result<()> {
    if a.dim() != spec.dim() {
        return Err(PdError::ShapeMismatch(format!(
            "symbol dimension {} vs grid dimension {}",
            a.dim(),
            spec.dim()
        )));
    }
    Ok(())
}
