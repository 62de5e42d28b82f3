use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{PdError, Result};
use crate::grid::{fft_in_place, GridSpec, SpectralFunction};
use crate::symbol::Symbol;

/// Upper bound on stored nonzeros of a [`SparseOperator`].
pub const MATRIX_LIMIT: usize = 1 << 23;

/// `a(x, D)` in the Fourier basis: column `η` holds the unaliased output
/// spectrum (on the doubled grid) of the mode `e^{iη·x}`.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    spec: GridSpec,
    big: GridSpec,
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseOperator {
    /// Entries below `1e-14` of the column maximum are dropped.
    pub fn build(a: &dyn Symbol, spec: GridSpec) -> Result<Self> {
        if a.dim() != spec.dim() {
            return Err(PdError::ShapeMismatch("symbol and grid dimensions differ".into()));
        }
        let big = spec.refined();
        let cols: Vec<Vec<(usize, Complex64)>> = (0..spec.len())
            .into_par_iter()
            .map(|e| {
                let f = spec.frequency(e);
                let eta = spec.frequency_vec(e);
                let mut col = a.column(&big, &eta);
                let shift = big.frequency_index(&f[..spec.dim()]);
                let roots = crate::grid::roots_of_unity(big.points());
                for (x, v) in col.iter_mut().enumerate() {
                    *v *= roots[big.phase_index(x, shift)];
                }
                fft_in_place(big, &mut col, false);
                let s = 1.0 / big.len() as f64;
                let top = col.iter().map(|v| v.norm()).fold(0.0, f64::max) * s;
                col.iter()
                    .enumerate()
                    .filter(|(_, v)| top > 0.0 && v.norm() * s > 1e-14 * top)
                    .map(|(k, v)| (k, v * s))
                    .collect()
            })
            .collect();
        let nnz: usize = cols.iter().map(Vec::len).sum();
        if nnz > MATRIX_LIMIT {
            return Err(PdError::SizeGuard {
                what: "Fourier-basis operator",
                size: nnz,
                limit: MATRIX_LIMIT,
            });
        }
        Ok(Self { spec, big, cols })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn big(&self) -> GridSpec {
        self.big
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    /// Output spectrum on the doubled grid for input coefficients `c`.
    pub fn apply(&self, c: &SpectralFunction) -> SpectralFunction {
        SpectralFunction::from_raw(self.big, self.apply_raw(c.coeffs()))
    }

    fn apply_raw(&self, c: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.big.len()];
        for (col, ce) in self.cols.iter().zip(c) {
            if ce.norm_sqr() == 0.0 {
                continue;
            }
            for (k, v) in col {
                out[*k] += v * ce;
            }
        }
        out
    }

    fn adjoint_raw(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.cols
            .par_iter()
            .map(|col| col.iter().map(|(k, v)| v.conj() * y[*k]).sum())
            .collect()
    }

    /// Norm of `diag(w_out)·M·diag(1/w_in)` by power iteration on its Gram
    /// operator; `w_in` lives on the base lattice, `w_out` on the doubled one.
    pub fn weighted_norm(&self, w_in: &[f64], w_out: &[f64], iterations: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x: Vec<Complex64> = (0..self.spec.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut estimate: f64 = 0.0;
        for _ in 0..iterations {
            let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let scaled: Vec<Complex64> = x.iter().zip(w_in).map(|(v, w)| v / w).collect();
            let mut y = self.apply_raw(&scaled);
            y.iter_mut().zip(w_out).for_each(|(v, w)| *v *= w);
            let ny = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let prev = estimate;
            estimate = estimate.max(ny);
            y.iter_mut().zip(w_out).for_each(|(v, w)| *v *= w);
            x = self.adjoint_raw(&y);
            x.iter_mut().zip(w_in).for_each(|(v, w)| *v /= w);
            if prev > 0.0 && (estimate - prev).abs() <= 1e-12 * estimate {
                break;
            }
        }
        estimate
    }
}
