use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::Bilinear;
use crate::error::{PdError, Result};
use crate::grid::{fft_forward, fft_in_place, roots_of_unity, GridFunction, GridSpec};
use crate::symbol::{Symbol, SymbolRef, SymbolTable, TABLE_LIMIT};

/// Distribution kernel on grid points: `apply(a, u)(x) = (2π/N)^n Σ_y K[x,y]u(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    spec: GridSpec,
    /// Row-major `K[x, y]`.
    data: Vec<Complex64>,
}

impl KernelTable {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn get(&self, x: usize, y: usize) -> Complex64 {
        self.data[x * self.spec.len() + y]
    }

    pub fn row(&self, x: usize) -> &[Complex64] {
        let len = self.spec.len();
        &self.data[x * len..(x + 1) * len]
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        if u.spec() != self.spec {
            return Err(PdError::ShapeMismatch("kernel and input grids differ".into()));
        }
        let w = self.spec.cell_volume();
        let out = (0..self.spec.len())
            .into_par_iter()
            .map(|x| {
                self.row(x)
                    .iter()
                    .zip(u.values())
                    .map(|(k, v)| k * v)
                    .sum::<Complex64>()
                    * w
            })
            .collect();
        Ok(GridFunction::from_raw(self.spec, out))
    }

    /// `(2π/N)^{2n} Σ_{x,y} K[x,y] φ(x) ψ(y)`.
    pub fn pair(&self, phi: &GridFunction, psi: &GridFunction) -> Complex64 {
        let w = self.spec.cell_volume();
        let len = self.spec.len();
        (0..len)
            .map(|x| {
                self.row(x)
                    .iter()
                    .zip(psi.values())
                    .map(|(k, v)| k * v)
                    .sum::<Complex64>()
                    * phi.values()[x]
            })
            .sum::<Complex64>()
            * w
            * w
    }
}

/// `K[x, y] = (2π)^{-n} Σ_η a(x, η) e^{i(x-y)·η}`.
pub fn kernel(a: &dyn Symbol, spec: GridSpec) -> Result<KernelTable> {
    let t = SymbolTable::tabulate(a, spec)?;
    let len = spec.len();
    let roots = roots_of_unity(spec.points());
    let norm = (2.0 * PI).powi(spec.dim() as i32);
    let mut data = vec![Complex64::new(0.0, 0.0); len * len];
    data.par_chunks_mut(len).enumerate().for_each(|(x, row)| {
        for (e, v) in row.iter_mut().enumerate() {
            *v = t.get(x, e) * roots[spec.phase_index(x, e)];
        }
        // Σ_η g(η) e^{-iyη}: forward transform over the η index
        fft_in_place(spec, row, false);
        row.iter_mut().for_each(|v| *v /= norm);
    });
    Ok(KernelTable { spec, data })
}

/// Thresholded support `{i : |v_i|² > τ·Σ|v|²}`.
pub fn tau_support(values: &[Complex64], tau: f64) -> Vec<bool> {
    let total: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    values
        .iter()
        .map(|v| total > 0.0 && v.norm_sqr() > tau * total)
        .collect()
}

/// Outcome of a support rule check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub tau: f64,
    pub predicted_size: usize,
    pub observed_size: usize,
    /// Relative squared mass of the output outside the predicted set.
    pub violation_mass: f64,
    pub holds: bool,
}

/// `supp a(x,D)u ⊂ supp K ∘ supp u`, with all supports thresholded at `τ`.
pub fn support_rule_check(a: &dyn Symbol, u: &GridFunction, tau: f64) -> Result<SupportReport> {
    let spec = u.spec();
    if spec.len() > TABLE_LIMIT {
        return Err(PdError::SizeGuard {
            what: "kernel",
            size: spec.len(),
            limit: TABLE_LIMIT,
        });
    }
    let k = kernel(a, spec)?;
    let out = k.apply(u)?;
    let su = tau_support(u.values(), tau);
    let sk = tau_support(&k.data, tau);
    let len = spec.len();
    let predicted: Vec<bool> = (0..len)
        .map(|x| (0..len).any(|y| su[y] && sk[x * len + y]))
        .collect();
    let total: f64 = out.values().iter().map(|v| v.norm_sqr()).sum();
    let bad: f64 = out
        .values()
        .iter()
        .zip(&predicted)
        .filter(|(_, &p)| !p)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    let violation = if total > 0.0 { bad / total } else { 0.0 };
    Ok(SupportReport {
        tau,
        predicted_size: predicted.iter().filter(|&&p| p).count(),
        observed_size: tau_support(out.values(), tau).iter().filter(|&&p| p).count(),
        violation_mass: violation,
        holds: violation <= tau,
    })
}

/// `supp 𝓕(a(x,D)u) ⊂ {ξ+η : (ξ,η) ∈ supp â, η ∈ supp û}`, thresholded at
/// `τ`, with output frequencies on the doubled grid (no wrap-around).
pub fn spectral_support_rule_check(a: SymbolRef, u: &GridFunction, tau: f64) -> Result<SupportReport> {
    let spec = u.spec();
    let c = fft_forward(u);
    let su = tau_support(c.coeffs(), tau);
    let len = spec.len();
    let cols: Vec<(usize, Vec<Complex64>)> = (0..len)
        .into_par_iter()
        .filter(|&e| su[e])
        .map(|e| {
            let mut col = a.column(&spec, &spec.frequency_vec(e));
            fft_in_place(spec, &mut col, false);
            let s = 1.0 / len as f64;
            col.iter_mut().for_each(|v| *v *= s);
            (e, col)
        })
        .collect();
    let hat_total: f64 = cols.iter().flat_map(|(_, c)| c.iter()).map(|v| v.norm_sqr()).sum();
    let big = spec.refined();
    let n = spec.dim();
    let mut predicted = vec![false; big.len()];
    for (e, col) in &cols {
        let fe = spec.frequency(*e);
        for (k, v) in col.iter().enumerate() {
            if hat_total > 0.0 && v.norm_sqr() > tau * hat_total {
                let fk = spec.frequency(k);
                let z = [fk[0] + fe[0], fk[1] + fe[1]];
                predicted[big.frequency_index(&z[..n])] = true;
            }
        }
    }
    let out = Bilinear::new(a, u)?.spectrum(&|_| 1.0, &|_| 1.0);
    let total = out.energy();
    let bad: f64 = out
        .coeffs()
        .iter()
        .zip(&predicted)
        .filter(|(_, &p)| !p)
        .map(|(v, _)| v.norm_sqr())
        .sum();
    let violation = if total > 0.0 { bad / total } else { 0.0 };
    Ok(SupportReport {
        tau,
        predicted_size: predicted.iter().filter(|&&p| p).count(),
        observed_size: tau_support(out.coeffs(), tau).iter().filter(|&&p| p).count(),
        violation_mass: violation,
        holds: violation <= tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{random_elementary_symbol, random_grid_function};
    use crate::frame::LpFrame;
    use crate::grid::{fft_inverse, SpectralFunction};
    use crate::operator::{apply_direct, output_spectrum};
    use crate::symbol::{ChingSymbol, FnSymbol, MultiplicationSymbol, RadialBump};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn kernel_reproduces_apply() {
        let g = GridSpec::one_d(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_elementary_symbol(g, &LpFrame::standard(), 6, &mut rng);
        let u = random_grid_function(g, &mut rng);
        let k = kernel(&a, g).unwrap();
        let via = k.apply(&u).unwrap();
        assert!(via.max_abs_diff(&apply_direct(&a, &u).unwrap()) < 1e-10);
        // ⟨a(x,D)ψ, φ⟩ = ⟨K, φ⊗ψ⟩
        let phi = random_grid_function(g, &mut rng);
        let lhs: Complex64 = apply_direct(&a, &u)
            .unwrap()
            .values()
            .iter()
            .zip(phi.values())
            .map(|(p, q)| p * q)
            .sum::<Complex64>()
            * g.cell_volume();
        assert!((lhs - k.pair(&phi, &u)).norm() < 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn identity_and_multiplication_kernels_are_diagonal() {
        let g = GridSpec::one_d(32).unwrap();
        let k = kernel(&FnSymbol::identity(1), g).unwrap();
        let diag = g.points() as f64 / (2.0 * PI);
        for x in 0..32 {
            for y in 0..32 {
                let expect = if x == y { diag } else { 0.0 };
                assert!((k.get(x, y) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let m = random_grid_function(g, &mut rng);
        let km = kernel(&MultiplicationSymbol::new(m.clone()), g).unwrap();
        for x in 0..32 {
            assert!((km.get(x, x) - m.values()[x] * diag).norm() < 1e-12);
        }
    }

    #[test]
    fn support_rules() {
        let g = GridSpec::one_d(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let u = random_grid_function(g, &mut rng);
        let r = support_rule_check(&FnSymbol::identity(1), &u, 1e-8).unwrap();
        assert!(r.holds);
        // banded convolution kernel h supported on |x| <= 3 cells
        let mut h = vec![Complex64::new(0.0, 0.0); 64];
        for (o, w) in [(-3i64, 0.2), (-1, 1.0), (0, 2.0), (2, 0.5), (3, 0.1)] {
            h[o.rem_euclid(64) as usize] = Complex64::new(w, 0.0);
        }
        let hh = fft_forward(&GridFunction::new(g, h).unwrap());
        let coeffs = hh.coeffs().to_vec();
        let a = FnSymbol::new(1, 0.0, "band", move |_, eta| {
            coeffs[g.frequency_index(&[eta[0].round() as i64])]
        });
        let left = GridFunction::from_fn(g, |x| {
            if x[0] < PI { Complex64::new(1.0 + x[0], 0.0) } else { Complex64::new(0.0, 0.0) }
        });
        let r = support_rule_check(&a, &left, 1e-8).unwrap();
        assert!(r.holds, "{r:?}");
        assert!(r.predicted_size <= 32 + 6);
        let s = spectral_support_rule_check(Arc::new(FnSymbol::identity(1)), &u, 1e-10).unwrap();
        assert!(s.holds && s.violation_mass == 0.0);
    }

    #[test]
    fn ching_annihilates_frequency() {
        let g = GridSpec::one_d(128).unwrap();
        let a: SymbolRef = Arc::new(ChingSymbol::new(0.0, &[1], RadialBump::standard(), 5).unwrap());
        let u = fft_inverse(&SpectralFunction::mode(g, &[32]));
        let out = output_spectrum(a.clone(), &u).unwrap();
        let big = out.spec();
        for (i, v) in out.coeffs().iter().enumerate() {
            let expect = if big.frequency(i)[0] == 0 { 1.0 } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-12);
        }
        let r = spectral_support_rule_check(a, &u, 1e-10).unwrap();
        assert!(r.holds);
        assert_eq!(r.observed_size, 1);
    }
}
