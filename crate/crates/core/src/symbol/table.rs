use num_complex::Complex64;
use rayon::prelude::*;

use super::Symbol;
use crate::error::{PdError, Result};
use crate::grid::{fft_in_place, GridSpec, SpectralFunction};

/// Largest `N^n` for which full `(x, η)` tables are built.
pub const TABLE_LIMIT: usize = 4096;

fn guard(spec: &GridSpec) -> Result<()> {
    if spec.len() > TABLE_LIMIT {
        return Err(PdError::SizeGuard {
            what: "symbol table",
            size: spec.len(),
            limit: TABLE_LIMIT,
        });
    }
    Ok(())
}

/// `a(x_k, η)` on grid points × lattice frequencies, stored column by column
/// (one column per `η`, flat FFT index order).
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    spec: GridSpec,
    order: f64,
    tdc: Option<f64>,
    data: Vec<Complex64>,
}

impl SymbolTable {
    pub fn tabulate(a: &dyn Symbol, spec: GridSpec) -> Result<Self> {
        guard(&spec)?;
        if a.dim() != spec.dim() {
            return Err(PdError::ShapeMismatch(format!(
                "symbol dimension {} vs grid dimension {}",
                a.dim(),
                spec.dim()
            )));
        }
        let len = spec.len();
        let mut data = vec![Complex64::new(0.0, 0.0); len * len];
        data.par_chunks_mut(len).enumerate().for_each(|(e, col)| {
            col.copy_from_slice(&a.column(&spec, &spec.frequency_vec(e)));
        });
        Ok(Self {
            spec,
            order: a.order(),
            tdc: a.tdc_bound(),
            data,
        })
    }

    /// Table from raw column-major data.
    pub fn from_columns(spec: GridSpec, order: f64, data: Vec<Complex64>) -> Result<Self> {
        guard(&spec)?;
        if data.len() != spec.len() * spec.len() {
            return Err(PdError::ShapeMismatch(format!(
                "table needs {} entries, got {}",
                spec.len() * spec.len(),
                data.len()
            )));
        }
        if data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(PdError::InvalidParameter("table has non-finite entries".into()));
        }
        Ok(Self {
            spec,
            order,
            tdc: None,
            data,
        })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn order_value(&self) -> f64 {
        self.order
    }

    /// Column `x ↦ a(x, η)` for the lattice index `eta_idx`.
    pub fn column_at(&self, eta_idx: usize) -> &[Complex64] {
        let len = self.spec.len();
        &self.data[eta_idx * len..(eta_idx + 1) * len]
    }

    pub fn get(&self, x_idx: usize, eta_idx: usize) -> Complex64 {
        self.data[eta_idx * self.spec.len() + x_idx]
    }

    pub fn set_tdc(&mut self, b: Option<f64>) {
        self.tdc = b;
    }

    /// Partial Fourier coefficients in `x`, one column per `η`.
    pub fn partial_ft(&self) -> SymbolHat {
        let len = self.spec.len();
        let mut data = self.data.clone();
        let scale = 1.0 / len as f64;
        data.par_chunks_mut(len).for_each(|col| {
            fft_in_place(self.spec, col, false);
            col.iter_mut().for_each(|v| *v *= scale);
        });
        SymbolHat {
            spec: self.spec,
            order: self.order,
            data,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Symbol for SymbolTable {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn order(&self) -> f64 {
        self.order
    }

    /// Lattice lookup in `η` (nearest lattice point per component, linear in
    /// between) and trigonometric interpolation in `x`.
    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64 {
        let n = self.spec.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        let lo: Vec<f64> = eta[..n].iter().map(|e| e.floor()).collect();
        let corners = 1usize << n;
        for c in 0..corners {
            let mut w = 1.0;
            let mut f = [0i64; 2];
            for k in 0..n {
                let up = (c >> k) & 1 == 1;
                let t = eta[k] - lo[k];
                w *= if up { t } else { 1.0 - t };
                f[k] = lo[k] as i64 + i64::from(up);
            }
            if w == 0.0 || !self.spec.represents(&f[..n]) {
                continue;
            }
            let col = self.column_at(self.spec.frequency_index(&f[..n]));
            let v = match self.spec.point_index(x) {
                Some(i) => col[i],
                None => {
                    let mut hat = col.to_vec();
                    fft_in_place(self.spec, &mut hat, false);
                    let s = 1.0 / self.spec.len() as f64;
                    hat.iter_mut().for_each(|v| *v *= s);
                    SpectralFunction::from_raw(self.spec, hat).evaluate(x)
                }
            };
            acc += v * w;
        }
        acc
    }

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        let n = grid.dim();
        let lattice = eta[..n].iter().all(|e| e.fract() == 0.0);
        if *grid == self.spec && lattice {
            let f: Vec<i64> = eta[..n].iter().map(|&e| e as i64).collect();
            if self.spec.represents(&f) {
                return self.column_at(self.spec.frequency_index(&f)).to_vec();
            }
            return vec![Complex64::new(0.0, 0.0); grid.len()];
        }
        (0..grid.len())
            .map(|i| self.eval(&grid.point(i)[..n], eta))
            .collect()
    }

    fn tdc_bound(&self) -> Option<f64> {
        self.tdc
    }

    fn describe(&self) -> String {
        format!("table:n={},N={}", self.spec.dim(), self.spec.points())
    }
}

/// `â(ξ, η)` with `a(x, η) = Σ_ξ â(ξ, η) e^{ix·ξ}`; column per `η`, row per
/// `ξ`, both in flat FFT index order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolHat {
    spec: GridSpec,
    order: f64,
    data: Vec<Complex64>,
}

impl SymbolHat {
    pub fn from_columns(spec: GridSpec, order: f64, data: Vec<Complex64>) -> Result<Self> {
        guard(&spec)?;
        if data.len() != spec.len() * spec.len() {
            return Err(PdError::ShapeMismatch("hat table has wrong size".into()));
        }
        Ok(Self { spec, order, data })
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, xi_idx: usize, eta_idx: usize) -> Complex64 {
        self.data[eta_idx * self.spec.len() + xi_idx]
    }

    pub fn column_at(&self, eta_idx: usize) -> &[Complex64] {
        let len = self.spec.len();
        &self.data[eta_idx * len..(eta_idx + 1) * len]
    }

    /// Multiplies `â(ξ, η)` by `f(ξ, η)`.
    pub fn filter(&self, f: impl Fn(&[f64], &[f64]) -> f64 + Sync) -> Self {
        let len = self.spec.len();
        let mut data = self.data.clone();
        data.par_chunks_mut(len).enumerate().for_each(|(e, col)| {
            let eta = self.spec.frequency_vec(e);
            for (k, v) in col.iter_mut().enumerate() {
                if v.norm_sqr() != 0.0 {
                    *v *= f(&self.spec.frequency_vec(k), &eta);
                }
            }
        });
        Self {
            spec: self.spec,
            order: self.order,
            data,
        }
    }

    /// Back to `a(x, η)`.
    pub fn to_table(&self) -> SymbolTable {
        let len = self.spec.len();
        let mut data = self.data.clone();
        data.par_chunks_mut(len)
            .for_each(|col| fft_in_place(self.spec, col, true));
        SymbolTable {
            spec: self.spec,
            order: self.order,
            tdc: None,
            data,
        }
    }

    /// `Σ|â|²` over pairs where `forbidden(ξ, η)` holds, and the total.
    pub fn mass_where(&self, forbidden: impl Fn(&[f64], &[f64]) -> bool + Sync) -> (f64, f64) {
        let len = self.spec.len();
        self.data
            .par_chunks(len)
            .enumerate()
            .map(|(e, col)| {
                let eta = self.spec.frequency_vec(e);
                let mut bad = 0.0;
                let mut all = 0.0;
                for (k, v) in col.iter().enumerate() {
                    let m = v.norm_sqr();
                    if m == 0.0 {
                        continue;
                    }
                    all += m;
                    if forbidden(&self.spec.frequency_vec(k), &eta) {
                        bad += m;
                    }
                }
                (bad, all)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{ChingSymbol, FnSymbol, RadialBump};

    #[test]
    fn table_matches_eval_on_lattice() {
        let g = GridSpec::one_d(32).unwrap();
        let a = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 3).unwrap();
        let t = SymbolTable::tabulate(&a, g).unwrap();
        for e in 0..g.len() {
            for x in 0..g.len() {
                let v = a.eval(&g.point(x)[..1], &g.frequency_vec(e));
                assert!((t.get(x, e) - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hat_round_trip() {
        let g = GridSpec::new(2, 8).unwrap();
        let a = FnSymbol::new(2, 0.0, "t", |x, eta| {
            Complex64::new((x[0] + 2.0 * x[1]).cos() * (1.0 + eta[0] * eta[0]), eta[1])
        });
        let t = SymbolTable::tabulate(&a, g).unwrap();
        let back = t.partial_ft().to_table();
        assert!(t.max_abs_diff(&back) < 1e-12);
    }

    #[test]
    fn size_guard() {
        let g = GridSpec::one_d(8192).unwrap();
        assert!(SymbolTable::tabulate(&FnSymbol::identity(1), g).is_err());
    }

    #[test]
    fn ching_hat_is_a_single_shift() {
        let g = GridSpec::one_d(64).unwrap();
        let a = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 3).unwrap();
        let hat = SymbolTable::tabulate(&a, g).unwrap().partial_ft();
        let e = g.frequency_index(&[8]);
        let xi = g.frequency_index(&[-8]);
        assert!((hat.get(xi, e) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let (off, total) = hat.mass_where(|x, eta| eta[0] > 0.0 && (x[0] + eta[0]).abs() > 0.3 * eta[0] + 1.0);
        assert!(total > 0.0);
        assert!(off < 1e-20);
    }
}
