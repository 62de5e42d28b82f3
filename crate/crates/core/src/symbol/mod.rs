//! Symbols `a(x, η)` on the torus: construction, modulation, localisation
//! along the twisted diagonal, seminorms and adjoints.

mod adjoint;
mod bump;
mod ching;
mod diagnostics;
mod elementary;
mod filtered;
mod parse;
mod table;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::GridSpec;

pub use adjoint::adjoint_symbol_matrix;
pub use bump::{RadialBump, ZeroFactor};
pub use ching::{ching_symbol, ChingSymbol};
pub use diagnostics::{
    annulus_values, check_adjoint_support, check_twisted_diagonal, derivative_column, least_squares_slope, ETA_STEP, NYQUIST_MARGIN, finite_difference_stencil, sigma_order_estimate, symbol_seminorm,
    SigmaFit, TdcReport,
};
pub use elementary::ElementarySymbol;
pub use filtered::{
    build_chi, localize_symbol, modulate_symbol, x_ball_symbol, x_corona_symbol, x_highpass_symbol,
    FilteredSymbol, TwistedCutoff,
};
pub use parse::{parse_symbol_spec, SymbolSpec};
pub use table::{SymbolHat, SymbolTable, TABLE_LIMIT};

/// A multi-index `(α₁, α₂)`; the second entry is ignored in one dimension.
pub type MultiIndex = [usize; 2];

/// Evaluator of a symbol on `torus × frequency space`.
///
/// `column` returns `a(x_k, η)` at every grid point of `grid` for one fixed
/// (possibly non-integer) `η`; it is the workhorse for tabulation and
/// operator application and may be overridden for speed.
pub trait Symbol: Send + Sync {
    fn dim(&self) -> usize;

    /// Order `d` in `S^d_{1,1}`.
    fn order(&self) -> f64;

    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64;

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        (0..grid.len())
            .map(|i| self.eval(&grid.point(i)[..grid.dim()], eta))
            .collect()
    }

    /// Number of terms when the symbol is a finite sum `Σ_t m_t(x) μ_t(η)`.
    fn separable_terms(&self) -> Option<usize> {
        None
    }

    /// Term `t` of the separable form: `(m_t on the grid, μ_t on the lattice)`.
    fn separable_term(&self, _grid: &GridSpec, _t: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        unreachable!("symbol has no separable form")
    }

    /// Constant `B` of the twisted diagonal condition when known by
    /// construction.
    fn tdc_bound(&self) -> Option<f64> {
        None
    }

    fn describe(&self) -> String;
}

impl fmt::Debug for dyn Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

pub type SymbolRef = Arc<dyn Symbol>;

type EvalFn = dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync;

/// Symbol given by a closure.
#[derive(Clone)]
pub struct FnSymbol {
    dim: usize,
    order: f64,
    label: String,
    tdc: Option<f64>,
    f: Arc<EvalFn>,
}

impl FnSymbol {
    pub fn new(
        dim: usize,
        order: f64,
        label: impl Into<String>,
        f: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            order,
            label: label.into(),
            tdc: None,
            f: Arc::new(f),
        }
    }

    pub fn with_tdc(mut self, b: f64) -> Self {
        self.tdc = Some(b);
        self
    }

    /// `a(x, η) = 1`.
    pub fn identity(dim: usize) -> Self {
        Self::new(dim, 0.0, "identity", |_, _| Complex64::new(1.0, 0.0)).with_tdc(1.0)
    }

    /// x-independent multiplier `a(x, η) = m(η)`.
    pub fn multiplier(
        dim: usize,
        order: f64,
        label: impl Into<String>,
        m: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(dim, order, label, move |_, eta| m(eta)).with_tdc(1.0)
    }

    /// `(1 + |η|²)^{d/2}`.
    pub fn bessel(dim: usize, d: f64) -> Self {
        Self::multiplier(dim, d, format!("bessel:d={d}"), move |eta| {
            let r2: f64 = eta.iter().map(|e| e * e).sum();
            Complex64::new((1.0 + r2).powf(d / 2.0), 0.0)
        })
    }
}

impl Symbol for FnSymbol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn order(&self) -> f64 {
        self.order
    }

    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64 {
        (self.f)(x, eta)
    }

    fn tdc_bound(&self) -> Option<f64> {
        self.tdc
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Multiplication operator `a(x, η) = m(x)` for a grid function `m`.
#[derive(Debug, Clone)]
pub struct MultiplicationSymbol {
    m: crate::grid::GridFunction,
}

impl MultiplicationSymbol {
    pub fn new(m: crate::grid::GridFunction) -> Self {
        Self { m }
    }
}

impl Symbol for MultiplicationSymbol {
    fn dim(&self) -> usize {
        self.m.spec().dim()
    }

    fn order(&self) -> f64 {
        0.0
    }

    fn eval(&self, x: &[f64], _eta: &[f64]) -> Complex64 {
        self.m.interpolate(x)
    }

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        if *grid == self.m.spec() {
            self.m.values().to_vec()
        } else {
            (0..grid.len())
                .map(|i| self.eval(&grid.point(i)[..grid.dim()], eta))
                .collect()
        }
    }

    fn separable_terms(&self) -> Option<usize> {
        Some(1)
    }

    fn separable_term(&self, grid: &GridSpec, _t: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let zero = vec![0.0; grid.dim()];
        (self.column(grid, &zero), vec![Complex64::new(1.0, 0.0); grid.len()])
    }

    fn describe(&self) -> String {
        "multiplication".into()
    }
}
