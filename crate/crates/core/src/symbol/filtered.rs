use std::sync::Arc;

use num_complex::Complex64;

use super::{Symbol, SymbolRef};
use crate::error::{invalid, Result};
use crate::frame::{norm, LpFrame, ModulationFunction};
use crate::grid::{fft_in_place, GridSpec, SpectralFunction};
use crate::smooth;

type XiFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type XiEtaFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
enum XFilter {
    Xi(Arc<XiFn>),
    XiEta(Arc<XiEtaFn>),
}

/// `b(x, η) = g(η)·[f(D_x, η) a](x, η)`: a symbol whose `x`-dependence has
/// been filtered by a Fourier multiplier in `ξ` (possibly depending on `η`).
///
/// The filter acts on the trigonometric interpolant of `x ↦ a(x, η)` on the
/// working grid; off-grid `x` are evaluated by that interpolant.
#[derive(Clone)]
pub struct FilteredSymbol {
    base: SymbolRef,
    grid: GridSpec,
    filter: XFilter,
    eta_factor: Option<Arc<XiFn>>,
    label: String,
    tdc: Option<f64>,
}

impl FilteredSymbol {
    /// Filter depending on `ξ` only.
    pub fn by_xi(
        base: SymbolRef,
        grid: GridSpec,
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            base,
            grid,
            filter: XFilter::Xi(Arc::new(f)),
            eta_factor: None,
            label: label.into(),
            tdc: None,
        }
    }

    /// Filter depending on `(ξ, η)`.
    pub fn by_xi_eta(
        base: SymbolRef,
        grid: GridSpec,
        label: impl Into<String>,
        f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            base,
            grid,
            filter: XFilter::XiEta(Arc::new(f)),
            eta_factor: None,
            label: label.into(),
            tdc: None,
        }
    }

    pub fn with_eta_factor(mut self, g: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.eta_factor = Some(Arc::new(g));
        self
    }

    fn with_tdc(mut self, b: Option<f64>) -> Self {
        self.tdc = b;
        self
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn base(&self) -> &SymbolRef {
        &self.base
    }

    fn filter_value(&self, xi: &[f64], eta: &[f64]) -> f64 {
        match &self.filter {
            XFilter::Xi(f) => f(xi),
            XFilter::XiEta(f) => f(xi, eta),
        }
    }

    /// Filtered coefficients `ĉ(ξ) = f(ξ, η)·â(ξ, η)` of one column.
    pub fn column_hat(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        let g = self.eta_factor.as_ref().map_or(1.0, |g| g(eta));
        let mut col = if g == 0.0 {
            vec![Complex64::new(0.0, 0.0); grid.len()]
        } else {
            self.base.column(grid, eta)
        };
        if g == 0.0 {
            return col;
        }
        fft_in_place(*grid, &mut col, false);
        let scale = g / grid.len() as f64;
        for (i, v) in col.iter_mut().enumerate() {
            if v.norm_sqr() == 0.0 {
                continue;
            }
            let f = self.filter_value(&grid.frequency_vec(i), eta);
            *v *= f * scale;
        }
        col
    }
}

impl Symbol for FilteredSymbol {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn order(&self) -> f64 {
        self.base.order()
    }

    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64 {
        if let Some(i) = self.grid.point_index(x) {
            return self.column(&self.grid, eta)[i];
        }
        let hat = self.column_hat(&self.grid, eta);
        SpectralFunction::from_raw(self.grid, hat).evaluate(x)
    }

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        let mut hat = self.column_hat(grid, eta);
        fft_in_place(*grid, &mut hat, true);
        hat
    }

    fn separable_terms(&self) -> Option<usize> {
        match self.filter {
            XFilter::Xi(_) => self.base.separable_terms(),
            XFilter::XiEta(_) => None,
        }
    }

    fn separable_term(&self, grid: &GridSpec, t: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let (mut mx, mut mu) = self.base.separable_term(grid, t);
        fft_in_place(*grid, &mut mx, false);
        let scale = 1.0 / grid.len() as f64;
        for (i, v) in mx.iter_mut().enumerate() {
            *v *= self.filter_value(&grid.frequency_vec(i), &[]) * scale;
        }
        fft_in_place(*grid, &mut mx, true);
        if let Some(g) = &self.eta_factor {
            for (i, v) in mu.iter_mut().enumerate() {
                *v *= g(&grid.frequency_vec(i));
            }
        }
        (mx, mu)
    }

    fn tdc_bound(&self) -> Option<f64> {
        self.tdc
    }

    fn describe(&self) -> String {
        format!("{}[{}]", self.label, self.base.describe())
    }
}

/// `b_m(x, η) = [ψ(2^{-m}D_x)a](x, η)·ψ(2^{-m}η)`.
pub fn modulate_symbol(a: SymbolRef, m: u32, psi: ModulationFunction, grid: GridSpec) -> FilteredSymbol {
    let s = f64::from(m);
    let tdc = a.tdc_bound();
    FilteredSymbol::by_xi(a, grid, format!("modulate:m={m}"), move |xi| psi.dilated(s, xi))
        .with_eta_factor(move |eta| psi.dilated(s, eta))
        .with_tdc(tdc)
}

/// `a^j(x, η) = ψ(2^{-j}D_x)a(x, η)`; zero for `j < 0`.
pub fn x_ball_symbol(a: SymbolRef, j: i64, frame: &LpFrame, grid: GridSpec) -> FilteredSymbol {
    let f = frame.clone();
    FilteredSymbol::by_xi(a, grid, format!("x-ball:j={j}"), move |xi| f.ball_radial(j, norm(xi)))
}

/// `a_j(x, η) = Φ_j(D_x)a(x, η)`.
pub fn x_corona_symbol(a: SymbolRef, j: usize, frame: &LpFrame, grid: GridSpec) -> FilteredSymbol {
    let f = frame.clone();
    FilteredSymbol::by_xi(a, grid, format!("x-corona:j={j}"), move |xi| f.block(j, xi))
}

/// `a_Q(x, η) = (1 - ψ)(Q^{-1}D_x)a(x, η)`, a high-pass in `x` vanishing near
/// `ξ = 0`.
pub fn x_highpass_symbol(a: SymbolRef, q: f64, psi: ModulationFunction, grid: GridSpec) -> FilteredSymbol {
    FilteredSymbol::by_xi(a, grid, format!("x-highpass:Q={q}"), move |xi| {
        1.0 - psi.radial(norm(xi) / q)
    })
}

/// `χ(ξ, η) = θ₁(|η|)·θ₂(|ξ|/|η|)`, with `θ₁` rising from 0 to 1 on
/// `[t₀, t₁]` and `θ₂` falling from 1 to 0 on `[s₀, s₁]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistedCutoff {
    pub rise: (f64, f64),
    pub fall: (f64, f64),
}

impl TwistedCutoff {
    pub fn eval(&self, xi: &[f64], eta: &[f64]) -> f64 {
        let e = norm(eta);
        let t1 = smooth::ascending(e, self.rise.0, self.rise.1);
        if t1 == 0.0 {
            return 0.0;
        }
        t1 * smooth::descending(norm(xi) / e, self.fall.0, self.fall.1)
    }
}

/// The standard cutoff: `θ₁` on `[1, 2]`, `θ₂` on `[1/2, 1]`.
pub fn build_chi() -> TwistedCutoff {
    TwistedCutoff {
        rise: (1.0, 2.0),
        fall: (0.5, 1.0),
    }
}

/// `â_{χ,ε}(ξ, η) = â(ξ, η)·χ(ξ + η, εη)`.
pub fn localize_symbol(a: SymbolRef, eps: f64, grid: GridSpec) -> Result<FilteredSymbol> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1], got {eps}")));
    }
    let chi = build_chi();
    Ok(FilteredSymbol::by_xi_eta(a, grid, format!("localize:eps={eps}"), move |xi, eta| {
        let n = eta.len();
        let mut s = [0.0; 2];
        let mut e = [0.0; 2];
        for k in 0..n {
            s[k] = xi[k] + eta[k];
            e[k] = eps * eta[k];
        }
        chi.eval(&s[..n], &e[..n])
    }))
}
