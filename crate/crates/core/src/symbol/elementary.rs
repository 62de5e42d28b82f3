use num_complex::Complex64;

use super::Symbol;
use crate::error::{invalid, Result};
use crate::frame::LpFrame;
use crate::grid::{GridFunction, GridSpec};

/// `a(x, η) = Σ_j m_j(x) Φ_j(η)` for grid functions `m_j`.
#[derive(Debug, Clone)]
pub struct ElementarySymbol {
    multipliers: Vec<GridFunction>,
    frame: LpFrame,
    order: f64,
}

impl ElementarySymbol {
    pub fn new(multipliers: Vec<GridFunction>, frame: LpFrame) -> Result<Self> {
        let Some(first) = multipliers.first() else {
            return Err(invalid("elementary symbol needs at least one multiplier"));
        };
        let spec = first.spec();
        if multipliers.iter().any(|m| m.spec() != spec) {
            return Err(invalid("multipliers live on different grids"));
        }
        Ok(Self {
            multipliers,
            frame,
            order: 0.0,
        })
    }

    /// Declared order `d`; informational, used for seminorm weights.
    pub fn with_order(mut self, d: f64) -> Self {
        self.order = d;
        self
    }

    pub fn multipliers(&self) -> &[GridFunction] {
        &self.multipliers
    }

    pub fn frame(&self) -> &LpFrame {
        &self.frame
    }

    pub fn spec(&self) -> GridSpec {
        self.multipliers[0].spec()
    }
}

impl Symbol for ElementarySymbol {
    fn dim(&self) -> usize {
        self.spec().dim()
    }

    fn order(&self) -> f64 {
        self.order
    }

    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64 {
        let spec = self.spec();
        let idx = spec.point_index(x);
        self.multipliers
            .iter()
            .enumerate()
            .map(|(j, m)| {
                let b = self.frame.block(j, eta);
                if b == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let v = match idx {
                    Some(i) => m.values()[i],
                    None => m.interpolate(x),
                };
                v * b
            })
            .sum()
    }

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        if *grid != self.spec() {
            return (0..grid.len())
                .map(|i| self.eval(&grid.point(i)[..grid.dim()], eta))
                .collect();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (j, m) in self.multipliers.iter().enumerate() {
            let b = self.frame.block(j, eta);
            if b != 0.0 {
                out.iter_mut()
                    .zip(m.values())
                    .for_each(|(o, &v)| *o += v * b);
            }
        }
        out
    }

    fn separable_terms(&self) -> Option<usize> {
        Some(self.multipliers.len())
    }

    fn separable_term(&self, grid: &GridSpec, t: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let m = &self.multipliers[t];
        let mx = if *grid == m.spec() {
            m.values().to_vec()
        } else {
            (0..grid.len())
                .map(|i| m.interpolate(&grid.point(i)[..grid.dim()]))
                .collect()
        };
        let mu = (0..grid.len())
            .map(|i| Complex64::new(self.frame.block_radial(t, grid.frequency_norm(i)), 0.0))
            .collect();
        (mx, mu)
    }

    fn describe(&self) -> String {
        format!("elementary:levels={}", self.multipliers.len())
    }
}
