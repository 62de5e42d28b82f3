use num_complex::Complex64;

use super::{RadialBump, Symbol};
use crate::error::{invalid, Result};
use crate::frame::norm;
use crate::grid::GridSpec;

/// `a(x, η) = Σ_{j=0}^{j_max} 2^{jd} e^{-i 2^j s θ·x} A(2^{-j}|η|/|θ|)`.
///
/// `s = 1` is the classical symbol `a_θ`; `s = 2` gives `a_{2θ}`, whose
/// exponentials sit outside the reach of `A` and which therefore satisfies
/// the twisted diagonal condition.
#[derive(Debug, Clone)]
pub struct ChingSymbol {
    d: f64,
    theta: [i64; 2],
    dim: usize,
    scale: u32,
    bump: RadialBump,
    j_max: usize,
}

impl ChingSymbol {
    pub fn new(d: f64, theta: &[i64], bump: RadialBump, j_max: usize) -> Result<Self> {
        let dim = theta.len();
        if dim != 1 && dim != 2 {
            return Err(invalid("theta must have 1 or 2 components"));
        }
        if theta.iter().all(|&t| t == 0) {
            return Err(invalid("theta must be nonzero"));
        }
        if j_max > 40 {
            return Err(invalid(format!("j_max={j_max} too large")));
        }
        let mut th = [0i64; 2];
        th[..dim].copy_from_slice(theta);
        Ok(Self {
            d,
            theta: th,
            dim,
            scale: 1,
            bump,
            j_max,
        })
    }

    /// Replaces `θ` by `s·θ` in the exponentials.
    pub fn with_scale(mut self, scale: u32) -> Result<Self> {
        if scale == 0 {
            return Err(invalid("scale must be positive"));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn theta(&self) -> &[i64] {
        &self.theta[..self.dim]
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn bump(&self) -> &RadialBump {
        &self.bump
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    fn theta_norm(&self) -> f64 {
        let t: Vec<f64> = self.theta().iter().map(|&v| v as f64).collect();
        norm(&t)
    }

    /// Largest frequency norm touched by the symbol, both in `η` and in the
    /// shift `2^j s θ`.
    pub fn reach(&self) -> f64 {
        let top = (self.j_max as f64).exp2() * self.theta_norm();
        top * self.bump.support().1.max(self.scale as f64)
    }

    /// Rejects grids whose Nyquist radius is below [`Self::reach`].
    pub fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(invalid("grid dimension differs from theta"));
        }
        let ny = grid.nyquist() as f64;
        let top = (self.j_max as f64).exp2();
        for &t in self.theta() {
            let shift = top * self.scale as f64 * t.abs() as f64;
            let eta = top * self.bump.support().1 * self.theta_norm();
            if shift >= ny || eta >= ny {
                return Err(invalid(format!(
                    "Ching truncation j_max={} overflows the Nyquist radius {} of the grid",
                    self.j_max,
                    grid.nyquist()
                )));
            }
        }
        Ok(())
    }

    fn profile(&self, j: usize, eta: &[f64]) -> f64 {
        self.bump.eval(norm(eta) / ((j as f64).exp2() * self.theta_norm()))
    }

    /// Indices `j` whose term is nonzero at `η`.
    pub fn active_terms(&self, eta: &[f64]) -> Vec<usize> {
        (0..=self.j_max).filter(|&j| self.profile(j, eta) != 0.0).collect()
    }

    fn shift(&self, j: usize) -> [f64; 2] {
        let f = (j as f64).exp2() * self.scale as f64;
        [f * self.theta[0] as f64, f * self.theta[1] as f64]
    }

    /// Lattice frequency `-2^j s θ` of term `j`.
    pub fn shift_frequency(&self, j: usize) -> [i64; 2] {
        let f = (1i64 << j) * self.scale as i64;
        [-f * self.theta[0], -f * self.theta[1]]
    }

    fn weight(&self, j: usize) -> f64 {
        (j as f64 * self.d).exp2()
    }
}

impl Symbol for ChingSymbol {
    fn dim(&self) -> usize {
        self.dim
    }

    fn order(&self) -> f64 {
        self.d
    }

    fn eval(&self, x: &[f64], eta: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=self.j_max {
            let a = self.profile(j, eta);
            if a == 0.0 {
                continue;
            }
            let s = self.shift(j);
            let phase = s[0] * x[0] + if self.dim == 2 { s[1] * x[1] } else { 0.0 };
            acc += Complex64::from_polar(self.weight(j) * a, -phase);
        }
        acc
    }

    fn column(&self, grid: &GridSpec, eta: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        let n = grid.points();
        for j in self.active_terms(eta) {
            let amp = self.weight(j) * self.profile(j, eta);
            let f = self.shift_frequency(j);
            let roots = crate::grid::roots_of_unity(n);
            let k0 = f[0].rem_euclid(n as i64) as usize;
            let k1 = f[1].rem_euclid(n as i64) as usize;
            for (i, v) in out.iter_mut().enumerate() {
                let idx = if self.dim == 1 {
                    (i * k0) % n
                } else {
                    ((i / n) * k0 + (i % n) * k1) % n
                };
                *v += roots[idx] * amp;
            }
        }
        out
    }

    fn separable_terms(&self) -> Option<usize> {
        Some(self.j_max + 1)
    }

    fn separable_term(&self, grid: &GridSpec, t: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = grid.points();
        let f = self.shift_frequency(t);
        let k0 = f[0].rem_euclid(n as i64) as usize;
        let k1 = f[1].rem_euclid(n as i64) as usize;
        let roots = crate::grid::roots_of_unity(n);
        let w = self.weight(t);
        let mx = (0..grid.len())
            .map(|i| {
                let idx = if self.dim == 1 {
                    (i * k0) % n
                } else {
                    ((i / n) * k0 + (i % n) * k1) % n
                };
                roots[idx] * w
            })
            .collect();
        let mu = (0..grid.len())
            .map(|i| Complex64::new(self.profile(t, &grid.frequency_vec(i)), 0.0))
            .collect();
        (mx, mu)
    }

    fn tdc_bound(&self) -> Option<f64> {
        let a1 = self.bump.support().1;
        let s = self.scale as f64;
        (s > a1).then(|| (a1 / (s - a1)).max(1.0))
    }

    fn describe(&self) -> String {
        let th: Vec<String> = self.theta().iter().map(|t| format!("{t:+}")).collect();
        format!(
            "ching:d={},theta={},jmax={},scale={},r={}",
            self.d,
            th.join(":"),
            self.j_max,
            self.scale,
            self.bump.zero_order()
        )
    }
}

/// Builds a Ching symbol and checks its truncation against `grid`.
pub fn ching_symbol(
    d: f64,
    theta: &[i64],
    bump: RadialBump,
    j_max: usize,
    grid: &GridSpec,
) -> Result<ChingSymbol> {
    let a = ChingSymbol::new(d, theta, bump, j_max)?;
    a.check_grid(grid)?;
    Ok(a)
}
