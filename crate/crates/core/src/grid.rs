//! The discrete torus `[0, 2π)^n` and its Fourier coefficients.
//!
//! Grid points are `x_k = 2πk/N` per axis and frequencies are integer
//! vectors with components in `[-N/2, N/2)`. Both are flattened row-major
//! with the same index layout the FFT uses, so the coefficient at flat index
//! `i` belongs to the frequency `GridSpec::frequency(i)`.
//!
//! The spectral convention is `u(x) = Σ_η c_η e^{ix·η}`; `fft_forward`
//! returns the `c_η` and `fft_inverse` evaluates the sum on the grid.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{PdError, Result};

/// Shape of a uniform periodic grid on `[0, 2π)^n`, `n ∈ {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(PdError::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(PdError::InvalidGrid(format!(
                "points per axis must be a power of two >= 8, got {points}"
            )));
        }
        Ok(Self { dim, points })
    }

    pub fn one_d(points: usize) -> Result<Self> {
        Self::new(1, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points as f64
    }

    /// Quadrature weight of one cell, `(2π/N)^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Largest representable frequency component, `N/2 - 1`; `-N/2` is the
    /// Nyquist row.
    pub fn nyquist(&self) -> i64 {
        (self.points / 2) as i64
    }

    /// Largest Euclidean norm of any representable frequency.
    pub fn max_frequency_norm(&self) -> f64 {
        self.nyquist() as f64 * (self.dim as f64).sqrt()
    }

    fn axis_frequency(&self, i: usize) -> i64 {
        let n = self.points;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    fn split(&self, idx: usize) -> [usize; 2] {
        if self.dim == 1 {
            [idx, 0]
        } else {
            [idx / self.points, idx % self.points]
        }
    }

    /// Integer frequency vector at flat index `idx` (unused components 0).
    pub fn frequency(&self, idx: usize) -> [i64; 2] {
        let [a, b] = self.split(idx);
        if self.dim == 1 {
            [self.axis_frequency(a), 0]
        } else {
            [self.axis_frequency(a), self.axis_frequency(b)]
        }
    }

    /// Frequency as a real vector slice of length `dim`.
    pub fn frequency_vec(&self, idx: usize) -> Vec<f64> {
        let f = self.frequency(idx);
        f[..self.dim].iter().map(|&k| k as f64).collect()
    }

    pub fn frequency_norm(&self, idx: usize) -> f64 {
        let f = self.frequency(idx);
        ((f[0] * f[0] + f[1] * f[1]) as f64).sqrt()
    }

    /// Flat index of a frequency, wrapped into the representable range.
    pub fn frequency_index(&self, freq: &[i64]) -> usize {
        if self.dim == 1 {
            self.axis_index(freq[0])
        } else {
            self.axis_index(freq[0]) * self.points + self.axis_index(freq[1])
        }
    }

    /// Whether a frequency lies in `[-N/2, N/2)^n` without wrapping.
    pub fn represents(&self, freq: &[i64]) -> bool {
        let h = self.nyquist();
        freq[..self.dim].iter().all(|&k| (-h..h).contains(&k))
    }

    /// Coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [a, b] = self.split(idx);
        let h = self.spacing();
        if self.dim == 1 {
            [a as f64 * h, 0.0]
        } else {
            [a as f64 * h, b as f64 * h]
        }
    }

    pub fn point_vec(&self, idx: usize) -> Vec<f64> {
        self.point(idx)[..self.dim].to_vec()
    }

    /// Flat index of a grid point if `x` coincides with one (mod 2π).
    pub fn point_index(&self, x: &[f64]) -> Option<usize> {
        let h = self.spacing();
        let mut idx = 0usize;
        for &c in &x[..self.dim] {
            let pos = c / h;
            let r = pos.round();
            if (pos - r).abs() > 1e-9 {
                return None;
            }
            let k = (r as i64).rem_euclid(self.points as i64) as usize;
            idx = idx * self.points + k;
        }
        Some(idx)
    }

    /// Torus offset `x_idx` represented in `[-π, π)` per axis, as a norm.
    pub fn torus_norm(&self, idx: usize) -> f64 {
        let [a, b] = self.split(idx);
        let h = self.spacing();
        let wrap = |i: usize| self.axis_frequency(i) as f64 * h;
        if self.dim == 1 {
            wrap(a).abs()
        } else {
            wrap(a).hypot(wrap(b))
        }
    }

    /// Flat index of `a - b` for two flat point (or frequency) indices.
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        let n = self.points;
        let [a0, a1] = self.split(a);
        let [b0, b1] = self.split(b);
        if self.dim == 1 {
            (a0 + n - b0) % n
        } else {
            ((a0 + n - b0) % n) * n + (a1 + n - b1) % n
        }
    }

    /// Flat index of `a + b`.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let n = self.points;
        let [a0, a1] = self.split(a);
        let [b0, b1] = self.split(b);
        if self.dim == 1 {
            (a0 + b0) % n
        } else {
            ((a0 + b0) % n) * n + (a1 + b1) % n
        }
    }

    /// `(x_idx · η_idx)·N/(2π)` reduced mod N, so that
    /// `e^{i x·η} = ω^{phase_index}` with `ω = e^{2πi/N}`.
    pub fn phase_index(&self, x_idx: usize, eta_idx: usize) -> usize {
        let n = self.points;
        let [a0, a1] = self.split(x_idx);
        let [b0, b1] = self.split(eta_idx);
        if self.dim == 1 {
            (a0 * b0) % n
        } else {
            (a0 * b0 + a1 * b1) % n
        }
    }

    /// The grid with twice as many points per axis.
    pub fn refined(&self) -> Self {
        Self {
            dim: self.dim,
            points: self.points * 2,
        }
    }
}

/// Table of `e^{2πik/N}`, `k = 0..N`.
pub fn roots_of_unity(points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / points as f64))
        .collect()
}

/// Complex samples on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(PdError::ShapeMismatch(format!(
                "expected {} samples, got {}",
                spec.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(PdError::Format("non-finite sample".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..spec.len())
            .map(|i| f(&spec.point(i)[..spec.dim()]))
            .collect();
        Self { spec, values }
    }

    pub(crate) fn from_raw(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        Self { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_raw(self.spec, self.values.iter().map(|v| v * factor).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(PdError::ShapeMismatch("grid specs differ".into()));
        }
        Ok(Self::from_raw(
            self.spec,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Maximum pointwise distance to another function on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.spec, other.spec, "grid specs differ");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    pub fn interpolate(&self, x: &[f64]) -> Complex64 {
        if let Some(i) = self.spec.point_index(x) {
            return self.values[i];
        }
        let c = fft_forward(self);
        c.evaluate(x)
    }
}

/// Fourier coefficients `c_η` indexed like [`GridSpec::frequency`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(PdError::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                spec.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(PdError::Format("non-finite coefficient".into()));
        }
        Ok(Self { spec, coeffs })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            coeffs: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    /// Single mode `e^{ix·η}` with the given integer frequency.
    pub fn mode(spec: GridSpec, freq: &[i64]) -> Self {
        let mut s = Self::zeros(spec);
        s.coeffs[spec.frequency_index(freq)] = Complex64::new(1.0, 0.0);
        s
    }

    pub(crate) fn from_raw(spec: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), spec.len());
        Self { spec, coeffs }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, freq: &[i64]) -> Complex64 {
        self.coeffs[self.spec.frequency_index(freq)]
    }

    /// Multiplies every coefficient by `m(η)`.
    pub fn multiply(&self, m: impl Fn(&[f64]) -> f64) -> Self {
        let spec = self.spec;
        Self::from_raw(
            spec,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    if c == Complex64::new(0.0, 0.0) {
                        c
                    } else {
                        c * m(&spec.frequency_vec(i))
                    }
                })
                .collect(),
        )
    }

    /// Direct evaluation of `Σ c_η e^{ix·η}` at one point.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let f = self.spec.frequency(i);
            let phase = x[0] * f[0] as f64 + if self.spec.dim() == 2 { x[1] * f[1] as f64 } else { 0.0 };
            acc += c * Complex64::from_polar(1.0, phase);
        }
        acc
    }

    /// `Σ |c_η|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalised in-place transform over all axes of a flat array.
pub(crate) fn fft_in_place(spec: GridSpec, data: &mut [Complex64], inverse: bool) {
    let n = spec.points();
    let fft = plan(n, inverse);
    if spec.dim() == 1 {
        fft.process(data);
        return;
    }
    // rows
    fft.process(data);
    // columns
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for col in 0..n {
        for row in 0..n {
            column[row] = data[row * n + col];
        }
        fft.process(&mut column);
        for row in 0..n {
            data[row * n + col] = column[row];
        }
    }
}

/// Fourier coefficients of the trigonometric interpolant of `u`.
pub fn fft_forward(u: &GridFunction) -> SpectralFunction {
    let spec = u.spec();
    let mut data = u.values().to_vec();
    fft_in_place(spec, &mut data, false);
    let scale = 1.0 / spec.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    SpectralFunction::from_raw(spec, data)
}

/// Evaluates `Σ_η c_η e^{ix·η}` at all grid points.
pub fn fft_inverse(c: &SpectralFunction) -> GridFunction {
    let spec = c.spec();
    let mut data = c.coeffs().to_vec();
    fft_in_place(spec, &mut data, true);
    GridFunction::from_raw(spec, data)
}

/// Riemann-sum (quasi-)norm `((2π/N)^n Σ|u|^p)^{1/p}`; `p = ∞` gives the max.
pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    lp_norm_of(u.spec(), u.values().iter().map(|v| v.norm()), p)
}

/// [`lp_norm`] over precomputed moduli.
pub fn lp_norm_of(spec: GridSpec, moduli: impl Iterator<Item = f64>, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(PdError::InvalidParameter(format!("p must be > 0, got {p}")));
    }
    if p.is_infinite() {
        return Ok(moduli.fold(0.0, f64::max));
    }
    let sum: f64 = moduli.map(|m| m.powf(p)).sum();
    Ok((spec.cell_volume() * sum).powf(1.0 / p))
}

/// `((2π)^n Σ_η (1+|η|²)^s |c_η|²)^{1/2}`.
pub fn sobolev_norm(c: &SpectralFunction, s: f64) -> f64 {
    let spec = c.spec();
    let sum: f64 = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let r2 = spec.frequency_norm(i).powi(2);
            (1.0 + r2).powf(s) * v.norm_sqr()
        })
        .sum();
    ((2.0 * PI).powi(spec.dim() as i32) * sum).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::random_grid_function;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(1, 12).is_err());
        assert!(GridSpec::new(1, 4).is_err());
        assert!(GridSpec::new(3, 16).is_err());
        assert!(GridSpec::new(2, 16).is_ok());
    }

    #[test]
    fn frequency_layout() {
        let g = GridSpec::one_d(8).unwrap();
        let f: Vec<i64> = (0..8).map(|i| g.frequency(i)[0]).collect();
        assert_eq!(f, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.frequency_index(&[-1]), 7);
        let g2 = GridSpec::new(2, 8).unwrap();
        let idx = g2.frequency_index(&[1, -2]);
        assert_eq!(g2.frequency(idx), [1, -2]);
    }

    #[test]
    fn constant_has_only_zero_mode() {
        let g = GridSpec::one_d(16).unwrap();
        let u = GridFunction::from_fn(g, |_| c(1.0));
        let s = fft_forward(&u);
        for (i, v) in s.coeffs().iter().enumerate() {
            let expect = if i == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expect)).norm() < 1e-15);
        }
    }

    #[test]
    fn pure_mode_lands_on_its_frequency() {
        let g = GridSpec::one_d(16).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[0]));
        let s = fft_forward(&u);
        assert!((s.coeff(&[3]) - c(1.0)).norm() < 1e-14);
        let rest: f64 = s.energy() - 1.0;
        assert!(rest.abs() < 1e-13);
    }

    #[test]
    fn inverse_of_delta() {
        let g = GridSpec::one_d(16).unwrap();
        let u = fft_inverse(&SpectralFunction::mode(g, &[0]));
        assert!(u.values().iter().all(|v| (v - c(1.0)).norm() < 1e-15));

        let g2 = GridSpec::new(2, 8).unwrap();
        let u = fft_inverse(&SpectralFunction::mode(g2, &[1, 0]));
        let expect = GridFunction::from_fn(g2, |x| Complex64::from_polar(1.0, x[0]));
        assert!(u.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn inverse_agrees_with_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GridSpec::new(2, 8).unwrap();
        let u = random_grid_function(g, &mut rng);
        let s = fft_forward(&u);
        for i in [0, 5, 17, 63] {
            let x = g.point_vec(i);
            assert!((s.evaluate(&x) - u.values()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn lp_norm_of_constant() {
        let g = GridSpec::one_d(32).unwrap();
        let u = GridFunction::from_fn(g, |_| c(1.0));
        for p in [0.5, 1.0, 2.0, 3.0] {
            let expect = (2.0 * PI).powf(1.0 / p);
            assert!((lp_norm(&u, p).unwrap() - expect).abs() < 1e-12);
        }
        assert_eq!(lp_norm(&u, f64::INFINITY).unwrap(), 1.0);
        assert!(lp_norm(&u, 0.0).is_err());
        assert!(lp_norm(&u, -1.0).is_err());
    }

    #[test]
    fn sobolev_single_modes() {
        let g = GridSpec::one_d(16).unwrap();
        let d0 = SpectralFunction::mode(g, &[0]);
        assert!((sobolev_norm(&d0, 2.5) - (2.0 * PI).sqrt()).abs() < 1e-12);
        let d3 = SpectralFunction::mode(g, &[3]);
        assert!((sobolev_norm(&d3, 1.0) - (2.0 * PI * 10.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn interpolation_off_grid() {
        let g = GridSpec::one_d(16).unwrap();
        let u = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 2.0 * x[0]));
        let v = u.interpolate(&[0.123]);
        assert!((v - Complex64::from_polar(1.0, 0.246)).norm() < 1e-13);
    }
}
