//! Modulation functions and the Littlewood–Paley frames built from them.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, PdError, Result};
use crate::grid::{fft_forward, fft_inverse, GridFunction, GridSpec};
use crate::smooth;

/// Shape of the radial transition between the plateau and the zero set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Integrated `exp(-1/(t(1-t)))` bump; C∞.
    #[default]
    Bump,
    /// Septic smoothstep `35t⁴ - 84t⁵ + 70t⁶ - 20t⁷`; C³ only, kept as a
    /// deliberately rougher alternative for frame-equivalence probes.
    Septic,
}

impl Profile {
    fn ramp(self, t: f64) -> f64 {
        match self {
            Profile::Bump => smooth::smoothstep(t),
            Profile::Septic => {
                let t = t.clamp(0.0, 1.0);
                let t4 = t.powi(4);
                t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t)
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "bump" | "smooth" => Ok(Profile::Bump),
            "septic" => Ok(Profile::Septic),
            other => Err(invalid(format!("unknown frame profile `{other}`"))),
        }
    }
}

/// Radial `ψ` with `ψ = 1` on `|ξ| <= r` and `ψ = 0` on `|ξ| >= R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationFunction {
    r: f64,
    #[serde(rename = "R")]
    outer: f64,
    #[serde(default)]
    profile: Profile,
}

impl ModulationFunction {
    pub fn new(r: f64, outer: f64) -> Result<Self> {
        Self::with_profile(r, outer, Profile::Bump)
    }

    pub fn with_profile(r: f64, outer: f64, profile: Profile) -> Result<Self> {
        if !(r > 0.0) || !(r < outer) {
            return Err(invalid(format!("modulation radii need 0 < r < R, got r={r}, R={outer}")));
        }
        if outer < 1.0 {
            return Err(invalid(format!("outer radius R must be >= 1, got {outer}")));
        }
        Ok(Self { r, outer, profile })
    }

    pub fn inner(&self) -> f64 {
        self.r
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    /// `ψ` as a function of `|ξ|`.
    pub fn radial(&self, rho: f64) -> f64 {
        if rho <= self.r {
            1.0
        } else if rho >= self.outer {
            0.0
        } else {
            self.profile.ramp((self.outer - rho) / (self.outer - self.r))
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        self.radial(norm(xi))
    }

    /// `ψ(2^{-m}ξ)` for real `m`.
    pub fn dilated(&self, m: f64, xi: &[f64]) -> f64 {
        self.radial(norm(xi) * (-m).exp2())
    }

    /// `φ(ξ) = ψ(ξ) - ψ(2ξ)`.
    pub fn corona(&self, rho: f64) -> f64 {
        self.radial(rho) - self.radial(2.0 * rho)
    }

    /// Smallest integer `h >= 2` with `2R < r·2^h`.
    pub fn minimal_separation(&self) -> u32 {
        let mut h = 2;
        while 2.0 * self.outer >= self.r * f64::from(1u32 << h) {
            h += 1;
        }
        h
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Which multiplier [`block_project`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockKind {
    /// `Φ_j(D)`: `ψ` for `j = 0`, `φ(2^{-j}D)` otherwise.
    Corona,
    /// `ψ(2^{-j}D)`.
    Ball,
}

/// A Littlewood–Paley partition generated by one modulation function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpFrame {
    psi: ModulationFunction,
    h: u32,
    #[serde(skip)]
    cache: Arc<Mutex<HashMap<(GridSpec, usize), Arc<Vec<Vec<f64>>>>>>,
}

impl PartialEq for LpFrame {
    fn eq(&self, other: &Self) -> bool {
        self.psi == other.psi && self.h == other.h
    }
}

impl LpFrame {
    pub fn new(psi: ModulationFunction, h: u32) -> Result<Self> {
        if h < 2 {
            return Err(invalid(format!("separation h must be >= 2, got {h}")));
        }
        if !(2.0 * psi.outer() < psi.inner() * f64::from(1u32 << h)) {
            return Err(invalid(format!(
                "separation h={h} violates 2R < r·2^h for r={}, R={}",
                psi.inner(),
                psi.outer()
            )));
        }
        Ok(Self {
            psi,
            h,
            cache: Arc::default(),
        })
    }

    /// `(r, R, h) = (1, 2, 3)`.
    pub fn standard() -> Self {
        Self::new(ModulationFunction::new(1.0, 2.0).expect("valid radii"), 3).expect("valid frame")
    }

    pub fn psi(&self) -> &ModulationFunction {
        &self.psi
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    /// `Φ_j` evaluated at `|ξ| = rho`.
    pub fn block_radial(&self, j: usize, rho: f64) -> f64 {
        if j == 0 {
            self.psi.radial(rho)
        } else {
            self.psi.corona(rho / f64::from(1u32 << j.min(31)) )
        }
    }

    pub fn block(&self, j: usize, xi: &[f64]) -> f64 {
        self.block_radial(j, norm(xi))
    }

    /// `ψ(2^{-j}ξ)` at `|ξ| = rho`, zero for `j < 0`.
    pub fn ball_radial(&self, j: i64, rho: f64) -> f64 {
        if j < 0 {
            0.0
        } else {
            self.psi.radial(rho / (j as f64).exp2())
        }
    }

    /// Smallest `J` such that `ψ(2^{-J}η) = 1` for every representable `η`;
    /// the partition `Φ_0 + … + Φ_J` then sums to one on the grid.
    pub fn covering_index(&self, spec: &GridSpec) -> usize {
        let top = spec.max_frequency_norm();
        let mut j = 0;
        while self.psi.inner() * (j as f64).exp2() < top {
            j += 1;
        }
        j
    }

    /// Corona bounds of `supp Φ_k`: `r2^{k-1} <= |ξ| <= R2^k` (`k >= 1`).
    pub fn corona_bounds(&self, k: usize) -> (f64, f64) {
        if k == 0 {
            (0.0, self.psi.outer())
        } else {
            let s = (k as f64).exp2();
            (self.psi.inner() * s / 2.0, self.psi.outer() * s)
        }
    }

    /// `R_h = r/2 - R·2^{-h}`.
    pub fn inner_corona_factor(&self) -> f64 {
        self.psi.inner() / 2.0 - self.psi.outer() / f64::from(1u32 << self.h)
    }

    /// Block multipliers `Φ_0..Φ_{j_max}` tabulated on the lattice of `spec`.
    /// Fails when the partition would not sum to one at every frequency.
    pub fn lp_blocks(&self, spec: &GridSpec, j_max: usize) -> Result<Arc<Vec<Vec<f64>>>> {
        let need = self.covering_index(spec);
        if j_max < need {
            return Err(PdError::Precondition(format!(
                "j_max={j_max} does not cover the grid band (need >= {need})"
            )));
        }
        Ok(self.blocks_unchecked(spec, j_max))
    }

    pub(crate) fn blocks_unchecked(&self, spec: &GridSpec, j_max: usize) -> Arc<Vec<Vec<f64>>> {
        let key = (*spec, j_max);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let tables: Vec<Vec<f64>> = (0..=j_max)
            .map(|j| {
                (0..spec.len())
                    .map(|i| self.block_radial(j, spec.frequency_norm(i)))
                    .collect()
            })
            .collect();
        let tables = Arc::new(tables);
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&tables));
        tables
    }

    /// Blocks covering the grid band.
    pub fn grid_blocks(&self, spec: &GridSpec) -> Arc<Vec<Vec<f64>>> {
        self.blocks_unchecked(spec, self.covering_index(spec))
    }
}

/// `Φ_j(D)u` (corona) or `ψ(2^{-j}D)u` (ball).
pub fn block_project(u: &GridFunction, frame: &LpFrame, j: usize, kind: BlockKind) -> GridFunction {
    let c = fft_forward(u);
    let out = match kind {
        BlockKind::Corona => c.multiply(|xi| frame.block(j, xi)),
        BlockKind::Ball => c.multiply(|xi| frame.ball_radial(j as i64, norm(xi))),
    };
    fft_inverse(&out)
}

/// All corona blocks `u_0..u_J` of `u` for the covering `J`.
pub fn corona_blocks(u: &GridFunction, frame: &LpFrame) -> Vec<GridFunction> {
    let spec = u.spec();
    let c = fft_forward(u);
    let blocks = frame.grid_blocks(&spec);
    blocks
        .iter()
        .map(|tab| {
            let mut d = c.clone();
            d.coeffs_mut()
                .iter_mut()
                .zip(tab.iter())
                .for_each(|(v, &m)| *v *= m);
            fft_inverse(&d)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::random_grid_function;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn plateau_values() {
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        assert_eq!(psi.radial(0.5), 1.0);
        assert_eq!(psi.radial(1.0), 1.0);
        assert_eq!(psi.radial(3.0), 0.0);
        assert_eq!(psi.radial(2.0), 0.0);
        assert!(psi.radial(1.5) > 0.0 && psi.radial(1.5) < 1.0);
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(ModulationFunction::new(2.0, 2.0).is_err());
        assert!(ModulationFunction::new(3.0, 2.0).is_err());
        assert!(ModulationFunction::new(0.3, 0.8).is_err());
        assert!(ModulationFunction::new(0.0, 2.0).is_err());
    }

    #[test]
    fn minimal_h_for_default_radii() {
        // 2R = 4 < 1·2^h forces h >= 3
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        assert_eq!(psi.minimal_separation(), 3);
        assert!(LpFrame::new(psi, 2).is_err());
        assert!(LpFrame::new(psi, 3).is_ok());
    }

    #[test]
    fn corona_function_is_nonnegative() {
        let psi = ModulationFunction::new(1.0, 2.0).unwrap();
        for i in 0..=4000 {
            let rho = i as f64 * 0.001;
            assert!(psi.corona(rho) >= 0.0);
        }
    }

    #[test]
    fn telescoping_sum() {
        let frame = LpFrame::standard();
        let psi = frame.psi();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rho: f64 = rng.gen_range(0.0..300.0);
            for m in 1..10usize {
                let sum: f64 = (0..=m).map(|k| frame.block_radial(k, rho)).sum();
                let expect = psi.radial(rho / (m as f64).exp2());
                assert!((sum - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_support_in_corona() {
        let frame = LpFrame::standard();
        for k in 1..8usize {
            let (lo, hi) = frame.corona_bounds(k);
            for i in 0..2000 {
                let rho = i as f64 * 0.25;
                if rho < lo || rho > hi {
                    assert_eq!(frame.block_radial(k, rho), 0.0, "k={k}, rho={rho}");
                }
            }
        }
    }

    #[test]
    fn blocks_at_origin_and_at_three() {
        let frame = LpFrame::standard();
        let g = GridSpec::one_d(64).unwrap();
        let blocks = frame.lp_blocks(&g, frame.covering_index(&g)).unwrap();
        assert_eq!(blocks[0][0], 1.0);
        assert!(blocks[1..].iter().all(|b| b[0] == 0.0));
        let i3 = g.frequency_index(&[3]);
        for (j, b) in blocks.iter().enumerate() {
            if j != 1 && j != 2 {
                assert_eq!(b[i3], 0.0, "block {j} active at |η|=3");
            }
        }
        assert!(blocks[1][i3] > 0.0 && blocks[2][i3] > 0.0);
    }

    #[test]
    fn partition_of_unity_on_lattice() {
        let frame = LpFrame::standard();
        let g = GridSpec::new(2, 32).unwrap();
        let j = frame.covering_index(&g);
        let blocks = frame.lp_blocks(&g, j).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let i = rng.gen_range(0..g.len());
            let sum: f64 = blocks.iter().map(|b| b[i]).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!(frame.lp_blocks(&g, j - 1).is_err());
    }

    #[test]
    fn block_projection_of_constant() {
        let frame = LpFrame::standard();
        let g = GridSpec::one_d(32).unwrap();
        let u = GridFunction::from_fn(g, |_| num_complex::Complex64::new(1.0, 0.0));
        assert!(block_project(&u, &frame, 0, BlockKind::Corona).max_abs_diff(&u) < 1e-14);
        for j in 1..5 {
            assert!(block_project(&u, &frame, j, BlockKind::Corona).sup_norm() < 1e-14);
        }
    }

    #[test]
    fn reconstruction_and_ball_telescoping() {
        let frame = LpFrame::standard();
        let g = GridSpec::one_d(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_grid_function(g, &mut rng);
        let blocks = corona_blocks(&u, &frame);
        let mut acc = GridFunction::zeros(g);
        for (m, b) in blocks.iter().enumerate() {
            acc = acc.add(b).unwrap();
            let ball = block_project(&u, &frame, m, BlockKind::Ball);
            assert!(ball.max_abs_diff(&acc) < 1e-12 * u.sup_norm());
        }
        assert!(acc.max_abs_diff(&u) < 1e-12 * u.sup_norm());
    }
}
