use serde::{Deserialize, Serialize};

use super::apply::apply;
use super::engine::{embed_spectrum, Bilinear};
use crate::corpus::TrigPolynomial;
use crate::error::{invalid, Result};
use crate::frame::ModulationFunction;
use crate::grid::{fft_forward, lp_norm, GridFunction, GridSpec};
use crate::growth::{classify_growth, GrowthAnalysis, GrowthRule};
use crate::symbol::{modulate_symbol, SymbolRef};

/// `OP(ψ(2^{-m}D_x)a(x,η)ψ(2^{-m}η))u`.
pub fn vfm_apply(a: SymbolRef, u: &GridFunction, psi: ModulationFunction, m: u32) -> Result<GridFunction> {
    let b = modulate_symbol(a, m, psi, u.spec());
    apply(&b, u)
}

/// Smallest `m` with `ψ(2^{-m}·) = 1` on the whole lattice of `spec`.
pub fn saturation_index(psi: &ModulationFunction, spec: &GridSpec) -> u32 {
    let top = spec.max_frequency_norm();
    let mut m = 0;
    while psi.inner() * f64::from(m).exp2() < top {
        m += 1;
    }
    m
}

/// Per-`ψ` record of a modulation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiTrace {
    pub psi: ModulationFunction,
    pub tag: String,
    /// `‖b_m(x,D)u‖_2` for `m = 0..=m_max`.
    pub l2_norms: Vec<f64>,
    /// `sup|b_m(x,D)u - b_{m_max}(x,D)u|`.
    pub distance_to_last: Vec<f64>,
    /// First `m` from which the output no longer changes (exactly).
    pub stable_from: Option<u32>,
}

/// Result of [`vfm_limit`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VfmTrace {
    pub traces: Vec<PsiTrace>,
    pub m_sat: u32,
    pub cross_psi_deviation: f64,
    #[serde(skip)]
    pub saturated: Option<GridFunction>,
    #[serde(skip)]
    pub outputs: Vec<Vec<GridFunction>>,
}

/// Modulated outputs for every `ψ` and `m = 0..=m_max`, the saturation
/// index, and the spread of the saturated values over the `ψ` family.
pub fn vfm_limit(
    a: SymbolRef,
    u: &GridFunction,
    psis: &[ModulationFunction],
    m_max: u32,
) -> Result<VfmTrace> {
    if psis.len() < 2 {
        return Err(invalid("vfm_limit needs at least two modulation functions"));
    }
    let spec = u.spec();
    let m_sat = psis.iter().map(|p| saturation_index(p, &spec)).max().unwrap_or(0);
    let m_top = m_max.max(m_sat);
    let engine = Bilinear::new(a, u)?;
    let mut traces = Vec::new();
    let mut outputs = Vec::new();
    for (i, psi) in psis.iter().enumerate() {
        let outs: Vec<GridFunction> = (0..=m_top)
            .map(|m| {
                let s = f64::from(m);
                let p = *psi;
                engine.values(&move |xi| p.dilated(s, xi), &move |eta| p.dilated(s, eta))
            })
            .collect();
        let last = outs.last().expect("nonempty").clone();
        let l2: Vec<f64> = outs.iter().map(|o| lp_norm(o, 2.0)).collect::<Result<_>>()?;
        let dist: Vec<f64> = outs.iter().map(|o| o.max_abs_diff(&last)).collect();
        let stable_from = (0..=m_top)
            .rev()
            .take_while(|&m| dist[m as usize] == 0.0)
            .last();
        traces.push(PsiTrace {
            psi: *psi,
            tag: format!("psi{}:r={},R={}", i, psi.inner(), psi.outer()),
            l2_norms: l2,
            distance_to_last: dist,
            stable_from,
        });
        outputs.push(outs);
    }
    let sats: Vec<&GridFunction> = outputs.iter().map(|o| o.last().expect("nonempty")).collect();
    let mut dev: f64 = 0.0;
    for p in &sats {
        for q in &sats {
            dev = dev.max(p.max_abs_diff(q));
        }
    }
    Ok(VfmTrace {
        traces,
        m_sat,
        cross_psi_deviation: dev,
        saturated: Some(sats[0].clone()),
        outputs,
    })
}

/// Saturated vfm values of one continuum input across refined grids.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementTrace {
    pub points: Vec<usize>,
    pub m_sat: Vec<u32>,
    pub cross_psi_deviation: Vec<f64>,
    pub saturated_l2: Vec<f64>,
    /// `‖y_{i+1} - y_i‖_2/‖y_{i+1}‖_2` with `y_i` read on the finer grid.
    pub relative_change: Vec<f64>,
    pub growth: GrowthAnalysis,
}

/// Samples `u` on each grid, runs [`vfm_limit`] there with the symbol built
/// by `symbol_for`, and compares the saturated values across grids.
pub fn vfm_refine(
    symbol_for: &dyn Fn(GridSpec) -> Result<SymbolRef>,
    u: &TrigPolynomial,
    grids: &[GridSpec],
    psis: &[ModulationFunction],
    rule: &GrowthRule,
) -> Result<RefinementTrace> {
    let mut sats = Vec::new();
    let mut m_sat = Vec::new();
    let mut dev = Vec::new();
    for g in grids {
        let a = symbol_for(*g)?;
        let t = vfm_limit(a, &u.sample(*g), psis, 0)?;
        m_sat.push(t.m_sat);
        dev.push(t.cross_psi_deviation);
        sats.push(t.saturated.expect("saturated output"));
    }
    let l2: Vec<f64> = sats.iter().map(|s| lp_norm(s, 2.0)).collect::<Result<_>>()?;
    let mut rel = Vec::new();
    for w in sats.windows(2) {
        let fine = w[1].spec();
        let coarse = crate::grid::fft_inverse(&embed_spectrum(&fft_forward(&w[0]), fine));
        let diff = lp_norm(&coarse.sub(&w[1])?, 2.0)?;
        let base = lp_norm(&w[1], 2.0)?;
        rel.push(if base > 0.0 { diff / base } else { diff });
    }
    let points: Vec<usize> = grids.iter().map(|g| g.points()).collect();
    let growth = classify_growth(&points, &l2, rule);
    Ok(RefinementTrace {
        points,
        m_sat,
        cross_psi_deviation: dev,
        saturated_l2: l2,
        relative_change: rel,
        growth,
    })
}
