use serde::{Deserialize, Serialize};

use super::continuity::{continuity_sweep, SymbolFamily};
use super::{Environment, ExperimentReport, Series};
use crate::error::{invalid, Result};
use crate::frame::LpFrame;
use crate::grid::GridSpec;
use crate::growth::GrowthRule;
use crate::spaces::SpaceParams;
use crate::symbol::sigma_order_estimate;

/// Parameters of [`run_sigma_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SigmaParams {
    /// Orders `r` of the zero of `A` at radius 1.
    pub orders: Vec<u32>,
    pub eps: Vec<f64>,
    pub log2_points: u32,
    /// Smoothness values of the `H^s -> H^s` sweep.
    pub s_values: Vec<f64>,
    pub sweep_log2_points: Vec<u32>,
    pub rule: GrowthRule,
    /// Allowed distance of `σ̂` from `r`.
    pub sigma_tolerance: f64,
    /// Smoothness granularity of the onset check.
    pub shell: f64,
}

impl Default for SigmaParams {
    fn default() -> Self {
        Self {
            orders: vec![0, 1, 2],
            eps: vec![0.1, 0.05, 0.025, 0.0125],
            log2_points: 11,
            s_values: (0..=8).map(|i| -3.0 + 0.5 * f64::from(i)).collect(),
            sweep_log2_points: vec![7, 8, 9, 10, 11],
            rule: GrowthRule::default(),
            sigma_tolerance: 0.5,
            shell: 0.5,
        }
    }
}

/// Largest tested `s` whose `H^s -> H^s` sweep is flagged as blow-up.
fn onset(family: &SymbolFamily, p: &SigmaParams, frame: &LpFrame, rep: &mut ExperimentReport, tag: &str) -> Result<Option<f64>> {
    let cases: Vec<(SpaceParams, SpaceParams)> = p
        .s_values
        .iter()
        .map(|&s| {
            let h = SpaceParams::sobolev(s).with_frame(frame.clone());
            (h.clone(), h)
        })
        .collect();
    let res = continuity_sweep(family, &cases, 1, &p.sweep_log2_points, frame, 0, 0, 16, &p.rule)?;
    let mut found = None;
    let mut curve = Vec::new();
    for (&s, r) in p.s_values.iter().zip(&res) {
        let last = r.estimates.last().map_or(0.0, |e| e.estimate);
        rep.row(format!("{tag} H^{s} norm @ finest"), last, "power iteration + adversarial");
        let blow = r.analysis.verdict.is_blow_up();
        rep.row(format!("{tag} H^{s} blow-up"), if blow { 1.0 } else { 0.0 }, "growth rule");
        curve.push((s, if blow { 1.0 } else { 0.0 }));
        if blow {
            found = Some(found.map_or(s, |f: f64| f.max(s)));
        }
    }
    rep.series.push(Series {
        name: format!("{tag} blow-up"),
        x_label: "s".into(),
        y_label: "blow-up flag".into(),
        points: curve,
    });
    Ok(found)
}

/// `σ̂` for Ching symbols with a zero of order `r`, cross-checked against the
/// smoothness at which `H^s -> H^s` continuity breaks down.
pub fn run_sigma_estimate(p: &SigmaParams, frame: &LpFrame) -> Result<ExperimentReport> {
    if p.orders.is_empty() || p.s_values.is_empty() {
        return Err(invalid("sigma experiment needs orders and smoothness values"));
    }
    let spec = GridSpec::one_d(1usize << p.log2_points)?;
    let mut rep = ExperimentReport::new(
        "sigma",
        serde_json::to_value(p)?,
        Environment::new(1, vec![spec.points()], frame, vec![]),
    );
    for &r in &p.orders {
        let family = SymbolFamily::ching(0.0, r, 1);
        let a = family.build(&spec, frame)?;
        let fit = sigma_order_estimate(&a, [0, 0], &p.eps, &spec)?;
        rep.row(format!("sigma_hat r={r}"), fit.sigma_hat, "slope(log value, log eps) - n/2 + |alpha|");
        rep.verdict(
            format!("sigma r={r}"),
            (fit.sigma_hat - f64::from(r)).abs() <= p.sigma_tolerance,
            format!("σ̂ = {:.3}", fit.sigma_hat),
        );
        rep.series.push(Series {
            name: format!("annulus values r={r}"),
            x_label: "eps".into(),
            y_label: "sup value".into(),
            points: fit.values.clone(),
        });
        let tag = format!("r={r}");
        let on = onset(&family, p, frame, &mut rep, &tag)?;
        let target = -f64::from(r);
        rep.row(format!("onset r={r}"), on.unwrap_or(f64::NEG_INFINITY), "max s with blow-up");
        rep.verdict(
            format!("onset r={r}"),
            on.is_some_and(|s| (s - target).abs() <= p.shell + 1e-12),
            format!("onset {on:?}, expected near {target}"),
        );
    }
    let tdc = SymbolFamily::ching(0.0, 0, 2);
    let a = tdc.build(&spec, frame)?;
    let fit = sigma_order_estimate(&a, [0, 0], &p.eps, &spec)?;
    rep.row("sigma_hat tdc", fit.sigma_hat, "strict twisted diagonal control");
    let on = onset(&tdc, p, frame, &mut rep, "tdc")?;
    rep.verdict(
        "negative control: strict tdc",
        fit.sigma_hat == f64::INFINITY && on.is_none(),
        format!("σ̂ = {}, onset {on:?}", fit.sigma_hat),
    );
    Ok(rep)
}
