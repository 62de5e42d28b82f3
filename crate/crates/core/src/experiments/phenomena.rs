use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Environment, ExperimentReport, Series};
use crate::error::{invalid, Result};
use crate::frame::LpFrame;
use crate::grid::{fft_forward, sobolev_norm, GridFunction, GridSpec, SpectralFunction};
use crate::operator::apply;
use crate::symbol::least_squares_slope as fit;
use crate::symbol::{ChingSymbol, RadialBump};

fn lacunary(spec: GridSpec, terms: impl Iterator<Item = (i64, Complex64)>) -> GridFunction {
    let mut c = SpectralFunction::zeros(spec);
    for (f, w) in terms {
        let i = spec.frequency_index(&[f]);
        c.coeffs_mut()[i] += w;
    }
    crate::grid::fft_inverse(&c)
}

fn spectral_fraction(u: &GridFunction, keep: impl Fn(i64) -> bool) -> f64 {
    let c = fft_forward(u);
    let spec = u.spec();
    let total = c.energy();
    let part: f64 = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(spec.frequency(*i)[0]))
        .map(|(_, v)| v.norm_sqr())
        .sum();
    if total > 0.0 {
        part / total
    } else {
        0.0
    }
}

/// Parameters of [`run_counterexample`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleParams {
    pub d: f64,
    pub n_list: Vec<u32>,
    pub log2_points: u32,
    pub tolerance: f64,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self {
            d: 0.0,
            n_list: vec![2, 3, 4],
            log2_points: 18,
            tolerance: 1e-10,
        }
    }
}

/// `c_N = (1/ln N)·Σ_{j=N}^{N²} 1/j`.
pub fn harmonic_coefficient(n: u32) -> f64 {
    let s: f64 = (n..=n * n).map(|j| 1.0 / f64::from(j)).sum();
    s / f64::from(n).ln()
}

/// `v_N = v·Σ_{j=N}^{N²} e^{i2^jx}/(j2^{jd} ln N)` with `v ≡ 1`.
pub fn counterexample_input(spec: GridSpec, n: u32, d: f64) -> GridFunction {
    let ln = f64::from(n).ln();
    lacunary(
        spec,
        (n..=n * n).map(|j| {
            let w = 1.0 / (f64::from(j) * (f64::from(j) * d).exp2() * ln);
            (1i64 << j, Complex64::new(w, 0.0))
        }),
    )
}

/// Unboundedness of the Ching operator `a_θ` on `H^d`: the exact identity
/// `a_θ(x,D)v_N = c_N·v` and the growth of `‖a_θv_N‖_{L₂}/‖v_N‖_{H^d}`.
pub fn run_counterexample(p: &CounterexampleParams) -> Result<ExperimentReport> {
    if p.n_list.is_empty() || p.n_list.iter().any(|&n| n < 2) {
        return Err(invalid("counterexample needs N >= 2"));
    }
    let spec = GridSpec::one_d(1usize << p.log2_points)?;
    let top = p.n_list.iter().map(|n| n * n).max().unwrap_or(4) as usize;
    let a = crate::symbol::ching_symbol(p.d, &[1], RadialBump::standard(), top, &spec)?;
    let mut rep = ExperimentReport::new(
        "counterexample",
        serde_json::to_value(p)?,
        Environment::new(1, vec![spec.points()], &LpFrame::standard(), vec![]),
    );
    let one = GridFunction::from_fn(spec, |_| Complex64::new(1.0, 0.0));
    let mut ratios = Vec::new();
    let mut worst: f64 = 0.0;
    let mut control = Vec::new();
    for &n in &p.n_list {
        let v_n = counterexample_input(spec, n, p.d);
        let out = apply(&a, &v_n)?;
        let c_n = harmonic_coefficient(n);
        let err = out.max_abs_diff(&one.scale(Complex64::new(c_n, 0.0)));
        worst = worst.max(err);
        let hd = sobolev_norm(&fft_forward(&v_n), p.d);
        let l2_out = sobolev_norm(&fft_forward(&out), 0.0);
        let ratio = l2_out / hd;
        let ln = f64::from(n).ln();
        let predicted_h0 = (2.0 * std::f64::consts::PI).sqrt()
            * ((n..=n * n)
                .map(|j| 1.0 / (f64::from(j) * (f64::from(j) * p.d).exp2()).powi(2))
                .sum::<f64>())
            .sqrt()
            / ln;
        let h0 = sobolev_norm(&fft_forward(&v_n), 0.0);
        rep.row(format!("c_{n}"), c_n, "harmonic-sum/ln N");
        rep.row(format!("identity_error_{n}"), err, "sup|a v_N - c_N v|");
        rep.row(format!("hd_norm_{n}"), hd, "||v_N||_{H^d}");
        rep.row(format!("h0_norm_{n}"), h0, "||v_N||_{H^0}");
        rep.row(format!("h0_norm_predicted_{n}"), predicted_h0, "Parseval over disjoint modes");
        rep.row(format!("ratio_{n}"), ratio, "||a v_N||_2/||v_N||_{H^d}");
        let id_ratio = h0 / hd;
        rep.row(format!("control_ratio_{n}"), id_ratio, "identity: ||v_N||_2/||v_N||_{H^d}");
        ratios.push((f64::from(n), ratio));
        control.push(id_ratio);
        if (h0 - predicted_h0).abs() > 1e-10 * predicted_h0 {
            rep.verdict(format!("h0_norm_{n}"), false, format!("{h0} vs {predicted_h0}"));
        }
    }
    rep.verdict(
        "identity",
        worst <= p.tolerance,
        format!("max sup error {worst:.3e} (tolerance {:.1e})", p.tolerance),
    );
    let increasing = ratios.windows(2).all(|w| w[1].1 > w[0].1);
    rep.verdict(
        "ratio strictly increasing",
        increasing,
        format!("{:?}", ratios.iter().map(|r| r.1).collect::<Vec<_>>()),
    );
    let bounded = control.iter().all(|&r| r <= 1.0 + 1e-12);
    rep.verdict(
        "negative control: identity stays bounded",
        bounded,
        format!("{control:?}"),
    );
    rep.series.push(Series {
        name: "Ching ratio".into(),
        x_label: "N".into(),
        y_label: "||a v_N||/||v_N||".into(),
        points: ratios,
    });
    Ok(rep)
}

/// Parameters of [`run_wavefront`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WavefrontParams {
    pub d: f64,
    pub j: usize,
    pub log2_points: u32,
    /// Terms of the lacunary partial sum used for the Hölder sweep.
    pub holder_terms: usize,
    pub holder_log2_points: u32,
    pub tolerance: f64,
}

impl Default for WavefrontParams {
    fn default() -> Self {
        Self {
            d: 0.5,
            j: 6,
            log2_points: 9,
            holder_terms: 12,
            holder_log2_points: 15,
            tolerance: 1e-10,
        }
    }
}

/// `w(θ,d;x) = Σ_{j=1}^{J} 2^{-jd}e^{i2^jθx}` for `θ = ±1`.
pub fn lacunary_series(spec: GridSpec, j: usize, d: f64, theta: i64) -> GridFunction {
    lacunary(
        spec,
        (1..=j).map(|k| (theta * (1i64 << k), Complex64::new((-(k as f64) * d).exp2(), 0.0))),
    )
}

/// Base-2 exponent of `sup_x |W(x+h) - W(x)|` against `h = 2π·2^{-k}`.
pub fn holder_exponent(w: &GridFunction, k_range: std::ops::RangeInclusive<u32>) -> (f64, Vec<(f64, f64)>) {
    let spec = w.spec();
    let n = spec.points();
    let pts: Vec<(f64, f64)> = k_range
        .filter(|&k| (n >> k) >= 1)
        .map(|k| {
            let m = n >> k;
            let v = w.values();
            let osc = (0..n).map(|x| (v[(x + m) % n] - v[x]).norm()).fold(0.0, f64::max);
            let h = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            (h, osc)
        })
        .collect();
    let logs: Vec<(f64, f64)> = pts.iter().map(|p| (p.0.ln(), p.1.ln())).collect();
    (fit(&logs), pts)
}

/// Flip of the spectrum by the twisted-diagonal Ching operator `a_{2θ}`:
/// `a_{2θ}(x,D)w(θ,d;·) = w(-θ,0;·)`.
pub fn run_wavefront(p: &WavefrontParams) -> Result<ExperimentReport> {
    let spec = GridSpec::one_d(1usize << p.log2_points)?;
    if p.j == 0 || (1i64 << (p.j + 1)) >= spec.nyquist() {
        return Err(invalid(format!(
            "2^(J+1) = {} must lie below the Nyquist frequency {}",
            1i64 << (p.j + 1).min(62),
            spec.nyquist()
        )));
    }
    let a = ChingSymbol::new(p.d, &[1], RadialBump::standard(), p.j)?.with_scale(2)?;
    a.check_grid(&spec)?;
    let mut rep = ExperimentReport::new(
        "wavefront",
        serde_json::to_value(p)?,
        Environment::new(1, vec![spec.points(), 1 << p.holder_log2_points], &LpFrame::standard(), vec![]),
    );
    let w = lacunary_series(spec, p.j, p.d, 1);
    let out = apply(&a, &w)?;
    let expect = lacunary_series(spec, p.j, 0.0, -1);
    let err = out.max_abs_diff(&expect) / expect.sup_norm();
    rep.row("flip_error", err, "sup|a w(θ,d) - w(-θ,0)|/sup|w(-θ,0)|");
    rep.verdict("flip identity", err <= p.tolerance, format!("{err:.3e}"));
    let input_pos = spectral_fraction(&w, |f| f > 0);
    let output_neg = spectral_fraction(&out, |f| f < 0);
    rep.row("input_positive_fraction", input_pos, "mass{η>0}/mass");
    rep.row("output_negative_fraction", output_neg, "mass{η<0}/mass");
    rep.verdict(
        "spectral sign flip",
        input_pos >= 1.0 - 1e-10 && output_neg >= 1.0 - 1e-10,
        format!("input {input_pos}, output {output_neg}"),
    );
    let plain = ChingSymbol::new(p.d, &[1], RadialBump::standard(), p.j)?;
    let ctrl = apply(&plain, &w)?;
    let ctrl_neg = spectral_fraction(&ctrl, |f| f < 0);
    rep.row("control_negative_fraction", ctrl_neg, "a_θ: mass{η<0}/mass");
    rep.verdict(
        "negative control: a_θ does not flip",
        ctrl_neg <= 1e-10,
        format!("{ctrl_neg:.3e}"),
    );
    if p.d > 0.0 && p.d <= 1.0 {
        let hspec = GridSpec::one_d(1usize << p.holder_log2_points)?;
        let big_w = lacunary_series(hspec, p.holder_terms, p.d, 1);
        let k_hi = (p.holder_terms as u32).saturating_sub(2).max(4);
        let (exp, pts) = holder_exponent(&big_w, 3..=k_hi);
        rep.row("holder_exponent", exp, "slope of log osc(h) vs log h");
        rep.verdict(
            "Hölder exponent",
            (exp - p.d).abs() <= 0.2,
            format!("fitted {exp:.3} vs d = {}", p.d),
        );
        rep.series.push(Series {
            name: "oscillation".into(),
            x_label: "h".into(),
            y_label: "sup|W(x+h)-W(x)|".into(),
            points: pts,
        });
    }
    Ok(rep)
}
