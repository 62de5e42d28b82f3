use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pdlab::corpus::InputSpec;
use pdlab::experiments::{ExperimentParams, ExperimentReport};
use pdlab::grid::lp_norm;
use pdlab::io::write_grid_function;
use pdlab::operator::{
    apply, apply_direct, apply_separable, corona_ball_report, output_spectrum, paradiff_split,
    spectral_support_rule_check, support_rule_check, values_from_spectrum, vfm_limit, vfm_refine,
};
use pdlab::pointwise::{
    factorization_check, mihlin_sides, moment_decay_check, peetre_maximal, spectral_radius, MaximalParams,
};
use pdlab::spaces::{space_norm, truncation_index, SpaceParams};
use pdlab::{fft_forward, GridFunction, GridSpec, ModulationFunction, Profile};
use serde_json::json;

use crate::context::{emit, CliError, CliResult, Context};
use crate::{ExperimentName, InputArgs, Method, ParadiffReport, PointwiseCommand, SymbolArg};

fn pretty(v: &serde_json::Value) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

/// Frequencies carrying more than `tau` of the squared mass, largest first.
fn spectrum_summary(u: &GridFunction, tau: f64, limit: usize) -> (usize, Vec<serde_json::Value>) {
    let spec = u.spec();
    let c = fft_forward(u);
    let total: f64 = c.coeffs().iter().map(|v| v.norm_sqr()).sum();
    let mut hits: Vec<(usize, f64)> = c
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, v)| (i, if total > 0.0 { v.norm_sqr() / total } else { 0.0 }))
        .filter(|&(_, m)| m > tau)
        .collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let count = hits.len();
    let list = hits
        .into_iter()
        .take(limit)
        .map(|(i, m)| {
            let f = spec.frequency(i);
            json!({"frequency": &f[..spec.dim()], "mass_fraction": m})
        })
        .collect();
    (count, list)
}

pub fn apply_cmd(
    ctx: &Context,
    symbol: &SymbolArg,
    input: &InputArgs,
    out: &Path,
    method: Method,
    tau: f64,
) -> CliResult<()> {
    let u = ctx.input(input)?;
    let grid = u.spec();
    let a = ctx.symbol(symbol, &grid)?;
    let y = match method {
        Method::Auto => apply(a.as_ref(), &u)?,
        Method::Direct => apply_direct(a.as_ref(), &u)?,
        Method::Separable => apply_separable(a.as_ref(), &u)?,
        Method::Spectrum => values_from_spectrum(&output_spectrum(a.clone(), &u)?, grid),
    };
    write_grid_function(out, &y)?;
    let (count, support) = spectrum_summary(&y, tau, 64);
    let summary = json!({
        "symbol": a.describe(),
        "dim": grid.dim(),
        "points": grid.points(),
        "output": out,
        "sup_norm": y.sup_norm(),
        "l2_norm": lp_norm(&y, 2.0)?,
        "spectrum_size": count,
        "spectrum": support,
    });
    emit(None, &pretty(&summary)?)
}

fn psi_family(count: usize) -> CliResult<Vec<ModulationFunction>> {
    if count < 2 {
        return Err(CliError::Usage("--psi-count must be at least 2".into()));
    }
    (0..count)
        .map(|i| {
            let (r, profile) = if i % 2 == 0 { (1.0, Profile::Bump) } else { (0.8, Profile::Septic) };
            let stretch = 1.0 + 0.25 * (i / 2) as f64;
            Ok(ModulationFunction::with_profile(r, 2.0 * r * stretch, profile)?)
        })
        .collect()
}

pub fn vfm(
    ctx: &Context,
    symbol: &SymbolArg,
    input: &InputArgs,
    psi_count: usize,
    m_max: u32,
    refine: usize,
    out: Option<&Path>,
) -> CliResult<()> {
    let psis = psi_family(psi_count)?;
    let tol = ctx.config.thresholds.identity;
    if refine > 0 {
        let spec = input
            .mode
            .as_deref()
            .map(InputSpec::parse)
            .transpose()?
            .ok_or_else(|| CliError::Usage("--refine needs a continuum input: --mode trig:seed=..,radius=..".into()))?;
        let base = ctx.grid()?;
        let poly = spec
            .trig_polynomial(base.dim())
            .ok_or_else(|| CliError::Usage("--refine needs a `trig:` input".into()))?;
        let grids: Vec<GridSpec> = (0..=refine)
            .map(|k| GridSpec::new(base.dim(), base.points() << k))
            .collect::<Result<_, _>>()?;
        let sym = ctx.symbol_spec(symbol)?;
        let frame = ctx.frame()?;
        let trace = vfm_refine(&|g| sym.build(&g, &frame), &poly, &grids, &psis, &ctx.config.thresholds.growth)?;
        emit(out, &serde_json::to_string_pretty(&trace)?)?;
        let worst = trace.cross_psi_deviation.iter().cloned().fold(0.0, f64::max);
        if worst > tol * trace.saturated_l2.iter().cloned().fold(1.0, f64::max) {
            return Err(CliError::Gate(format!("vfm saturation: outputs differ across modulation functions by {worst:.3e}")));
        }
        return Ok(());
    }
    let u = ctx.input(input)?;
    let a = ctx.symbol(symbol, &u.spec())?;
    let trace = vfm_limit(a, &u, &psis, m_max)?;
    emit(out, &serde_json::to_string_pretty(&trace)?)?;
    let scale = trace.saturated.as_ref().map_or(1.0, |s| s.sup_norm().max(1.0));
    if trace.cross_psi_deviation > tol * scale {
        return Err(CliError::Gate(format!(
            "vfm saturation: outputs differ across modulation functions by {:.3e}",
            trace.cross_psi_deviation
        )));
    }
    Ok(())
}

pub fn paradiff(
    ctx: &Context,
    symbol: &SymbolArg,
    input: &InputArgs,
    report: ParadiffReport,
    tdc: Option<f64>,
    out: Option<&Path>,
) -> CliResult<()> {
    let u = ctx.input(input)?;
    let frame = ctx.frame()?;
    let a = ctx.symbol(symbol, &u.spec())?;
    let terms = paradiff_split(a.clone(), &u, &frame)?;
    let direct = apply(a.as_ref(), &u)?;
    let identity_error = terms.total().max_abs_diff(&direct) / direct.sup_norm().max(f64::MIN_POSITIVE);
    let corona = corona_ball_report(&terms, tdc);
    let rows = |rs: &[pdlab::operator::CoronaRow]| -> Vec<serde_json::Value> {
        rs.iter()
            .map(|r| {
                json!({
                    "term": r.term, "k": r.k, "outside_mass": r.outside_mass,
                    "bound": [r.lower, r.upper], "relative": r.relative,
                })
            })
            .collect()
    };
    let mut body = json!({
        "symbol": a.describe(),
        "k_max": terms.k_max,
        "identity_error": identity_error,
    });
    if report == ParadiffReport::Corona {
        body["r_h"] = json!(corona.r_h);
        body["max_relative"] = json!(corona.max_relative);
        body["rows"] = json!(rows(&corona.rows));
        if tdc.is_some() {
            body["tdc_rows"] = json!(rows(&corona.tdc_rows));
            body["tdc_eventual_from"] = json!(corona.tdc_eventual_from);
        }
    }
    if report == ParadiffReport::Terms {
        body["terms"] = json!({
            "t1": lp_norm(&terms.t1, 2.0)?,
            "t2": lp_norm(&terms.t2, 2.0)?,
            "t3": lp_norm(&terms.t3, 2.0)?,
            "apply": lp_norm(&direct, 2.0)?,
        });
    }
    emit(out, &pretty(&body)?)?;
    let th = &ctx.config.thresholds;
    if identity_error > th.identity {
        return Err(CliError::Gate(format!("paradifferential identity: error {identity_error:.3e}")));
    }
    if report == ParadiffReport::Corona && corona.max_relative > th.support {
        return Err(CliError::Gate(format!(
            "corona containment: outside mass {:.3e}",
            corona.max_relative
        )));
    }
    Ok(())
}

pub fn support_rule(
    ctx: &Context,
    symbol: &SymbolArg,
    input: &InputArgs,
    tau: f64,
    spectral: bool,
    out: Option<&Path>,
) -> CliResult<()> {
    let u = ctx.input(input)?;
    let a = ctx.symbol(symbol, &u.spec())?;
    let rep = if spectral {
        spectral_support_rule_check(a, &u, tau)?
    } else {
        support_rule_check(a.as_ref(), &u, tau)?
    };
    emit(out, &serde_json::to_string_pretty(&rep)?)?;
    if !rep.holds {
        return Err(CliError::Gate(format!(
            "support rule: violation mass {:.3e} above tau {tau:.1e}",
            rep.violation_mass
        )));
    }
    Ok(())
}

fn csv(rows: impl Iterator<Item = (f64, f64, f64, f64)>) -> String {
    let mut s = String::from("x,lhs,rhs,ratio\n");
    for (x, l, r, q) in rows {
        let _ = writeln!(s, "{x},{l},{r},{q}");
    }
    s
}

fn ratio(l: f64, r: f64) -> f64 {
    if r > 0.0 {
        l / r
    } else if l > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn pointwise(ctx: &Context, which: PointwiseCommand) -> CliResult<()> {
    match which {
        PointwiseCommand::Factorize {
            symbol,
            input,
            n_exp,
            radius,
            out,
        } => {
            let u = ctx.input(&input)?;
            let spec = u.spec();
            let a = ctx.symbol(&symbol, &spec)?;
            let r = radius.unwrap_or_else(|| spectral_radius(&u));
            let n = n_exp.unwrap_or_else(|| MaximalParams::default_exponent(spec.dim()));
            let p = MaximalParams::new(n, r)?;
            let psi = ModulationFunction::new(r, 2.0 * r)?;
            let chi = move |eta: &[f64]| psi.eval(eta);
            let rep = factorization_check(a.as_ref(), &u, &p, &chi)?;
            let body = csv(rep.rows.iter().map(|&(x, l, r, q)| (x as f64, l, r, q)));
            emit(out.as_deref(), &body)?;
            eprintln!("max ratio {:.6}, {} violations", rep.max_ratio, rep.violations);
            if rep.violations > 0 {
                return Err(CliError::Gate(format!(
                    "factorization inequality: {} points exceed 1 + 1e-8",
                    rep.violations
                )));
            }
            Ok(())
        }
        PointwiseCommand::MaximalConstant {
            members,
            p,
            n_exp,
            unchecked,
            out,
        } => {
            let grid = ctx.grid()?;
            let dim = grid.dim() as f64;
            if !unchecked && !(n_exp > dim / p) {
                return Err(CliError::Usage(format!("maximal inequality needs N > n/p; got N={n_exp}, n/p={}", dim / p)));
            }
            let mut rows = Vec::new();
            for (i, m) in members.iter().enumerate() {
                let u = InputSpec::parse(m)?.build(grid)?;
                let params = MaximalParams::new(n_exp, spectral_radius(&u))?;
                let star = peetre_maximal(&u, &params);
                let l = lp_norm(&star, p)?;
                let r = lp_norm(&u, p)?;
                rows.push((i as f64, l, r, ratio(l, r)));
            }
            let c = rows.iter().map(|r| r.3).fold(0.0, f64::max);
            emit(out.as_deref(), &csv(rows.into_iter()))?;
            eprintln!("fitted constant C_p = {c:.6}");
            Ok(())
        }
        PointwiseCommand::Mihlin {
            symbol,
            n_exp,
            radius,
            out,
        } => {
            let grid = ctx.grid()?;
            let a = ctx.symbol(&symbol, &grid)?;
            let p = MaximalParams::new(n_exp, radius)?;
            let psi = ModulationFunction::new(1.0, 2.0)?;
            let (l, r) = mihlin_sides(a.as_ref(), &p, &psi, grid)?;
            let rows: Vec<_> = l
                .iter()
                .zip(&r)
                .enumerate()
                .map(|(x, (&l, &r))| (x as f64, l, r, ratio(l, r)))
                .collect();
            let c = rows.iter().map(|r| r.3).fold(0.0, f64::max);
            emit(out.as_deref(), &csv(rows.into_iter()))?;
            eprintln!("max F_a/Mihlin ratio {c:.6}");
            Ok(())
        }
        PointwiseCommand::MomentDecay {
            symbol,
            n_exp,
            radius,
            m,
            q,
            out,
        } => {
            let grid = ctx.grid()?;
            let a = ctx.symbol(&symbol, &grid)?;
            let p = MaximalParams::new(n_exp, radius)?;
            let phi = ModulationFunction::new(1.0, 2.0)?;
            let rep = moment_decay_check(a, &phi, &q, m, &p, grid)?;
            let (q0, v0) = rep.fit.points.first().copied().unwrap_or((1.0, 0.0));
            let rows = rep.fit.points.iter().map(|&(qq, v)| {
                let envelope = v0 * (qq / q0).powf(-m);
                (qq, v, envelope, ratio(v, envelope))
            });
            emit(out.as_deref(), &csv(rows))?;
            eprintln!(
                "fitted exponent {:.3}, vanishes from {:?}, claimed order {m}",
                rep.fit.exponent, rep.fit.vanishes_from
            );
            if !rep.holds {
                return Err(CliError::Gate(format!(
                    "moment decay: exponent {:.3} slower than -{m}",
                    rep.fit.exponent
                )));
            }
            Ok(())
        }
    }
}

pub fn norms(ctx: &Context, spaces: &[String], input: &InputArgs) -> CliResult<()> {
    let u = ctx.input(input)?;
    let frame = ctx.frame()?;
    let mut out = Vec::new();
    for s in spaces {
        let sp = SpaceParams::parse(s)?.with_frame(frame.clone());
        out.push(json!({
            "space": sp.to_string(),
            "norm": space_norm(&u, &sp)?,
            "truncation_index": truncation_index(&u.spec(), &frame),
        }));
    }
    emit(None, &pretty(&json!({"points": u.spec().points(), "dim": u.spec().dim(), "norms": out}))?)
}

fn name_of(n: ExperimentName) -> &'static str {
    match n {
        ExperimentName::Counterexample => "counterexample",
        ExperimentName::Wavefront => "wavefront",
        ExperimentName::Continuity => "continuity",
        ExperimentName::Sigma => "sigma",
    }
}

fn sibling(p: &Path, ext: &str) -> PathBuf {
    p.with_extension(ext)
}

pub fn experiment(
    ctx: &Context,
    name: ExperimentName,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    dat: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> CliResult<()> {
    let name = name_of(name);
    let mut config = ctx.config.clone();
    match &config.experiment {
        None => config.experiment = ExperimentParams::default_for(name),
        Some(e) if e.name() != name => {
            return Err(CliError::Usage(format!(
                "the configuration describes a `{}` experiment, not `{name}`",
                e.name()
            )))
        }
        Some(_) => {}
    }
    if let Some(o) = out {
        config.outputs.csv = Some(csv.unwrap_or_else(|| sibling(&o, "csv")));
        config.outputs.dat = Some(dat.unwrap_or_else(|| sibling(&o, "dat")));
        config.outputs.svg = Some(svg.unwrap_or_else(|| sibling(&o, "svg")));
        config.outputs.report = Some(o);
    } else {
        config.outputs.csv = csv.or(config.outputs.csv);
        config.outputs.dat = dat.or(config.outputs.dat);
        config.outputs.svg = svg.or(config.outputs.svg);
    }
    let rep: ExperimentReport = pdlab::config::run_experiment(&config)?;
    rep.write_outputs(&config.outputs)?;
    if config.outputs.report.is_none() {
        emit(None, &rep.to_json()?)?;
    }
    for v in &rep.verdicts {
        eprintln!("{} {}: {}", if v.passed { "PASS" } else { "FAIL" }, v.name, v.detail);
    }
    match rep.first_failure() {
        None => Ok(()),
        Some(v) => Err(CliError::Gate(format!("{}: {}", v.name, v.detail))),
    }
}
