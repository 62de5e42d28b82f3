use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use pdlab::corpus::{random_band_limited, random_elementary_symbol, random_grid_function, seeded_rng, InputSpec};
use pdlab::experiments::{run_counterexample, run_wavefront, CounterexampleParams, WavefrontParams};
use pdlab::operator::{apply, apply_direct, corona_ball_report, paradiff_split, vfm_limit};
use pdlab::pointwise::{factorization_check, MaximalParams};
use pdlab::spaces::{besov_norm, triebel_norm, SpaceParams};
use pdlab::symbol::{localize_symbol, parse_symbol_spec, SymbolRef};
use pdlab::{
    corona_blocks, fft_forward, fft_inverse, ChingSymbol, GridFunction, GridSpec, ModulationFunction, Profile, RadialBump,
    Symbol, SymbolTable,
};

use pdlab::config::RunConfig;

use crate::context::{CliError, CliResult, Context};

type Gate = Result<String, String>;

fn check(ok: bool, detail: String) -> Gate {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn core(e: pdlab::PdError) -> String {
    e.to_string()
}

struct Suite {
    config: RunConfig,
    quick: bool,
}

impl Suite {
    fn tol(&self) -> f64 {
        self.config.thresholds.identity
    }

    fn fft_round_trip(&self) -> Gate {
        let g = GridSpec::new(2, 32).map_err(core)?;
        let u = random_grid_function(g, &mut seeded_rng(1));
        let err = fft_inverse(&fft_forward(&u)).max_abs_diff(&u);
        check(err <= 1e-13, format!("{err:.2e}"))
    }

    fn partition_of_unity(&self) -> Gate {
        let frame = self.config.lp_frame().map_err(core)?;
        let mut worst: f64 = 0.0;
        for dim in [1, 2] {
            let g = GridSpec::new(dim, if dim == 1 { 256 } else { 64 }).map_err(core)?;
            let u = random_grid_function(g, &mut seeded_rng(2));
            let mut sum = GridFunction::zeros(g);
            for b in corona_blocks(&u, &frame) {
                sum = sum.add(&b).map_err(core)?;
            }
            worst = worst.max(sum.max_abs_diff(&u) / u.sup_norm());
        }
        check(worst <= 1e-12, format!("{worst:.2e}"))
    }

    fn paradiff(&self) -> Gate {
        let frame = self.config.lp_frame().map_err(core)?;
        let (n, count) = if self.quick { (128, 5) } else { (256, 20) };
        let g = GridSpec::one_d(n).map_err(core)?;
        let (mut err, mut mass): (f64, f64) = (0.0, 0.0);
        for i in 0..count {
            let mut r = seeded_rng(100 + i);
            let e = random_elementary_symbol(g, &frame, 4 + i as usize % 5, &mut r);
            let a: SymbolRef = Arc::new(SymbolTable::tabulate(&e, g).map_err(core)?);
            let u = random_grid_function(g, &mut r);
            let t = paradiff_split(a.clone(), &u, &frame).map_err(core)?;
            let direct = apply_direct(a.as_ref(), &u).map_err(core)?;
            err = err.max(t.total().max_abs_diff(&direct) / direct.sup_norm());
            mass = mass.max(corona_ball_report(&t, None).max_relative);
        }
        check(
            err <= self.tol() && mass <= self.config.thresholds.support,
            format!("identity {err:.2e}, outside-corona mass {mass:.2e} over {count} symbols"),
        )
    }

    fn counterexample(&self) -> Gate {
        let mut p = CounterexampleParams {
            tolerance: self.tol(),
            ..CounterexampleParams::default()
        };
        if self.quick {
            p.n_list = vec![2, 3];
            p.log2_points = 14;
        }
        let rep = run_counterexample(&p).map_err(core)?;
        match rep.first_failure() {
            None => Ok(format!("N in {:?} on 2^{}", p.n_list, p.log2_points)),
            Some(v) => Err(format!("{}: {}", v.name, v.detail)),
        }
    }

    fn wavefront(&self) -> Gate {
        let p = WavefrontParams {
            tolerance: self.tol(),
            ..WavefrontParams::default()
        };
        let rep = run_wavefront(&p).map_err(core)?;
        let err = rep.value("flip_error").unwrap_or(f64::NAN);
        let bad = rep
            .verdicts
            .iter()
            .find(|v| !v.passed && !v.name.starts_with("Hölder"));
        match bad {
            None => Ok(format!("flip error {err:.2e}")),
            Some(v) => Err(format!("{}: {}", v.name, v.detail)),
        }
    }

    fn single_mode_shift(&self) -> Gate {
        let g = GridSpec::one_d(256).map_err(core)?;
        let frame = self.config.lp_frame().map_err(core)?;
        let a = parse_symbol_spec("ching:d=0,theta=+1,jmax=6")
            .and_then(|s| s.build(&g, &frame))
            .map_err(core)?;
        let u = InputSpec::parse("single:eta=32").and_then(|s| s.build(g)).map_err(core)?;
        let c = fft_forward(&apply(a.as_ref(), &u).map_err(core)?);
        let zero = c.coeff(&[0]);
        let rest: f64 = c.coeffs().iter().map(|v| v.norm_sqr()).sum::<f64>() - zero.norm_sqr();
        check(
            (zero - Complex64::new(1.0, 0.0)).norm() <= self.tol() && rest <= self.tol() * self.tol(),
            format!("coefficient at 0: {zero:.3}, other mass {rest:.1e}"),
        )
    }

    fn factorization(&self) -> Gate {
        let g = GridSpec::one_d(64).map_err(core)?;
        let frame = self.config.lp_frame().map_err(core)?;
        let p = MaximalParams::new(1.0, 6.0).map_err(core)?;
        let psi = ModulationFunction::new(6.0, 12.0).map_err(core)?;
        let chi = move |eta: &[f64]| psi.eval(eta);
        let mut violations = 0;
        let mut worst: f64 = 0.0;
        for i in 0..if self.quick { 5 } else { 20 } {
            let mut r = seeded_rng(500 + i);
            let a = random_elementary_symbol(g, &frame, 6, &mut r);
            let u = random_band_limited(g, 6.0, &mut r);
            let rep = factorization_check(&a, &u, &p, &chi).map_err(core)?;
            violations += rep.violations;
            worst = worst.max(rep.max_ratio);
        }
        check(violations == 0, format!("max ratio {worst:.4}, {violations} violations"))
    }

    fn strict_tdc(&self) -> Gate {
        let g = GridSpec::one_d(128).map_err(core)?;
        let tdc = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 4)
            .and_then(|c| c.with_scale(2))
            .map_err(core)?;
        let b = tdc.tdc_bound().ok_or("no twisted diagonal bound")?;
        let a: SymbolRef = Arc::new(tdc);
        let loc = localize_symbol(a, 0.5 / b, g).map_err(core)?;
        let t = SymbolTable::tabulate(&loc, g).map_err(core)?;
        let max = t.data().iter().map(|v| v.norm()).fold(0.0, f64::max);
        check(max == 0.0, format!("sup |a_chi,eps| = {max:.1e} at eps = 1/(2B), B = {b:.4}"))
    }

    fn besov_equals_triebel(&self) -> Gate {
        let g = GridSpec::one_d(128).map_err(core)?;
        let u = random_grid_function(g, &mut seeded_rng(9));
        let mut worst: f64 = 0.0;
        for p in [1.0, 2.0, 4.0] {
            let bn = besov_norm(&u, &SpaceParams::besov(0.5, p, p).map_err(core)?).map_err(core)?;
            let fnm = triebel_norm(&u, &SpaceParams::triebel(0.5, p, p).map_err(core)?).map_err(core)?;
            worst = worst.max((bn - fnm).abs() / fnm);
        }
        check(worst <= 1e-12, format!("{worst:.2e}"))
    }

    fn vfm_saturation(&self) -> Gate {
        let g = GridSpec::one_d(64).map_err(core)?;
        let frame = self.config.lp_frame().map_err(core)?;
        let mut r = seeded_rng(11);
        let a: SymbolRef = Arc::new(random_elementary_symbol(g, &frame, 6, &mut r));
        let u = random_grid_function(g, &mut r);
        let psis = [
            ModulationFunction::new(1.0, 2.0).map_err(core)?,
            ModulationFunction::with_profile(0.8, 1.6, Profile::Septic).map_err(core)?,
        ];
        let t = vfm_limit(a.clone(), &u, &psis, 0).map_err(core)?;
        let direct = apply(a.as_ref(), &u).map_err(core)?;
        let sat = t.saturated.ok_or("no saturated output")?;
        let err = sat.max_abs_diff(&direct) / direct.sup_norm();
        check(
            err <= self.tol() && t.cross_psi_deviation <= self.tol() * direct.sup_norm(),
            format!("saturation index {}, error {err:.2e}", t.m_sat),
        )
    }
}

pub fn run(ctx: &Context, quick: bool) -> CliResult<()> {
    let suite = Suite {
        config: ctx.config.clone(),
        quick,
    };
    let gates: Vec<(&str, fn(&Suite) -> Gate)> = vec![
        ("fft round trip", Suite::fft_round_trip),
        ("partition of unity", Suite::partition_of_unity),
        ("paradifferential identity", Suite::paradiff),
        ("Ching counterexample identity", Suite::counterexample),
        ("wavefront flip", Suite::wavefront),
        ("single-mode frequency shift", Suite::single_mode_shift),
        ("factorization inequality", Suite::factorization),
        ("strict twisted diagonal", Suite::strict_tdc),
        ("B = F at p = q", Suite::besov_equals_triebel),
        ("vfm saturation", Suite::vfm_saturation),
    ];
    let start = Instant::now();
    let mut first = None;
    for (name, f) in gates {
        let t = Instant::now();
        match f(&suite) {
            Ok(d) => println!("PASS {name} ({:.2?}): {d}", t.elapsed()),
            Err(d) => {
                println!("FAIL {name} ({:.2?}): {d}", t.elapsed());
                first.get_or_insert(format!("{name}: {d}"));
            }
        }
    }
    println!("selftest finished in {:.2?}", start.elapsed());
    match first {
        None => Ok(()),
        Some(msg) => Err(CliError::Gate(msg)),
    }
}
