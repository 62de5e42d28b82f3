//! Acceptance gates 1 to 10 plus the fast-path timing gate. Prints one
//! PASS/FAIL line per gate and exits nonzero when any gate fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use pdlab::corpus::{random_band_limited, random_elementary_symbol, random_grid_function, shrinking_bump, TrigPolynomial};
use pdlab::experiments::{
    run_continuity_table, run_counterexample, run_sigma_estimate, run_wavefront, ContinuityCase, ContinuityParams,
    CounterexampleParams, ExperimentReport, SigmaParams, SymbolFamily, WavefrontParams,
};
use pdlab::operator::{apply_direct, apply_fast_elementary, corona_ball_report, paradiff_split};
use pdlab::pointwise::{factorization_check, maximal_lp_stability, MaximalParams};
use pdlab::spaces::{
    besov_norm, embedding_report, embedding_spread, random_sequences, summation_corpus, summation_lemma_check,
    triebel_norm, SpaceParams,
};
use pdlab::symbol::{
    adjoint_symbol_matrix, check_adjoint_support, localize_symbol, MultiplicationSymbol, SymbolRef,
};
use pdlab::{ChingSymbol, FnSymbol, GridFunction, GridSpec, LpFrame, ModulationFunction, RadialBump, Symbol, SymbolTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report_gate(rep: &ExperimentReport, names: &[&str]) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for v in &rep.verdicts {
        if names.is_empty() || names.iter().any(|n| v.name.starts_with(n)) {
            ok &= v.passed;
            detail.push(format!("{}: {}", v.name, v.detail));
        }
    }
    gate(ok && !detail.is_empty(), detail.join("; "))
}

fn c1_paradiff_identity() -> Outcome {
    let g = GridSpec::one_d(256).unwrap();
    let frame = LpFrame::standard();
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let mut r = rng(100 + i);
        let levels = 4 + (i as usize % 5);
        let e = random_elementary_symbol(g, &frame, levels, &mut r);
        let a: SymbolRef = Arc::new(SymbolTable::tabulate(&e, g).unwrap());
        let u = random_grid_function(g, &mut r);
        let t = paradiff_split(a.clone(), &u, &frame).unwrap();
        let direct = apply_direct(a.as_ref(), &u).unwrap();
        worst = worst.max(t.total().max_abs_diff(&direct) / direct.sup_norm());
    }
    gate(worst <= 1e-10, format!("max relative error {worst:.3e} over 20 pairs"))
}

fn c2_corona_containment() -> Outcome {
    let g = GridSpec::one_d(256).unwrap();
    let frame = LpFrame::standard();
    let mut worst: f64 = 0.0;
    let mut bounds_ok = true;
    for i in 0..5u64 {
        let mut r = rng(200 + i);
        let a: SymbolRef = Arc::new(random_elementary_symbol(g, &frame, 8, &mut r));
        let u = random_grid_function(g, &mut r);
        let rep = corona_ball_report(&paradiff_split(a, &u, &frame).unwrap(), None);
        worst = worst.max(rep.max_relative);
        for row in rep.rows.iter().filter(|r| r.term != "t2") {
            let p = (row.k as f64).exp2();
            bounds_ok &= row.lower == p / 4.0 && row.upper == 5.0 * p / 2.0;
        }
    }
    gate(
        worst <= 1e-10 && bounds_ok,
        format!("max outside-corona mass {worst:.3e}; bounds 2^(k-2), 5*2^(k-1): {bounds_ok}"),
    )
}

fn c3_counterexample() -> Outcome {
    let t = Instant::now();
    let rep = run_counterexample(&CounterexampleParams::default()).map_err(|e| e.to_string())?;
    let el = t.elapsed();
    let inner = report_gate(&rep, &[])?;
    gate(el <= Duration::from_secs(300), format!("{inner}; {el:.1?}"))
}

fn c4_wavefront() -> Outcome {
    let rep = run_wavefront(&WavefrontParams::default()).map_err(|e| e.to_string())?;
    report_gate(&rep, &["flip identity", "spectral sign flip", "negative control"])
}

fn c5_factorization() -> Outcome {
    let g = GridSpec::one_d(64).unwrap();
    let frame = LpFrame::standard();
    let p = MaximalParams::new(1.0, 6.0).unwrap();
    let psi = ModulationFunction::new(6.0, 12.0).unwrap();
    let chi = move |eta: &[f64]| psi.eval(eta);
    let mut worst: f64 = 0.0;
    let mut violations = 0;
    for i in 0..20u64 {
        let mut r = rng(500 + i);
        let a: Box<dyn Symbol> = match i % 4 {
            0 => Box::new(ChingSymbol::new(0.0, &[1], RadialBump::standard(), 4).unwrap()),
            1 => Box::new(FnSymbol::bessel(1, 1.0)),
            _ => Box::new(random_elementary_symbol(g, &frame, 6, &mut r)),
        };
        let u = random_band_limited(g, 6.0, &mut r);
        let rep = factorization_check(a.as_ref(), &u, &p, &chi).map_err(|e| e.to_string())?;
        worst = worst.max(rep.max_ratio);
        violations += rep.violations;
    }
    gate(
        violations == 0 && worst <= 1.0 + 1e-8,
        format!("max ratio {worst:.6}, {violations} violations over 20 pairs"),
    )
}

fn maximal_corpora(grids: &[usize], seed: u64) -> Vec<Vec<GridFunction>> {
    grids
        .iter()
        .map(|&n| {
            let g = GridSpec::one_d(n).unwrap();
            let radius = (n / 8) as f64;
            let mut r = rng(seed);
            let mut c = vec![shrinking_bump(g, radius)];
            c.extend((0..6).map(|_| random_band_limited(g, radius, &mut r)));
            c.extend((0..3).map(|_| TrigPolynomial::random(1, 6, &mut r).sample(g)));
            c
        })
        .collect()
}

fn c6_maximal() -> Outcome {
    let grids = [128, 256, 512];
    let corpora = maximal_corpora(&grids, 600);
    let mut detail = Vec::new();
    let mut ok = true;
    for (p, n_exp) in [(0.5, 3.0), (1.0, 2.0), (2.0, 2.0)] {
        let st = maximal_lp_stability(&corpora, p, n_exp, 1.5, true).map_err(|e| e.to_string())?;
        let steps = st.constants.windows(2).map(|w| w[1] / w[0]).fold(1.0f64, |m, f| m.max(f).max(1.0 / f));
        ok &= steps <= 1.5;
        detail.push(format!("p={p} N={n_exp}: C={:?}", round3(&st.constants)));
    }
    let neg = maximal_lp_stability(&corpora, 0.5, 1.0, 1.5, false).map_err(|e| e.to_string())?;
    let growth = neg.constants.windows(2).map(|w| w[1] / w[0]).fold(f64::INFINITY, f64::min);
    ok &= growth >= 1.2;
    detail.push(format!("control p=1/2 N=1: min growth {growth:.3}"));
    gate(ok, detail.join("; "))
}

fn round3(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}

fn c7_twisted_diagonal() -> Outcome {
    let g = GridSpec::one_d(128).unwrap();
    let tdc = ChingSymbol::new(0.0, &[1], RadialBump::standard(), 4).unwrap().with_scale(2).unwrap();
    let b = tdc.tdc_bound().ok_or("doubled Ching symbol has no tdc bound")?;
    let a: SymbolRef = Arc::new(tdc);
    let mut zero = true;
    for eps in [0.5 / b, 0.25 / b, 0.1 / b] {
        let loc = localize_symbol(a.clone(), eps, g).map_err(|e| e.to_string())?;
        let t = SymbolTable::tabulate(&loc, g).map_err(|e| e.to_string())?;
        zero &= t.data().iter().all(|v| *v == Complex64::new(0.0, 0.0));
    }
    let plain: SymbolRef = Arc::new(ChingSymbol::new(0.0, &[1], RadialBump::standard(), 4).unwrap());
    let loc = localize_symbol(plain, 0.5 / b, g).map_err(|e| e.to_string())?;
    let control_nonzero = SymbolTable::tabulate(&loc, g).unwrap().data().iter().any(|v| v.norm() > 1e-3);
    let adj = adjoint_symbol_matrix(a.as_ref(), g).map_err(|e| e.to_string())?;
    let rep = check_adjoint_support(&adj, b, 1e-8, &g).map_err(|e| e.to_string())?;
    let m = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 32.0 * x[0]));
    let wild = adjoint_symbol_matrix(&MultiplicationSymbol::new(m), g).unwrap();
    let wild_rep = check_adjoint_support(&wild, b, 1e-8, &g).unwrap();
    gate(
        zero && control_nonzero && rep.holds && !wild_rep.holds,
        format!(
            "B={b:.4}: localized ≡ 0 {zero}; adjoint violation {:.3e}; controls: plain Ching nonzero {control_nonzero}, e^(32ix) adjoint violation {:.3e}",
            rep.relative, wild_rep.relative
        ),
    )
}

fn c8_sigma() -> Outcome {
    let rep = run_sigma_estimate(&SigmaParams::default(), &LpFrame::standard()).map_err(|e| e.to_string())?;
    report_gate(&rep, &[])
}

fn c9_spaces() -> Outcome {
    let mut r = rng(900);
    let g = GridSpec::one_d(128).unwrap();
    let mut beq: f64 = 0.0;
    for p in [1.0, 2.0, 4.0] {
        for _ in 0..5 {
            let u = random_grid_function(g, &mut r);
            for s in [-0.5, 0.0, 1.0] {
                let b = besov_norm(&u, &SpaceParams::besov(s, p, p).unwrap()).unwrap();
                let f = triebel_norm(&u, &SpaceParams::triebel(s, p, p).unwrap()).unwrap();
                beq = beq.max((b - f).abs() / f);
            }
        }
    }
    let polys: Vec<TrigPolynomial> = (0..10).map(|_| TrigPolynomial::random(1, 12, &mut r)).collect();
    let sample = |n: usize| -> Vec<GridFunction> {
        let g = GridSpec::one_d(n).unwrap();
        polys.iter().map(|t| t.sample(g)).collect()
    };
    let (c64, c128) = (sample(64), sample(128));
    let mut spread: f64 = 1.0;
    for (s, p, q) in [(0.5, 2.0, 1.0), (0.0, 1.0, 2.0), (1.0, 4.0, 0.5)] {
        let a = embedding_report(&c64, s, p, q).map_err(|e| e.to_string())?;
        let b = embedding_report(&c128, s, p, q).map_err(|e| e.to_string())?;
        spread = spread.max(embedding_spread(&a, &b));
    }
    let fit = summation_corpus(1000, 64, &mut r);
    let verify = random_sequences(1000, 64, &mut r);
    let mut violations = 0;
    for q in [0.5, 1.0, 2.0, f64::INFINITY] {
        violations += summation_lemma_check(-0.5, q, &fit, &verify).map_err(|e| e.to_string())?.violations;
    }
    gate(
        beq <= 1e-12 && spread <= 1.3 && violations == 0,
        format!("|B-F|/F {beq:.2e}; embedding spread {spread:.4}; summation violations {violations}"),
    )
}

fn c10_continuity() -> Outcome {
    let frame = LpFrame::standard();
    let ching = run_continuity_table(&ContinuityParams::default(), 1, &frame).map_err(|e| e.to_string())?;
    let first = report_gate(&ching, &[])?;
    let tdc = ContinuityParams {
        symbol: SymbolFamily::ching(0.0, 0, 2),
        cases: [-1.0, 0.0, 1.0]
            .iter()
            .map(|s| ContinuityCase {
                source: format!("H:s={s}"),
                target: format!("H:s={s}"),
                expect: Some("bounded".into()),
            })
            .collect(),
        ..ContinuityParams::default()
    };
    let rep = run_continuity_table(&tdc, 1, &frame).map_err(|e| e.to_string())?;
    let second = report_gate(&rep, &[])?;
    Ok(format!("{first}; tdc: {second}"))
}

fn perf_fast_path() -> Outcome {
    let g = GridSpec::one_d(512).unwrap();
    let frame = LpFrame::standard();
    let mut r = rng(1100);
    let a = random_elementary_symbol(g, &frame, 9, &mut r);
    let u = random_grid_function(g, &mut r);
    let best = |f: &dyn Fn() -> GridFunction| {
        (0..5)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(f());
                t.elapsed()
            })
            .min()
            .unwrap()
    };
    let fast = best(&|| apply_fast_elementary(&a, &u).unwrap());
    let slow = best(&|| apply_direct(&a, &u).unwrap());
    let speedup = slow.as_secs_f64() / fast.as_secs_f64();
    gate(speedup >= 10.0, format!("J=8, N=512: fast {fast:.2?}, direct {slow:.2?}, speedup {speedup:.1}x"))
}

fn main() {
    pdlab::init_threads();
    let gates: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 paradifferential identity", c1_paradiff_identity),
        ("2 corona containment", c2_corona_containment),
        ("3 Ching counterexample", c3_counterexample),
        ("4 wavefront flip", c4_wavefront),
        ("5 factorization inequality", c5_factorization),
        ("6 maximal inequality", c6_maximal),
        ("7 twisted diagonal", c7_twisted_diagonal),
        ("8 sigma-order estimation", c8_sigma),
        ("9 function spaces", c9_spaces),
        ("10 continuity tables", c10_continuity),
        ("perf fast path", perf_fast_path),
    ];
    let mut failed = 0;
    for (name, f) in gates {
        let t = Instant::now();
        let out = f();
        let el = t.elapsed();
        match out {
            Ok(d) => println!("PASS {name} ({el:.1?}): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name} ({el:.1?}): {d}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance gate(s) failed");
        std::process::exit(1);
    }
}
