use std::sync::Arc;

use num_complex::Complex64;
use pdlab::corpus::{random_elementary_symbol, random_grid_function};
use pdlab::operator::{apply, apply_direct, paradiff_split};
use pdlab::spaces::{space_norm, SpaceParams};
use pdlab::symbol::SymbolRef;
use pdlab::{corona_blocks, fft_forward, fft_inverse, GridFunction, GridSpec, LpFrame};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, dim: usize, points: usize) -> GridFunction {
    random_grid_function(GridSpec::new(dim, points).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed))
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), Just(1.0), Just(2.0), Just(3.0)]
}

fn space() -> impl Strategy<Value = SpaceParams> {
    (-1.0f64..1.5, exponent(), prop_oneof![exponent(), Just(f64::INFINITY)], any::<bool>()).prop_map(
        |(s, p, q, besov)| {
            if besov {
                SpaceParams::besov(s, p, q).unwrap()
            } else {
                SpaceParams::triebel(s, p, q).unwrap()
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_round_trip(seed in any::<u64>(), dim in 1usize..=2) {
        let u = sample(seed, dim, 16);
        let back = fft_inverse(&fft_forward(&u));
        prop_assert!(back.max_abs_diff(&u) <= 1e-13);
    }

    #[test]
    fn blocks_partition_unity(seed in any::<u64>(), dim in 1usize..=2) {
        let u = sample(seed, dim, 32);
        let blocks = corona_blocks(&u, &LpFrame::standard());
        let mut sum = GridFunction::zeros(u.spec());
        for b in &blocks {
            sum = sum.add(b).unwrap();
        }
        prop_assert!(sum.max_abs_diff(&u) <= 1e-12 * u.sup_norm());
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), sp in space(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let u = sample(seed, 1, 64);
        let lam = Complex64::new(re, im);
        prop_assume!(lam.norm() > 1e-3);
        let a = space_norm(&u.scale(lam), &sp).unwrap();
        let b = lam.norm() * space_norm(&u, &sp).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b, "{a} vs {b}");
    }

    #[test]
    fn norms_are_lambda_subadditive(s1 in any::<u64>(), s2 in any::<u64>(), sp in space()) {
        let (u, v) = (sample(s1, 1, 64), sample(s2, 1, 64));
        let lam = sp.p.min(sp.q).min(1.0);
        let n = |w: &GridFunction| space_norm(w, &sp).unwrap().powf(lam);
        let lhs = n(&u.add(&v).unwrap());
        prop_assert!(lhs <= (n(&u) + n(&v)) * (1.0 + 1e-12));
    }

    #[test]
    fn norms_decrease_in_q(seed in any::<u64>(), s in -1.0f64..1.0, p in exponent(), besov in any::<bool>()) {
        let u = sample(seed, 1, 64);
        let make = |q: f64| if besov { SpaceParams::besov(s, p, q) } else { SpaceParams::triebel(s, p, q) };
        let mut prev = f64::INFINITY;
        for q in [0.5, 1.0, 2.0, 4.0, f64::INFINITY] {
            let v = space_norm(&u, &make(q).unwrap()).unwrap();
            prop_assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn paradiff_split_is_exact(seed in any::<u64>(), levels in 1usize..7) {
        let g = GridSpec::one_d(64).unwrap();
        let frame = LpFrame::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: SymbolRef = Arc::new(random_elementary_symbol(g, &frame, levels, &mut rng));
        let u = random_grid_function(g, &mut rng);
        let t = paradiff_split(a.clone(), &u, &frame).unwrap();
        let direct = apply_direct(a.as_ref(), &u).unwrap();
        prop_assert!(t.total().max_abs_diff(&direct) <= 1e-10 * direct.sup_norm().max(1e-300));
    }

    #[test]
    fn apply_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), c in -2.0f64..2.0) {
        let g = GridSpec::one_d(64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(s1);
        let a = random_elementary_symbol(g, &LpFrame::standard(), 5, &mut rng);
        let (u, v) = (sample(s1 ^ 1, 1, 64), sample(s2, 1, 64));
        let w = u.add(&v.scale(Complex64::new(c, 0.0))).unwrap();
        let lhs = apply(&a, &w).unwrap();
        let rhs = apply(&a, &u).unwrap().add(&apply(&a, &v).unwrap().scale(Complex64::new(c, 0.0))).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11 * (1.0 + rhs.sup_norm()));
    }
}
