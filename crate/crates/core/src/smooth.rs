//! The C∞ transition primitive shared by modulation functions, radial bumps
//! and the twisted-diagonal cutoff.
//!
//! `smoothstep(t)` is the normalised integral of `exp(-1/(t(1-t)))` over
//! `[0, t]`. It equals 0 for `t <= 0`, 1 for `t >= 1`, and is strictly
//! increasing in between. Values come from a cumulative Gauss–Legendre table
//! with cubic Hermite interpolation using the exact derivative, which keeps
//! the absolute error near 1e-14.

use std::sync::OnceLock;

const CELLS: usize = 4096;

// 8-point Gauss–Legendre on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

struct Table {
    cumulative: Vec<f64>,
    norm: f64,
}

fn bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / CELLS as f64;
        let mut cumulative = Vec::with_capacity(CELLS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for cell in 0..CELLS {
            let a = cell as f64 * h;
            let mid = a + 0.5 * h;
            let part: f64 = GL_NODES
                .iter()
                .zip(GL_WEIGHTS.iter())
                .map(|(&x, &w)| w * bump(mid + 0.5 * h * x))
                .sum();
            acc += 0.5 * h * part;
            cumulative.push(acc);
        }
        let norm = acc;
        for v in cumulative.iter_mut() {
            *v /= norm;
        }
        // pin the endpoints so the plateaus are exact
        cumulative[0] = 0.0;
        cumulative[CELLS] = 1.0;
        Table { cumulative, norm }
    })
}

/// Smooth monotone ramp from 0 (at `t <= 0`) to 1 (at `t >= 1`).
pub fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let tab = table();
    let h = 1.0 / CELLS as f64;
    let pos = t / h;
    let cell = (pos.floor() as usize).min(CELLS - 1);
    let a = cell as f64 * h;
    let s = (t - a) / h;
    let y0 = tab.cumulative[cell];
    let y1 = tab.cumulative[cell + 1];
    let d0 = bump(a) / tab.norm * h;
    let d1 = bump(a + h) / tab.norm * h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    (h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1).clamp(0.0, 1.0)
}

/// Derivative of [`smoothstep`].
pub fn smoothstep_derivative(t: f64) -> f64 {
    bump(t) / table().norm
}

/// Ramp descending from 1 at `lo` to 0 at `hi`.
pub fn descending(value: f64, lo: f64, hi: f64) -> f64 {
    smoothstep((hi - value) / (hi - lo))
}

/// Ramp ascending from 0 at `lo` to 1 at `hi`.
pub fn ascending(value: f64, lo: f64, hi: f64) -> f64 {
    smoothstep((value - lo) / (hi - lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(-3.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(7.5), 1.0);
    }

    #[test]
    fn symmetric_about_half() {
        for i in 1..100 {
            let t = i as f64 / 100.0;
            let lhs = smoothstep(t) + smoothstep(1.0 - t);
            assert!((lhs - 1.0).abs() < 1e-13, "t={t}: {lhs}");
        }
    }

    #[test]
    fn monotone_and_matches_derivative() {
        let mut prev = 0.0;
        for i in 1..=2000 {
            let t = i as f64 / 2000.0;
            let v = smoothstep(t);
            assert!(v >= prev);
            prev = v;
        }
        // central difference against the analytic derivative
        for &t in &[0.2, 0.37, 0.5, 0.81] {
            let h = 1e-5;
            let fd = (smoothstep(t + h) - smoothstep(t - h)) / (2.0 * h);
            assert!((fd - smoothstep_derivative(t)).abs() < 1e-6);
        }
    }

    #[test]
    fn reference_value_by_independent_quadrature() {
        // trapezoid rule with 200k panels on the raw bump
        let n = 200_000;
        let integral = |upper: f64| {
            let h = upper / n as f64;
            (0..=n)
                .map(|i| {
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    w * bump(i as f64 * h)
                })
                .sum::<f64>()
                * h
        };
        let total = integral(1.0);
        let part = integral(0.3);
        assert!((smoothstep(0.3) - part / total).abs() < 1e-9);
    }
}
