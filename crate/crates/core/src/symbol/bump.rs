use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::smooth;

/// Multiplicative factor giving a radial bump a zero of order `r` at `t̂`.
///
/// Equal to `((t - t̂)/w)^r` for `|t - t̂| <= w/2`, blended smoothly to 1 for
/// `|t - t̂| >= w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroFactor {
    pub center: f64,
    pub order: u32,
    pub width: f64,
}

impl ZeroFactor {
    fn eval(&self, t: f64) -> f64 {
        if self.order == 0 {
            return 1.0;
        }
        let s = (t - self.center) / self.width;
        let blend = smooth::descending(s.abs(), 0.5, 1.0);
        blend * s.powi(self.order as i32) + (1.0 - blend)
    }
}

/// Smooth radial profile `A(t)` with `A = 0` outside `[a₀, a₁]` and `A = 1`
/// on `[b₀, b₁]` (before an optional [`ZeroFactor`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialBump {
    support: (f64, f64),
    plateau: (f64, f64),
    zero: Option<ZeroFactor>,
}

impl RadialBump {
    pub fn new(support: (f64, f64), plateau: (f64, f64)) -> Result<Self> {
        let (a0, a1) = support;
        let (b0, b1) = plateau;
        if !(0.0 <= a0 && a0 < b0 && b0 <= b1 && b1 < a1) {
            return Err(invalid(format!(
                "bump needs a0 < b0 <= b1 < a1, got support {support:?}, plateau {plateau:?}"
            )));
        }
        Ok(Self {
            support,
            plateau,
            zero: None,
        })
    }

    /// Support `[3/4, 5/4]`, plateau `[9/10, 11/10]`.
    pub fn standard() -> Self {
        Self::new((0.75, 1.25), (0.9, 1.1)).expect("valid bump")
    }

    /// Adds a zero of order `r` at `center`, exact power law on
    /// `|t - center| <= width/2`.
    pub fn with_zero(mut self, center: f64, order: u32, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(invalid("zero width must be positive"));
        }
        self.zero = Some(ZeroFactor {
            center,
            order,
            width,
        });
        Ok(self)
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn plateau(&self) -> (f64, f64) {
        self.plateau
    }

    pub fn zero(&self) -> Option<ZeroFactor> {
        self.zero
    }

    pub fn zero_order(&self) -> u32 {
        self.zero.map_or(0, |z| z.order)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (a0, a1) = self.support;
        if t <= a0 || t >= a1 {
            return 0.0;
        }
        let (b0, b1) = self.plateau;
        let base = if t < b0 {
            smooth::ascending(t, a0, b0)
        } else if t > b1 {
            smooth::descending(t, b1, a1)
        } else {
            1.0
        };
        match self.zero {
            Some(z) => base * z.eval(t),
            None => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_plateau() {
        let a = RadialBump::standard();
        assert_eq!(a.eval(0.7), 0.0);
        assert_eq!(a.eval(1.3), 0.0);
        assert_eq!(a.eval(0.75), 0.0);
        assert_eq!(a.eval(1.0), 1.0);
        assert_eq!(a.eval(0.9), 1.0);
        assert_eq!(a.eval(1.1), 1.0);
        for i in 0..1000 {
            let t = 0.5 + i as f64 * 0.001;
            let v = a.eval(t);
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn zero_of_prescribed_order() {
        for r in 1..=3u32 {
            let a = RadialBump::standard().with_zero(1.0, r, 0.2).unwrap();
            for &dt in &[0.01, 0.03, 0.07] {
                let expect = (dt / 0.2f64).powi(r as i32);
                assert!((a.eval(1.0 + dt) - expect).abs() < 1e-15);
            }
            assert_eq!(a.eval(1.0), 0.0);
        }
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(RadialBump::new((1.0, 0.5), (0.7, 0.8)).is_err());
        assert!(RadialBump::new((0.5, 1.0), (0.4, 0.8)).is_err());
    }
}
