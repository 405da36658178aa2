//! Condensate loss through three-body recombination, `dn/dt = -L3 n^3`.

use crate::constants::{RB87_L3, RB87_L3_SIGMA};
use crate::error::{ensure, ensure_finite, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeBodyParams {
    /// Recombination constant (m^6/s).
    pub l3: f64,
    /// Initial density (m^-3).
    pub n0: f64,
}

impl ThreeBodyParams {
    pub fn new(l3: f64, n0: f64) -> Result<Self> {
        ensure_finite(l3, "l3")?;
        ensure_finite(n0, "n0")?;
        ensure(l3 > 0.0, "l3", format!("must be positive, got {l3}"))?;
        ensure(n0 > 0.0, "n0", format!("must be positive, got {n0}"))?;
        Ok(Self { l3, n0 })
    }

    /// Rubidium-87 recombination constant.
    pub fn rubidium(n0: f64) -> Result<Self> {
        Self::new(RB87_L3, n0)
    }

    /// Loss rate at `t = 0`, `L3 n0^2`.
    pub fn initial_rate(&self) -> f64 {
        self.l3 * self.n0 * self.n0
    }

    /// `n(t) = n0 / sqrt(1 + 2 L3 n0^2 t)`.
    pub fn density(&self, t: f64) -> Result<f64> {
        ensure(
            t.is_finite() && t >= 0.0,
            "t",
            format!("must be non-negative, got {t}"),
        )?;
        Ok(self.n0 / (1.0 + 2.0 * self.initial_rate() * t).sqrt())
    }

    /// Instantaneous loss rate `L3 n(t)^2`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        let n = self.density(t)?;
        Ok(self.l3 * n * n)
    }

    /// Time for the density to halve, `3 / (2 L3 n0^2)`.
    pub fn half_life(&self) -> f64 {
        1.5 / self.initial_rate()
    }

    /// Half-lives at `L3 -+ sigma` for rubidium, shortest first.
    pub fn rubidium_half_life_band(n0: f64) -> Result<(f64, f64)> {
        let hi = Self::new(RB87_L3 + RB87_L3_SIGMA, n0)?;
        let lo = Self::new(RB87_L3 - RB87_L3_SIGMA, n0)?;
        Ok((hi.half_life(), lo.half_life()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn half_life_identity() {
        let p = ThreeBodyParams::rubidium(3.2e20).unwrap();
        assert_eq!(p.density(0.0).unwrap(), 3.2e20);
        assert_relative_eq!(
            p.density(p.half_life()).unwrap(),
            1.6e20,
            max_relative = 1e-15
        );
        assert_relative_eq!(p.half_life(), 1.5 / p.initial_rate(), max_relative = 1e-15);
    }

    #[test]
    fn doubling_density_quarters_half_life() {
        let a = ThreeBodyParams::rubidium(1e20).unwrap();
        let b = ThreeBodyParams::rubidium(2e20).unwrap();
        assert_relative_eq!(b.half_life(), a.half_life() / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn rubidium_reference_values() {
        let p = ThreeBodyParams::rubidium(3.2e20).unwrap();
        assert!((p.initial_rate() - 0.5939).abs() < 1e-3);
        assert!((p.half_life() - 2.526).abs() < 1e-3);
        let (short, long) = ThreeBodyParams::rubidium_half_life_band(3.2e20).unwrap();
        assert!(short < p.half_life() && p.half_life() < long);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ThreeBodyParams::new(0.0, 1.0).is_err());
        assert!(ThreeBodyParams::new(1.0, -1.0).is_err());
        assert!(ThreeBodyParams::new(1.0, 1.0)
            .unwrap()
            .density(-1.0)
            .is_err());
    }
}
