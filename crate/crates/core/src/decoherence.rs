//! Closed-form purity, nonclassical depth, squeezing and occupation of a
//! single mode relaxing through the thermal channel.

use crate::error::{ensure, ensure_finite, Error, Result};
use crate::gaussian::{GaussianState, SingleModeParams};

/// Parameters shared by every metric: initial purity and squeezing, the
/// asymptotic purity and the net damping rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub mu0: f64,
    pub r0: f64,
    pub mu_inf: f64,
    pub gamma: f64,
}

impl Relaxation {
    pub fn new(mu0: f64, r0: f64, mu_inf: f64, gamma: f64) -> Result<Self> {
        for (v, name) in [
            (mu0, "mu0"),
            (r0, "r0"),
            (mu_inf, "mu_inf"),
            (gamma, "gamma"),
        ] {
            ensure_finite(v, name)?;
        }
        ensure(
            mu0 > 0.0 && mu0 <= 1.0,
            "mu0",
            format!("must lie in (0, 1], got {mu0}"),
        )?;
        ensure(
            mu_inf > 0.0 && mu_inf <= 1.0,
            "mu_inf",
            format!("must lie in (0, 1], got {mu_inf}"),
        )?;
        ensure(r0 >= 0.0, "r0", format!("must be non-negative, got {r0}"))?;
        ensure(
            gamma >= 0.0,
            "gamma",
            format!("must be non-negative, got {gamma}"),
        )?;
        Ok(Self {
            mu0,
            r0,
            mu_inf,
            gamma,
        })
    }

    fn decay(&self, t: f64) -> f64 {
        (-self.gamma * t).exp()
    }

    /// Principal variances of `4 kappa^2 sigma(t)`, larger first.
    fn variances(&self, t: f64) -> (f64, f64) {
        let x = self.decay(t);
        let bath = -(-self.gamma * t).exp_m1() / self.mu_inf;
        let up = x * (2.0 * self.r0).exp() / self.mu0 + bath;
        let down = x * (-2.0 * self.r0).exp() / self.mu0 + bath;
        (up, down)
    }
}

fn check_time(t: f64) -> Result<()> {
    ensure(
        t.is_finite() && t >= 0.0,
        "t",
        format!("must be non-negative, got {t}"),
    )
}

/// `mu(t) = mu0 [e^{-2 gamma t} + (mu0/mu_inf)^2 (1 - e^{-gamma t})^2
///   + 2 (mu0/mu_inf) e^{-gamma t} (1 - e^{-gamma t}) cosh 2 r0]^{-1/2}`.
pub fn purity_evolution(p: &Relaxation, t: f64) -> Result<f64> {
    check_time(t)?;
    let x = p.decay(t);
    let y = -(-p.gamma * t).exp_m1();
    let a = p.mu0 / p.mu_inf;
    let bracket = x * x + a * a * y * y + 2.0 * a * x * y * (2.0 * p.r0).cosh();
    Ok(p.mu0 / bracket.sqrt())
}

/// Time of the interior purity minimum, if there is one.
///
/// Requires the logarithm's argument to exceed one and the purity to be
/// falling at `t = 0`.
pub fn purity_minimum_time(p: &Relaxation) -> Option<f64> {
    if p.gamma <= 0.0 {
        return None;
    }
    let a = p.mu0 / p.mu_inf;
    let c = (2.0 * p.r0).cosh();
    // d mu/dt at t = 0 is -mu0 gamma (a c - 1)
    if a * c <= 1.0 {
        return None;
    }
    let arg = (a + 1.0 / a - 2.0 * c) / (a - c);
    if !(arg.is_finite() && arg > 1.0) {
        return None;
    }
    Some(arg.ln() / p.gamma)
}

/// `tau(t) = max{(1/2 mu_inf) [e^{-gamma t} (1 - (mu_inf/mu0) e^{-2 r0}) + mu_inf - 1], 0}`.
pub fn nonclassical_depth_evolution(p: &Relaxation, t: f64) -> Result<f64> {
    check_time(t)?;
    let (_, down) = p.variances(t);
    Ok((0.5 * (1.0 - down)).max(0.0))
}

/// Time at which the nonclassical depth reaches zero.
///
/// Zero when the state starts classical, infinite when it never becomes
/// classical (pure bath, or no damping).
pub fn classicality_time(p: &Relaxation) -> f64 {
    let b = (p.mu_inf / p.mu0) * (-2.0 * p.r0).exp();
    if b >= p.mu_inf {
        return 0.0;
    }
    if 1.0 - p.mu_inf <= f64::EPSILON || p.gamma <= 0.0 {
        return f64::INFINITY;
    }
    ((1.0 - b) / (1.0 - p.mu_inf)).ln() / p.gamma
}

/// Squeezing `r(t)`, from `cosh 2r(t) = mu(t) [e^{-gamma t} cosh 2r0 / mu0 + (1 - e^{-gamma t}) / mu_inf]`.
///
/// Evaluated as a quarter of the log-ratio of the principal variances, which is
/// the same quantity without the loss of precision of `arccosh` near one.
pub fn squeezing_evolution(p: &Relaxation, t: f64) -> Result<f64> {
    check_time(t)?;
    let (_, down) = p.variances(t);
    let gap = 2.0 * p.decay(t) * (2.0 * p.r0).sinh() / p.mu0;
    Ok(0.25 * (gap / down).ln_1p())
}

/// `N(t) = e^{-gamma t} N0 + (1 - e^{-gamma t}) N_th`.
pub fn occupation_evolution(n0: f64, n_th: f64, gamma: f64, t: f64) -> Result<f64> {
    ensure(n0 >= 0.0, "n0", format!("must be non-negative, got {n0}"))?;
    ensure(
        n_th >= 0.0,
        "n_th",
        format!("must be non-negative, got {n_th}"),
    )?;
    ensure(
        gamma >= 0.0,
        "gamma",
        format!("must be non-negative, got {gamma}"),
    )?;
    check_time(t)?;
    let x = (-gamma * t).exp();
    Ok(x * n0 - (-gamma * t).exp_m1() * n_th)
}

/// Nonclassical depth of a single-mode state, `max{(1 - 4 kappa^2 v_min)/2, 0}`
/// with `v_min` the smallest quadrature variance.
pub fn nonclassical_depth(state: &GaussianState) -> Result<f64> {
    if state.modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: 2 * state.modes(),
        });
    }
    let s = state.covariance();
    let (a, b, c) = (s[(0, 0)], s[(1, 1)], s[(0, 1)]);
    let mean = 0.5 * (a + b);
    let spread = (0.5 * (a - b)).hypot(c);
    // smallest eigenvalue without cancellation: det / largest
    let vmin = (a * b - c * c) / (mean + spread);
    let scaled = vmin / state.convention().vacuum_eigenvalue();
    Ok((0.5 * (1.0 - scaled)).max(0.0))
}

/// Metric series on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTrajectory {
    pub t: Vec<f64>,
    pub mu: Vec<f64>,
    pub tau: Vec<f64>,
    pub r: Vec<f64>,
    pub n: Vec<f64>,
    pub t_min: Option<f64>,
    /// Infinite when the state never becomes classical.
    pub t_tau0: f64,
    pub mu_inf: f64,
}

impl MetricTrajectory {
    /// Evaluates every metric for an initial state described by `initial`
    /// relaxing at rate `gamma` towards the thermal state of purity `mu_inf`.
    pub fn compute(
        initial: &SingleModeParams,
        mu_inf: f64,
        gamma: f64,
        times: &[f64],
    ) -> Result<Self> {
        let p = Relaxation::new(initial.mu, initial.r, mu_inf, gamma)?;
        let n_th = 0.5 * (1.0 / mu_inf - 1.0);
        let mut out = Self {
            t: times.to_vec(),
            mu: Vec::with_capacity(times.len()),
            tau: Vec::with_capacity(times.len()),
            r: Vec::with_capacity(times.len()),
            n: Vec::with_capacity(times.len()),
            t_min: purity_minimum_time(&p),
            t_tau0: classicality_time(&p),
            mu_inf,
        };
        for &t in times {
            out.mu.push(purity_evolution(&p, t)?);
            out.tau.push(nonclassical_depth_evolution(&p, t)?);
            out.r.push(squeezing_evolution(&p, t)?);
            out.n.push(occupation_evolution(initial.n, n_th, gamma, t)?);
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn relax(mu0: f64, r0: f64, mu_inf: f64, gamma: f64) -> Relaxation {
        Relaxation::new(mu0, r0, mu_inf, gamma).unwrap()
    }

    #[test]
    fn endpoints() {
        let p = relax(0.8, 1.2, 0.6, 0.5);
        assert_relative_eq!(
            purity_evolution(&p, 0.0).unwrap(),
            0.8,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            squeezing_evolution(&p, 0.0).unwrap(),
            1.2,
            max_relative = 1e-14
        );
        assert!((purity_evolution(&p, 100.0).unwrap() - 0.6).abs() < 1e-12);
        assert!(squeezing_evolution(&p, 100.0).unwrap() < 1e-10);
        assert!(purity_evolution(&p, -1.0).is_err());
        assert!(Relaxation::new(1.1, 0.0, 1.0, 1.0).is_err());
        assert!(Relaxation::new(1.0, -0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn purity_minimum_of_pure_squeezed_vacuum() {
        let p = relax(1.0, 10.0, 1.0, 0.738);
        let t = purity_minimum_time(&p).unwrap();
        assert_relative_eq!(t, 2f64.ln() / 0.738, max_relative = 1e-12);
        assert!((t - 0.94).abs() < 0.005);
        assert!(purity_minimum_time(&relax(0.7, 0.0, 0.7, 1.0)).is_none());
        // thermal state relaxing to a purer bath: purity rises monotonically
        assert!(purity_minimum_time(&relax(0.3, 0.0, 1.0, 1.0)).is_none());
    }

    fn brute_force_minimum(p: &Relaxation) -> f64 {
        let mu = |t: f64| purity_evolution(p, t).unwrap();
        let span = 20.0 / p.gamma;
        let n = 4000;
        let (mut best, mut best_t) = (f64::INFINITY, 0.0);
        for i in 0..=n {
            let t = span * i as f64 / n as f64;
            if mu(t) < best {
                best = mu(t);
                best_t = t;
            }
        }
        // golden-section refinement around the grid minimum
        let h = span / n as f64;
        let (mut a, mut b) = ((best_t - h).max(0.0), best_t + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if mu(c) < mu(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn purity_minimum_matches_brute_force() {
        for &(mu0, r0, mu_inf, gamma) in &[
            (1.0, 10.0, 1.0, 0.738),
            (0.9, 1.5, 0.8, 2.0),
            (0.5, 2.0, 0.95, 0.3),
            (1.0, 0.8, 0.7, 1.0),
        ] {
            let p = relax(mu0, r0, mu_inf, gamma);
            let closed = purity_minimum_time(&p).unwrap();
            let brute = brute_force_minimum(&p);
            assert!((closed - brute).abs() < 1e-6 / gamma, "{closed} vs {brute}");
        }
    }

    #[test]
    fn purity_minimum_scales_inversely_with_rate() {
        let base = purity_minimum_time(&relax(0.9, 1.5, 0.8, 1.0)).unwrap();
        for k in [0.1, 3.0, 17.0] {
            let t = purity_minimum_time(&relax(0.9, 1.5, 0.8, k)).unwrap();
            assert_relative_eq!(t * k, base, max_relative = 1e-14);
        }
    }

    #[test]
    fn nonclassical_depth_values() {
        let p = relax(1.0, 10.0, 1.0, 0.738);
        let tau0 = nonclassical_depth_evolution(&p, 0.0).unwrap();
        assert_relative_eq!(tau0, 0.5 * (1.0 - (-20f64).exp()), max_relative = 1e-15);
        let t = 1.3;
        assert_relative_eq!(
            nonclassical_depth_evolution(&p, t).unwrap(),
            0.5 * (1.0 - (-20f64).exp()) * (-0.738 * t).exp(),
            max_relative = 1e-12
        );
        let thermal = relax(0.6, 0.0, 0.6, 1.0);
        for t in [0.0, 0.5, 4.0] {
            assert_eq!(nonclassical_depth_evolution(&thermal, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn classicality_time_values() {
        assert_eq!(
            classicality_time(&relax(1.0, 10.0, 1.0, 0.738)),
            f64::INFINITY
        );
        let p = relax(1.0, 1.0, 0.9, 1.0);
        let t = classicality_time(&p);
        let expected = ((1.0 - 0.9 * (-2f64).exp()) / 0.1).ln();
        assert_relative_eq!(t, expected, max_relative = 1e-14);
        assert!((t - 2.1727).abs() < 1e-4);
        // tau at the crossing, before clamping
        let x = (-t).exp();
        let raw = (x * (1.0 - 0.9 * (-2f64).exp()) + 0.9 - 1.0) / 1.8;
        assert!(raw.abs() < 1e-12);
        assert_eq!(classicality_time(&relax(0.3, 0.1, 0.9, 1.0)), 0.0);
    }

    #[test]
    fn occupation_halves_every_ln2_over_gamma() {
        let n0 = 10f64.sinh().powi(2);
        let g = 0.738;
        let t = 2f64.ln() / g;
        assert_relative_eq!(
            occupation_evolution(n0, 0.0, g, t).unwrap(),
            n0 / 2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            occupation_evolution(n0, 0.0, g, 3.0 * t).unwrap(),
            n0 / 8.0,
            max_relative = 1e-13
        );
        assert_eq!(occupation_evolution(0.4, 0.4, g, 5.0).unwrap(), 0.4);
    }

    #[test]
    fn zero_rate_freezes_metrics() {
        let p = relax(0.9, 1.1, 0.7, 0.0);
        for t in [0.0, 1.0, 1e3] {
            assert_relative_eq!(purity_evolution(&p, t).unwrap(), 0.9, max_relative = 1e-15);
            assert_relative_eq!(
                squeezing_evolution(&p, t).unwrap(),
                1.1,
                max_relative = 1e-14
            );
        }
        assert!(purity_minimum_time(&p).is_none());
    }

    #[test]
    fn depth_of_state_matches_closed_form() {
        use crate::gaussian::{state_from_params, SymplecticConvention};
        let conv = SymplecticConvention::default();
        let s = state_from_params(0.8, 0.4, 1.0, [0.0, 0.0], conv).unwrap();
        let p = relax(0.8, 0.4, 1.0, 1.0);
        assert_relative_eq!(
            nonclassical_depth(&s).unwrap(),
            nonclassical_depth_evolution(&p, 0.0).unwrap(),
            max_relative = 1e-13
        );
    }
}
