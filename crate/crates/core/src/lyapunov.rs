//! Evolution of first and second moments under a Gaussian Lindblad channel.
//!
//! `dd/dt = H1 + A d` and `dsigma/dt = A sigma + sigma A^T + D`, with drift
//! `A` and diffusion `D` built from the quadratic Hamiltonian and the
//! Lindblad operators `c_i = C_ij x_j`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::constants::HBAR;
use crate::error::{ensure, Error, Result};
use crate::gaussian::{symplectic_form, GaussianState, SymplecticConvention, UNCERTAINTY_SLACK};

/// `H = H0 + kappa x^T H1 + kappa^2 x^T H2 x`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    pub h0: f64,
    pub h1: DVector<f64>,
    pub h2: DMatrix<f64>,
}

impl QuadraticHamiltonian {
    pub fn new(h0: f64, h1: DVector<f64>, h2: DMatrix<f64>) -> Result<Self> {
        let n = h2.nrows();
        if h2.ncols() != n || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h2.ncols(),
            });
        }
        if h1.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: h1.len(),
            });
        }
        let asym = (&h2 - h2.transpose()).amax();
        if asym > 1e-12 * h2.amax() {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { h0, h1, h2 })
    }

    /// Free single-mode oscillator `hbar omega b^dagger b` (up to a constant).
    pub fn oscillator(omega: f64) -> Self {
        Self {
            h0: 0.0,
            h1: DVector::zeros(2),
            h2: DMatrix::identity(2, 2) * (HBAR * omega),
        }
    }

    pub fn dim(&self) -> usize {
        self.h2.nrows()
    }

    /// Hamiltonian part of the drift, `Omega H2 / hbar`.
    pub fn drift(&self) -> DMatrix<f64> {
        symplectic_form(self.dim() / 2) * &self.h2 / HBAR
    }

    /// Source term of `dd/dt`, `Omega H1 / (2 kappa hbar)`.
    pub fn source(&self, convention: SymplecticConvention) -> DVector<f64> {
        symplectic_form(self.dim() / 2) * &self.h1 / (2.0 * convention.kappa * HBAR)
    }
}

/// Parameters of the single-mode thermal channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalChannel {
    pub gamma: f64,
    pub omega_prime: f64,
    pub n_th: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LindbladChannel {
    pub drift: DMatrix<f64>,
    pub diffusion: DMatrix<f64>,
    pub source: DVector<f64>,
    pub convention: SymplecticConvention,
    pub thermal: Option<ThermalChannel>,
}

impl LindbladChannel {
    /// `A = -(gamma/2) I + omega' Omega`, `D = gamma sigma_inf`.
    pub fn thermal(
        gamma: f64,
        omega_prime: f64,
        n_th: f64,
        convention: SymplecticConvention,
    ) -> Result<Self> {
        ensure(gamma.is_finite(), "gamma", "must be finite")?;
        ensure(
            n_th.is_finite() && n_th >= 0.0,
            "n_th",
            "must be non-negative",
        )?;
        let omega = symplectic_form(1);
        let drift = DMatrix::identity(2, 2) * (-0.5 * gamma) + omega * omega_prime;
        let diffusion = sigma_inf(n_th, convention) * gamma;
        Ok(Self {
            drift,
            diffusion,
            source: DVector::zeros(2),
            convention,
            thermal: Some(ThermalChannel {
                gamma,
                omega_prime,
                n_th,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.drift.nrows()
    }

    /// `A sigma + sigma A^T + D`.
    pub fn lyapunov_residual(&self, sigma: &DMatrix<f64>) -> DMatrix<f64> {
        &self.drift * sigma + sigma * self.drift.transpose() + &self.diffusion
    }
}

/// Thermal covariance `(1 + 2 N_th) / (4 kappa^2) I`.
pub fn sigma_inf(n_th: f64, convention: SymplecticConvention) -> DMatrix<f64> {
    DMatrix::identity(2, 2) * ((1.0 + 2.0 * n_th) * convention.vacuum_eigenvalue())
}

/// Builds drift and diffusion from a quadratic Hamiltonian and the rows of `C`.
///
/// `D = Omega Re(C^dagger C) Omega^T / (4 kappa^4)` and
/// `A = Omega H2 / hbar + Omega Im(C^dagger C) / (2 kappa^2)`.
pub fn channel_from_lindblad_ops(
    hamiltonian: &QuadraticHamiltonian,
    c: &DMatrix<Complex64>,
    convention: SymplecticConvention,
) -> Result<LindbladChannel> {
    let n = hamiltonian.dim();
    if c.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.ncols(),
        });
    }
    let omega = symplectic_form(n / 2);
    let ctc = c.adjoint() * c;
    let re = ctc.map(|z| z.re);
    let im = ctc.map(|z| z.im);
    let k2 = convention.kappa2();
    let diffusion = &omega * re * omega.transpose() / (4.0 * k2 * k2);
    let diffusion = (&diffusion + diffusion.transpose()) * 0.5;
    let drift = hamiltonian.drift() + &omega * im / (2.0 * k2);
    Ok(LindbladChannel {
        drift,
        diffusion,
        source: hamiltonian.source(convention),
        convention,
        thermal: None,
    })
}

/// Rows of `C` for `c_1 = sqrt(gamma_1) b`, `c_2 = sqrt(gamma_2) b^dagger`,
/// using `b = kappa (x_1 + i x_2)`.
pub fn thermal_jump_matrix(
    gamma_1: f64,
    gamma_2: f64,
    convention: SymplecticConvention,
) -> DMatrix<Complex64> {
    let k = convention.kappa;
    let a = gamma_1.sqrt() * k;
    let b = gamma_2.sqrt() * k;
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(a, 0.0),
            Complex64::new(0.0, a),
            Complex64::new(b, 0.0),
            Complex64::new(0.0, -b),
        ],
    )
}

/// Phase-space rotation `R(t) = cos(w t) I + sin(w t) Omega`.
pub fn rotation(omega_prime: f64, t: f64) -> DMatrix<f64> {
    let (s, c) = (omega_prime * t).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, -s, c])
}

/// Closed-form evolution under the constant single-mode thermal channel:
/// `d(t) = e^{-gamma t/2} R d_0`, `sigma(t) = e^{-gamma t} R sigma_0 R^T + (1 - e^{-gamma t}) sigma_inf`.
pub fn evolve_closed_form(
    state: &GaussianState,
    channel: &LindbladChannel,
    t: f64,
) -> Result<GaussianState> {
    ensure(
        t.is_finite() && t >= 0.0,
        "t",
        format!("must be non-negative, got {t}"),
    )?;
    let th = channel.thermal.ok_or(Error::InvalidParameter {
        name: "channel",
        reason: "closed form requires the single-mode thermal channel".into(),
    })?;
    if state.modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: 2 * state.modes(),
        });
    }
    let conv = state.convention();
    let decay = (-th.gamma * t).exp();
    let r = rotation(th.omega_prime, t);
    let d = &r * state.displacement() * (-0.5 * th.gamma * t).exp();
    let rotated = if th.omega_prime == 0.0 {
        state.covariance().clone()
    } else {
        &r * state.covariance() * r.transpose()
    };
    let sigma = rotated * decay + sigma_inf(th.n_th, conv) * (-(-th.gamma * t).exp_m1());
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    Ok(GaussianState::from_parts_unchecked(d, sigma, conv))
}

/// Time-dependent drift, diffusion and source.
pub trait ChannelSchedule {
    fn drift(&self, t: f64) -> DMatrix<f64>;
    fn diffusion(&self, t: f64) -> DMatrix<f64>;
    fn source(&self, t: f64) -> DVector<f64>;
}

impl ChannelSchedule for LindbladChannel {
    fn drift(&self, _t: f64) -> DMatrix<f64> {
        self.drift.clone()
    }
    fn diffusion(&self, _t: f64) -> DMatrix<f64> {
        self.diffusion.clone()
    }
    fn source(&self, _t: f64) -> DVector<f64> {
        self.source.clone()
    }
}

/// Schedule assembled from closures.
pub struct FnSchedule<A, D, S> {
    pub drift: A,
    pub diffusion: D,
    pub source: S,
}

impl<A, D, S> ChannelSchedule for FnSchedule<A, D, S>
where
    A: Fn(f64) -> DMatrix<f64>,
    D: Fn(f64) -> DMatrix<f64>,
    S: Fn(f64) -> DVector<f64>,
{
    fn drift(&self, t: f64) -> DMatrix<f64> {
        (self.drift)(t)
    }
    fn diffusion(&self, t: f64) -> DMatrix<f64> {
        (self.diffusion)(t)
    }
    fn source(&self, t: f64) -> DVector<f64> {
        (self.source)(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    /// Local error tolerance per step, relative to the state magnitude.
    pub step_tol: f64,
    pub initial_step: Option<f64>,
    /// Smallest step, relative to the grid span, before giving up.
    pub min_step_fraction: f64,
    /// Relative slack allowed below the uncertainty bound.
    pub uncertainty_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_tol: 1e-12,
            initial_step: None,
            min_step_fraction: 1e-14,
            uncertainty_tol: 1e-8,
        }
    }
}

#[derive(Clone)]
struct Moments {
    d: DVector<f64>,
    sigma: DMatrix<f64>,
}

impl Moments {
    fn axpy(&self, h: f64, k: &Moments) -> Moments {
        Moments {
            d: &self.d + &k.d * h,
            sigma: &self.sigma + &k.sigma * h,
        }
    }

    fn scale(&self) -> f64 {
        self.d.amax().max(self.sigma.amax())
    }

    fn distance(&self, other: &Moments) -> f64 {
        (&self.d - &other.d)
            .amax()
            .max((&self.sigma - &other.sigma).amax())
    }
}

fn rhs<S: ChannelSchedule>(schedule: &S, t: f64, y: &Moments) -> Moments {
    let a = schedule.drift(t);
    Moments {
        d: schedule.source(t) + &a * &y.d,
        sigma: &a * &y.sigma + &y.sigma * a.transpose() + schedule.diffusion(t),
    }
}

fn rk4_step<S: ChannelSchedule>(schedule: &S, t: f64, h: f64, y: &Moments) -> Moments {
    let k1 = rhs(schedule, t, y);
    let k2 = rhs(schedule, t + 0.5 * h, &y.axpy(0.5 * h, &k1));
    let k3 = rhs(schedule, t + 0.5 * h, &y.axpy(0.5 * h, &k2));
    let k4 = rhs(schedule, t + h, &y.axpy(h, &k3));
    let mut out = Moments {
        d: &y.d + (&k1.d + &k2.d * 2.0 + &k3.d * 2.0 + &k4.d) * (h / 6.0),
        sigma: &y.sigma + (&k1.sigma + &k2.sigma * 2.0 + &k3.sigma * 2.0 + &k4.sigma) * (h / 6.0),
    };
    out.sigma = (&out.sigma + out.sigma.transpose()) * 0.5;
    out
}

/// Integrates the moment equations over a caller-supplied grid.
///
/// Classic fourth-order Runge-Kutta with step-doubling error control: each
/// step is compared against two half steps and halved until the difference is
/// within `step_tol`. `sigma` is re-symmetrised after every step. The first
/// grid point is the initial time; the returned trajectory has one state per
/// grid point.
pub fn evolve_numeric<S: ChannelSchedule>(
    state: &GaussianState,
    schedule: &S,
    t_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<GaussianState>> {
    ensure(!t_grid.is_empty(), "t_grid", "must not be empty")?;
    for (i, w) in t_grid.windows(2).enumerate() {
        if w[1].partial_cmp(&w[0]) != Some(Ordering::Greater) {
            return Err(Error::NonMonotonicGrid(i + 1));
        }
    }
    let n = 2 * state.modes();
    let a0 = schedule.drift(t_grid[0]);
    if a0.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a0.nrows(),
        });
    }
    let conv = state.convention();
    let span = t_grid[t_grid.len() - 1] - t_grid[0];
    let min_step = cfg.min_step_fraction * span.max(f64::MIN_POSITIVE);
    let mut h = cfg.initial_step.unwrap_or_else(|| {
        let rate = a0.amax().max(schedule.diffusion(t_grid[0]).amax());
        if rate > 0.0 {
            0.1 / rate
        } else {
            span.max(1.0)
        }
    });

    let mut y = Moments {
        d: state.displacement().clone(),
        sigma: state.covariance().clone(),
    };
    let mut t = t_grid[0];
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(state.clone());
    for &target in &t_grid[1..] {
        while t < target {
            let step = h.min(target - t);
            let full = rk4_step(schedule, t, step, &y);
            let half = rk4_step(schedule, t, 0.5 * step, &y);
            let two = rk4_step(schedule, t + 0.5 * step, 0.5 * step, &half);
            let err = full.distance(&two) / (1.0 + two.scale());
            if err <= cfg.step_tol {
                // Richardson extrapolation of the two estimates
                y = Moments {
                    d: &two.d + (&two.d - &full.d) / 15.0,
                    sigma: &two.sigma + (&two.sigma - &full.sigma) / 15.0,
                };
                t = if target - t <= step { target } else { t + step };
                if err < cfg.step_tol / 64.0 && step == h {
                    h *= 2.0;
                }
            } else {
                h = 0.5 * step;
                if h < min_step {
                    return Err(Error::StepSizeUnderflow { t, step: h });
                }
            }
        }
        let s = GaussianState::from_parts_unchecked(y.d.clone(), y.sigma.clone(), conv);
        let bound = conv.vacuum_eigenvalue();
        let smin = s.min_symplectic_eigenvalue();
        if smin.is_nan() || smin < bound * (1.0 - cfg.uncertainty_tol.max(UNCERTAINTY_SLACK)) {
            return Err(Error::UncertaintyViolation { value: smin, bound });
        }
        out.push(s);
    }
    Ok(out)
}
