//! Phonon damping rates.
//!
//! Three closed forms cover the quantum (Beliaev-dominated), high-temperature
//! and low-temperature (Landau-dominated) regimes. The full Beliaev and Landau
//! collision integrals are evaluated numerically for everything in between.
//!
//! Rates here are the Lindblad net rate `gamma = gamma_1 - gamma_2`
//! (downward minus upward), the rate at which `<b^dagger b>` relaxes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bec::{
    group_velocity, inverse_temperature, invert_dispersion_unchecked, thermal_occupation,
    uv_sum_diff, CondensateParams,
};
use crate::constants::HBAR;
use crate::error::{ensure, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// `k_B T / (hbar omega)` below which the quantum regime applies.
pub const QUANTUM_RATIO_MAX: f64 = 0.3;
/// Minimum ratio that stands in for "much greater than".
pub const SEPARATION_RATIO: f64 = 3.0;
/// Landau integrals are cut off at `LANDAU_CUTOFF * k_B T / hbar`, where the
/// thermal factor is below `e^{-40}`.
const LANDAU_CUTOFF: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Quantum,
    ThermalHigh,
    ThermalLow,
    Integral,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Quantum => "quantum",
            Regime::ThermalHigh => "thermal_high",
            Regime::ThermalLow => "thermal_low",
            Regime::Integral => "integral",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Closed-form rate together with whether its validity conditions hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticRate {
    pub rate: f64,
    pub in_regime: bool,
}

/// Dimensionless energy ratios that decide the regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRatios {
    /// `k_B T / (hbar omega_q)`
    pub thermal_to_mode: f64,
    /// `k_B T / mu`
    pub thermal_to_chemical: f64,
    /// `mu / (hbar omega_q)`
    pub chemical_to_mode: f64,
}

impl RegimeRatios {
    pub fn new(omega_q: f64, params: &CondensateParams) -> Self {
        let kt = params.thermal_energy();
        let mu = params.chemical_potential();
        let e = HBAR * omega_q;
        Self {
            thermal_to_mode: kt / e,
            thermal_to_chemical: kt / mu,
            chemical_to_mode: mu / e,
        }
    }

    pub fn quantum(&self) -> bool {
        self.thermal_to_mode < QUANTUM_RATIO_MAX
    }

    pub fn thermal_high(&self) -> bool {
        self.thermal_to_chemical > SEPARATION_RATIO && self.chemical_to_mode > SEPARATION_RATIO
    }

    pub fn thermal_low(&self) -> bool {
        self.thermal_to_chemical < 1.0 / SEPARATION_RATIO && self.thermal_to_mode > SEPARATION_RATIO
    }

    /// Regime whose closed form applies, or `Integral` when none does.
    pub fn regime(&self) -> Regime {
        if self.quantum() {
            Regime::Quantum
        } else if self.thermal_high() {
            Regime::ThermalHigh
        } else if self.thermal_low() {
            Regime::ThermalLow
        } else {
            Regime::Integral
        }
    }
}

fn check_frequency(omega_q: f64) -> Result<()> {
    ensure(
        omega_q.is_finite() && omega_q > 0.0,
        "omega_q",
        format!("must be positive, got {omega_q}"),
    )
}

/// Beliaev rate `(3/640 pi) hbar omega^5 / (m n c^5) [1 + (k_B T / hbar omega)^3]`.
pub fn gamma_beliaev_asymptotic(omega_q: f64, params: &CondensateParams) -> Result<AsymptoticRate> {
    check_frequency(omega_q)?;
    let c = params.sound_speed();
    let ratios = RegimeRatios::new(omega_q, params);
    let rate = 3.0 / (640.0 * PI) * HBAR * omega_q.powi(5)
        / (params.mass() * params.density() * c.powi(5))
        * (1.0 + ratios.thermal_to_mode.powi(3));
    Ok(AsymptoticRate {
        rate,
        in_regime: ratios.quantum(),
    })
}

/// High-temperature Landau rate `(3 pi / 8) (k_B T a / hbar c_s) omega`.
pub fn gamma_landau_high_t(omega_q: f64, params: &CondensateParams) -> Result<AsymptoticRate> {
    check_frequency(omega_q)?;
    let rate = 3.0 * PI / 8.0 * params.thermal_energy() * params.scattering_length()
        / (HBAR * params.sound_speed())
        * omega_q;
    Ok(AsymptoticRate {
        rate,
        in_regime: RegimeRatios::new(omega_q, params).thermal_high(),
    })
}

/// Low-temperature Landau rate `(3 pi^3 / 40) (k_B T)^4 omega / (m n hbar^3 c_s^5)`.
pub fn gamma_landau_low_t(omega_q: f64, params: &CondensateParams) -> Result<AsymptoticRate> {
    check_frequency(omega_q)?;
    let rate = 3.0 * PI.powi(3) / 40.0 * params.thermal_energy().powi(4) * omega_q
        / (params.mass() * params.density() * HBAR.powi(3) * params.sound_speed().powi(5));
    Ok(AsymptoticRate {
        rate,
        in_regime: RegimeRatios::new(omega_q, params).thermal_low(),
    })
}

/// Cubic vertex factors for the mode `q` coupling to `k` and `k'`.
///
/// `l` already includes the factor two that the definition of the Landau
/// vertex carries on its left-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionCoefficients {
    pub a: f64,
    pub b: f64,
    pub l: f64,
}

/// Evaluates the three vertex polynomials in `u`, `v`.
///
/// The polynomials are rewritten in `S = u + v`, `D = u - v`, for example
/// `B = (3/4) S_q S S' - (1/4) S_q D D' + (1/4) D_q (S D' + D S')`, which is an
/// algebraic identity but avoids the O(1/x^{3/2}) cancellation between terms
/// deep in the phonon regime.
pub fn vertex_coefficients(
    q: f64,
    k: f64,
    k_prime: f64,
    params: &CondensateParams,
) -> Result<InteractionCoefficients> {
    for (v, name) in [(q, "q"), (k, "k"), (k_prime, "k_prime")] {
        ensure(
            v.is_finite() && v > 0.0,
            name,
            "wavenumber must be positive",
        )?;
    }
    Ok(vertices(q, k, k_prime, params))
}

fn vertices(q: f64, k: f64, kp: f64, p: &CondensateParams) -> InteractionCoefficients {
    let (sq, dq) = uv_sum_diff(q, p);
    let (s1, d1) = uv_sum_diff(k, p);
    let (s2, d2) = uv_sum_diff(kp, p);
    let sss = sq * s1 * s2;
    let cross = s1 * d2 + d1 * s2;
    InteractionCoefficients {
        a: 0.75 * sss - 0.25 * sq * d1 * d2 - 0.25 * dq * cross,
        b: 0.75 * sss - 0.25 * sq * d1 * d2 + 0.25 * dq * cross,
        l: 0.5 * sq * (3.0 * s1 * s2 + d1 * d2) + 0.5 * dq * (s1 * d2 - d1 * s2),
    }
}

/// Beliaev and Landau rates from the collision integrals, with each split
/// into its downward (`_down`, loss from mode q) and upward (`_up`) part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionRates {
    pub gamma_b: f64,
    pub gamma_l: f64,
    pub beliaev_down: f64,
    pub beliaev_up: f64,
    pub landau_down: f64,
    pub landau_up: f64,
}

impl CollisionRates {
    pub fn gamma(&self) -> f64 {
        self.gamma_b + self.gamma_l
    }
    pub fn down(&self) -> f64 {
        self.beliaev_down + self.landau_down
    }
    pub fn up(&self) -> f64 {
        self.beliaev_up + self.landau_up
    }
}

#[derive(Clone, Copy)]
enum Process {
    Beliaev,
    Landau,
}

struct Kernel<'a> {
    params: &'a CondensateParams,
    q: f64,
    omega_q: f64,
    process: Process,
}

impl Kernel<'_> {
    /// `p_k V(q;k,l)^2 <delta>` at partner frequency `omega_k`, with the
    /// volume cancelled and the energy delta averaged over the direction of k.
    /// Returns the kernel and the partner frequency `omega_l`.
    fn eval(&self, omega_k: f64) -> (f64, f64) {
        let p = self.params;
        let omega_l = match self.process {
            Process::Beliaev => self.omega_q - omega_k,
            Process::Landau => self.omega_q + omega_k,
        };
        if omega_k <= 0.0 || omega_l <= 0.0 {
            return (0.0, omega_l);
        }
        let k = invert_dispersion_unchecked(omega_k, p);
        let l = invert_dispersion_unchecked(omega_l, p);
        let q = self.q;
        if l < (q - k).abs() || l > q + k {
            return (0.0, omega_l);
        }
        let density_of_states = k * k / (2.0 * PI * PI * group_velocity(k, p));
        let mean_delta = l / (2.0 * q * k * group_velocity(l, p));
        let c = vertices(q, k, l, p);
        let vertex = match self.process {
            Process::Beliaev => c.b,
            Process::Landau => c.l,
        };
        (density_of_states * vertex * vertex * mean_delta, omega_l)
    }
}

/// Evaluates the Beliaev and Landau collision integrals.
///
/// Each energy delta is resolved by solving energy conservation for the
/// partner wavenumber on the Bogoliubov branch and averaging over the angle
/// between `q` and `k`, which gives `<delta> = l / (2 q k v_g(l))` inside the
/// kinematic window `|q - k| <= l <= q + k` and zero outside it. The volume
/// cancels between the density of states and the coupling prefactor.
pub fn gamma_integral(
    omega_q: f64,
    params: &CondensateParams,
    cfg: &QuadratureConfig,
) -> Result<CollisionRates> {
    check_frequency(omega_q)?;
    let q = invert_dispersion_unchecked(omega_q, params);
    let t = params.temperature();
    let occ = |w: f64| thermal_occupation(w, t);
    let g2n = params.coupling().powi(2) * params.density() / (HBAR * HBAR);

    let beliaev = Kernel {
        params,
        q,
        omega_q,
        process: Process::Beliaev,
    };
    let b_pref = PI * 2.0 * g2n;
    let b_net = integrate(
        |w| {
            let (kern, wl) = beliaev.eval(w);
            kern * (1.0 + occ(w) + occ(wl))
        },
        0.0,
        omega_q,
        &[0.5 * omega_q],
        cfg,
    )?
    .value
        * b_pref;

    let (beliaev_down, beliaev_up, gamma_l, landau_down, landau_up) = if t > 0.0 {
        let b_up = integrate(
            |w| {
                let (kern, wl) = beliaev.eval(w);
                kern * occ(w) * occ(wl)
            },
            0.0,
            omega_q,
            &[0.5 * omega_q],
            cfg,
        )?
        .value
            * b_pref;
        let b_down = integrate(
            |w| {
                let (kern, wl) = beliaev.eval(w);
                kern * (1.0 + occ(w)) * (1.0 + occ(wl))
            },
            0.0,
            omega_q,
            &[0.5 * omega_q],
            cfg,
        )?
        .value
            * b_pref;

        let landau = Kernel {
            params,
            q,
            omega_q,
            process: Process::Landau,
        };
        let wt = crate::constants::K_B * t / HBAR;
        let upper = LANDAU_CUTOFF * wt;
        let breaks = [wt, 5.0 * wt, omega_q];
        let l_pref = PI * g2n;
        let l_net = integrate(
            |w| {
                let (kern, wl) = landau.eval(w);
                kern * (occ(w) - occ(wl))
            },
            0.0,
            upper,
            &breaks,
            cfg,
        )?
        .value
            * l_pref;
        let l_down = integrate(
            |w| {
                let (kern, wl) = landau.eval(w);
                kern * occ(w) * (1.0 + occ(wl))
            },
            0.0,
            upper,
            &breaks,
            cfg,
        )?
        .value
            * l_pref;
        let l_up = integrate(
            |w| {
                let (kern, wl) = landau.eval(w);
                kern * (1.0 + occ(w)) * occ(wl)
            },
            0.0,
            upper,
            &breaks,
            cfg,
        )?
        .value
            * l_pref;
        (b_down, b_up, l_net, l_down, l_up)
    } else {
        (b_net, 0.0, 0.0, 0.0, 0.0)
    };

    Ok(CollisionRates {
        gamma_b: b_net,
        gamma_l,
        beliaev_down,
        beliaev_up,
        landau_down,
        landau_up,
    })
}

/// Net damping rate split into the two Lindblad rates of a thermal bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingResult {
    pub gamma: f64,
    pub gamma_b: f64,
    pub gamma_l: f64,
    /// Downward rate (coefficient of `b rho b^dagger`).
    pub gamma_1: f64,
    /// Upward rate (coefficient of `b^dagger rho b`).
    pub gamma_2: f64,
    /// `gamma_1 + gamma_2 = gamma coth(beta_q / 2)`.
    pub gamma_t: f64,
    pub beta_q: f64,
    pub n_th: f64,
    pub regime: Regime,
    /// False when a closed form was used outside its validity conditions.
    pub in_regime: bool,
}

impl DampingResult {
    /// Splits a net rate with detailed balance `gamma_1 = e^{beta_q} gamma_2`.
    pub fn from_net_rate(
        gamma: f64,
        omega_q: f64,
        temperature: f64,
        regime: Regime,
        gamma_b: f64,
        gamma_l: f64,
    ) -> Self {
        let n_th = thermal_occupation(omega_q, temperature);
        Self {
            gamma,
            gamma_b,
            gamma_l,
            gamma_1: gamma * (1.0 + n_th),
            gamma_2: gamma * n_th,
            gamma_t: gamma * (1.0 + 2.0 * n_th),
            beta_q: inverse_temperature(omega_q, temperature),
            n_th,
            regime,
            in_regime: true,
        }
    }

    /// Purity of the asymptotic thermal state, `tanh(beta_q / 2)`.
    pub fn mu_inf(&self) -> f64 {
        1.0 / (1.0 + 2.0 * self.n_th)
    }
}

/// Picks the regime from the energy ratios and returns that regime's rate,
/// falling back to the collision integrals when no closed form applies.
pub fn select_regime(
    omega_q: f64,
    params: &CondensateParams,
    cfg: &QuadratureConfig,
) -> Result<DampingResult> {
    check_frequency(omega_q)?;
    let t = params.temperature();
    let result = match RegimeRatios::new(omega_q, params).regime() {
        Regime::Quantum => {
            let g = gamma_beliaev_asymptotic(omega_q, params)?.rate;
            DampingResult::from_net_rate(g, omega_q, t, Regime::Quantum, g, 0.0)
        }
        Regime::ThermalHigh => {
            let g = gamma_landau_high_t(omega_q, params)?.rate;
            DampingResult::from_net_rate(g, omega_q, t, Regime::ThermalHigh, 0.0, g)
        }
        Regime::ThermalLow => {
            let g = gamma_landau_low_t(omega_q, params)?.rate;
            DampingResult::from_net_rate(g, omega_q, t, Regime::ThermalLow, 0.0, g)
        }
        Regime::Integral => integral_result(omega_q, params, cfg)?,
    };
    Ok(result)
}

/// Collision integrals packaged as a damping result.
pub fn integral_result(
    omega_q: f64,
    params: &CondensateParams,
    cfg: &QuadratureConfig,
) -> Result<DampingResult> {
    let c = gamma_integral(omega_q, params, cfg)?;
    let t = params.temperature();
    Ok(DampingResult::from_net_rate(
        c.gamma(),
        omega_q,
        t,
        Regime::Integral,
        c.gamma_b,
        c.gamma_l,
    ))
}

/// Closed form nearest to the current conditions, flagged when outside its regime.
pub fn nearest_asymptotic(omega_q: f64, params: &CondensateParams) -> Result<DampingResult> {
    let ratios = RegimeRatios::new(omega_q, params);
    let t = params.temperature();
    let (rate, regime) = if ratios.thermal_to_mode < 1.0 {
        (gamma_beliaev_asymptotic(omega_q, params)?, Regime::Quantum)
    } else if ratios.thermal_to_chemical > 1.0 {
        (gamma_landau_high_t(omega_q, params)?, Regime::ThermalHigh)
    } else {
        (gamma_landau_low_t(omega_q, params)?, Regime::ThermalLow)
    };
    let (gb, gl) = if regime == Regime::Quantum {
        (rate.rate, 0.0)
    } else {
        (0.0, rate.rate)
    };
    let mut r = DampingResult::from_net_rate(rate.rate, omega_q, t, regime, gb, gl);
    r.in_regime = rate.in_regime;
    Ok(r)
}
