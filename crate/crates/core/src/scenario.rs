//! Scenario files, presets, trajectories, frequency sweeps and self-checks.
//!
//! Scenarios are TOML documents with SI units spelled out in every key name:
//!
//! ```toml
//! species = "rb87"              # or mass_kg + scattering_length_m
//! sound_speed_m_s = 3.4e-3      # or density_per_m3
//! temperature_k = 0.5e-9
//! omega_rad_s = 1.0e4
//!
//! [state]
//! squeezing_r = 10.0
//! squeezing_phase_rad = 0.0
//! purity = 1.0                  # or thermal_occupation
//! displacement = [0.0, 0.0]
//!
//! [time]
//! t_end_s = 10.0                # or t_end_gamma (multiples of 1/gamma)
//! points = 500
//!
//! [rate]
//! source = "auto"               # auto | asymptotic | integral | explicit
//! gamma_per_s = 0.7             # explicit only
//! tolerance = 1e-6
//! max_subdivisions = 2000
//!
//! [three_body]
//! l3_m6_per_s = 5.8e-42
//!
//! [sweep]
//! omega_min_rad_s = 1.0e3
//! omega_max_rad_s = 1.0e4
//! points = 50
//! sound_speeds_m_s = [2.0e-3, 3.4e-3]
//! ```

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bec::{CondensateParams, Medium};
use crate::constants::{species_by_name, RB87, RB87_L3};
use crate::damping::{
    gamma_beliaev_asymptotic, gamma_integral, integral_result, nearest_asymptotic, select_regime,
    DampingResult, Regime, RegimeRatios,
};
use crate::decoherence::{purity_evolution, purity_minimum_time, MetricTrajectory, Relaxation};
use crate::error::{Error, Result};
use crate::fock::{lindblad_step_integrate, squeezed_vacuum_fock, TruncatedDensityMatrix};
use crate::gaussian::{state_from_params, GaussianState, SingleModeParams, SymplecticConvention};
use crate::lyapunov::{
    evolve_closed_form, evolve_numeric, sigma_inf, IntegratorConfig, LindbladChannel,
};
use crate::quadrature::QuadratureConfig;
use crate::three_body::ThreeBodyParams;

const FIG1: &str = r#"
species = "rb87"
sound_speed_m_s = 3.4e-3
temperature_k = 0.5e-9
omega_rad_s = 1.0e4

[state]
squeezing_r = 10.0
purity = 1.0

[time]
t_end_s = 10.0
points = 500
"#;

const FIG2: &str = r#"
species = "rb87"
sound_speed_m_s = 3.4e-3
temperature_k = 0.5e-9
omega_rad_s = 1.0e4

[state]
squeezing_r = 10.0
purity = 1.0

[sweep]
omega_min_rad_s = 1.0e3
omega_max_rad_s = 1.0e4
points = 50
sound_speeds_m_s = [2.0e-3, 2.5e-3, 3.0e-3, 3.4e-3]
"#;

/// Names accepted by [`Scenario::preset`].
pub const PRESETS: &[&str] = &["fig1", "fig2"];

/// Raw scenario file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub species: Option<String>,
    pub mass_kg: Option<f64>,
    pub scattering_length_m: Option<f64>,
    pub sound_speed_m_s: Option<f64>,
    pub density_per_m3: Option<f64>,
    pub temperature_k: Option<f64>,
    pub omega_rad_s: Option<f64>,
    #[serde(default)]
    pub state: StateConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub rate: RateConfig,
    #[serde(default)]
    pub three_body: ThreeBodyConfig,
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub squeezing_r: Option<f64>,
    pub squeezing_phase_rad: Option<f64>,
    pub purity: Option<f64>,
    pub thermal_occupation: Option<f64>,
    pub displacement: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end_s: Option<f64>,
    pub t_end_gamma: Option<f64>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateSource {
    /// Closed form of the detected regime, collision integrals otherwise.
    #[default]
    Auto,
    /// Nearest closed form, even outside its regime.
    Asymptotic,
    Integral,
    Explicit,
}

impl RateSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            RateSource::Auto => "auto",
            RateSource::Asymptotic => "asymptotic",
            RateSource::Integral => "integral",
            RateSource::Explicit => "explicit",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub source: Option<RateSource>,
    pub gamma_per_s: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeBodyConfig {
    pub l3_m6_per_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub omega_min_rad_s: f64,
    pub omega_max_rad_s: f64,
    pub points: usize,
    pub sound_speeds_m_s: Option<Vec<f64>>,
}

fn config_err(key: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn positive(v: Option<f64>, key: &str) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => {
            Err(config_err(key, format!("must be positive, got {x}")))
        }
        other => Ok(other),
    }
}

fn required(v: Option<f64>, key: &str) -> Result<f64> {
    positive(v, key)?.ok_or_else(|| config_err(key, "missing"))
}

/// Initial single-mode state in Williamson form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub r: f64,
    pub psi: f64,
    pub mu: f64,
    pub displacement: [f64; 2],
}

impl InitialState {
    pub fn gaussian(&self, convention: SymplecticConvention) -> Result<GaussianState> {
        state_from_params(self.mu, self.r, self.psi, self.displacement, convention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSpan {
    Seconds(f64),
    /// Multiples of `1/gamma`.
    DampingTimes(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSpec {
    pub source: RateSource,
    pub explicit_gamma: Option<f64>,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub omega_min: f64,
    pub omega_max: f64,
    pub points: usize,
    pub sound_speeds: Vec<f64>,
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub species: Option<String>,
    pub condensate: CondensateParams,
    pub omega: f64,
    pub state: InitialState,
    pub time: TimeSpan,
    pub points: usize,
    pub rate: RateSpec,
    /// Recombination constant; absent when unknown for the species.
    pub l3: Option<f64>,
    pub sweep: Option<SweepSpec>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .and_then(|s| text.get(s))
                .map(|k| k.trim().to_string())
                .unwrap_or_default();
            config_err(&key, e.message().to_string())
        })?;
        Self::from_config(&cfg)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fig1" => Self::from_toml_str(FIG1),
            "fig2" => Self::from_toml_str(FIG2),
            other => Err(config_err(
                "preset",
                format!(
                    "unknown preset `{other}`, expected one of {}",
                    PRESETS.join(", ")
                ),
            )),
        }
    }

    pub fn from_config(cfg: &ScenarioConfig) -> Result<Self> {
        let (species, mass, a) = match (&cfg.species, cfg.mass_kg, cfg.scattering_length_m) {
            (Some(name), None, None) => {
                let s = species_by_name(name)
                    .ok_or_else(|| config_err("species", format!("unknown species `{name}`")))?;
                (Some(s.name.to_string()), s.mass, s.scattering_length)
            }
            (None, m, a) => (
                None,
                required(m, "mass_kg")?,
                required(a, "scattering_length_m")?,
            ),
            (Some(_), _, _) => {
                return Err(config_err(
                    "species",
                    "give either species or mass_kg and scattering_length_m, not both",
                ))
            }
        };
        let medium = match (
            positive(cfg.sound_speed_m_s, "sound_speed_m_s")?,
            positive(cfg.density_per_m3, "density_per_m3")?,
        ) {
            (Some(c), None) => Medium::SoundSpeed(c),
            (None, Some(n)) => Medium::Density(n),
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "sound_speed_m_s",
                    "give either sound_speed_m_s or density_per_m3, not both",
                ))
            }
            (None, None) => {
                return Err(config_err("sound_speed_m_s", "missing (or density_per_m3)"))
            }
        };
        let temperature = cfg
            .temperature_k
            .ok_or_else(|| config_err("temperature_k", "missing"))?;
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(config_err(
                "temperature_k",
                format!("must be non-negative, got {temperature}"),
            ));
        }
        let condensate = CondensateParams::new(mass, a, medium, temperature)?;
        let omega = required(cfg.omega_rad_s, "omega_rad_s")?;

        let st = &cfg.state;
        let r = st.squeezing_r.unwrap_or(0.0);
        if !(r.is_finite() && r >= 0.0) {
            return Err(config_err(
                "state.squeezing_r",
                format!("must be non-negative, got {r}"),
            ));
        }
        let psi = st.squeezing_phase_rad.unwrap_or(0.0);
        if !psi.is_finite() {
            return Err(config_err("state.squeezing_phase_rad", "must be finite"));
        }
        let mu = match (st.purity, st.thermal_occupation) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "state.purity",
                    "give either purity or thermal_occupation, not both",
                ))
            }
            (Some(mu), None) if mu > 0.0 && mu <= 1.0 => mu,
            (Some(mu), None) => {
                return Err(config_err(
                    "state.purity",
                    format!("must lie in (0, 1], got {mu}"),
                ))
            }
            (None, Some(n)) if n.is_finite() && n >= 0.0 => 1.0 / (1.0 + 2.0 * n),
            (None, Some(n)) => {
                return Err(config_err(
                    "state.thermal_occupation",
                    format!("must be non-negative, got {n}"),
                ))
            }
            (None, None) => 1.0,
        };
        let displacement = st.displacement.unwrap_or([0.0, 0.0]);
        if displacement.iter().any(|x| !x.is_finite()) {
            return Err(config_err("state.displacement", "must be finite"));
        }

        let time = match (
            positive(cfg.time.t_end_s, "time.t_end_s")?,
            positive(cfg.time.t_end_gamma, "time.t_end_gamma")?,
        ) {
            (Some(t), None) => TimeSpan::Seconds(t),
            (None, Some(g)) => TimeSpan::DampingTimes(g),
            (None, None) => TimeSpan::DampingTimes(5.0),
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "time.t_end_s",
                    "give either t_end_s or t_end_gamma, not both",
                ))
            }
        };
        let points = cfg.time.points.unwrap_or(500);
        if points < 2 {
            return Err(config_err("time.points", "need at least 2 points"));
        }

        let source = cfg.rate.source.unwrap_or_default();
        let explicit_gamma = cfg.rate.gamma_per_s;
        match (source, explicit_gamma) {
            (RateSource::Explicit, None) => {
                return Err(config_err(
                    "rate.gamma_per_s",
                    "required when source = \"explicit\"",
                ))
            }
            (RateSource::Explicit, Some(g)) if !(g.is_finite() && g >= 0.0) => {
                return Err(config_err(
                    "rate.gamma_per_s",
                    format!("must be non-negative, got {g}"),
                ))
            }
            (RateSource::Explicit, _) => {}
            (_, Some(_)) => {
                return Err(config_err(
                    "rate.gamma_per_s",
                    "only used when source = \"explicit\"",
                ))
            }
            _ => {}
        }
        let mut quadrature = QuadratureConfig::default();
        if let Some(tol) = positive(cfg.rate.tolerance, "rate.tolerance")? {
            quadrature.rel_tol = tol;
        }
        if let Some(n) = cfg.rate.max_subdivisions {
            quadrature.max_subdivisions = n;
        }

        let l3 = match positive(cfg.three_body.l3_m6_per_s, "three_body.l3_m6_per_s")? {
            Some(l) => Some(l),
            None if species.as_deref() == Some(RB87.name) => Some(RB87_L3),
            None => None,
        };

        let sweep = match &cfg.sweep {
            None => None,
            Some(sw) => {
                let lo = required(Some(sw.omega_min_rad_s), "sweep.omega_min_rad_s")?;
                let hi = required(Some(sw.omega_max_rad_s), "sweep.omega_max_rad_s")?;
                if hi <= lo {
                    return Err(config_err("sweep.omega_max_rad_s", "empty frequency range"));
                }
                if sw.points < 2 {
                    return Err(config_err("sweep.points", "need at least 2 points"));
                }
                let sound_speeds = sw
                    .sound_speeds_m_s
                    .clone()
                    .unwrap_or_else(|| vec![condensate.sound_speed()]);
                if sound_speeds.is_empty() {
                    return Err(config_err("sweep.sound_speeds_m_s", "must not be empty"));
                }
                for &c in &sound_speeds {
                    if !(c.is_finite() && c > 0.0) {
                        return Err(config_err(
                            "sweep.sound_speeds_m_s",
                            format!("must be positive, got {c}"),
                        ));
                    }
                }
                Some(SweepSpec {
                    omega_min: lo,
                    omega_max: hi,
                    points: sw.points,
                    sound_speeds,
                })
            }
        };

        Ok(Self {
            species,
            condensate,
            omega,
            state: InitialState {
                r,
                psi,
                mu,
                displacement,
            },
            time,
            points,
            rate: RateSpec {
                source,
                explicit_gamma,
                quadrature,
            },
            l3,
            sweep,
        })
    }

    /// Same scenario with a different speed of sound (density follows).
    pub fn with_sound_speed(&self, sound_speed: f64) -> Result<Self> {
        let c = &self.condensate;
        let condensate = CondensateParams::new(
            c.mass(),
            c.scattering_length(),
            Medium::SoundSpeed(sound_speed),
            c.temperature(),
        )?;
        Ok(Self {
            condensate,
            ..self.clone()
        })
    }

    /// Damping rate of the mode according to the configured source.
    pub fn damping(&self, omega: f64) -> Result<DampingResult> {
        let p = &self.condensate;
        match self.rate.source {
            RateSource::Auto => select_regime(omega, p, &self.rate.quadrature),
            RateSource::Asymptotic => nearest_asymptotic(omega, p),
            RateSource::Integral => integral_result(omega, p, &self.rate.quadrature),
            RateSource::Explicit => {
                let g = self.rate.explicit_gamma.unwrap_or(0.0);
                let regime = RegimeRatios::new(omega, p).regime();
                Ok(DampingResult::from_net_rate(
                    g,
                    omega,
                    p.temperature(),
                    regime,
                    0.0,
                    0.0,
                ))
            }
        }
    }

    /// Three-body half-life of the condensate, when the loss constant is known.
    pub fn half_life(&self) -> Result<Option<f64>> {
        self.l3
            .map(|l| ThreeBodyParams::new(l, self.condensate.density()).map(|p| p.half_life()))
            .transpose()
    }
}

/// Header values of a trajectory run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySummary {
    pub species: Option<String>,
    pub omega: f64,
    pub temperature: f64,
    pub sound_speed: f64,
    pub density: f64,
    pub chemical_potential: f64,
    pub rate_source: RateSource,
    pub damping: DampingResult,
    pub initial: SingleModeParams,
    pub t_half: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub summary: TrajectorySummary,
    pub metrics: MetricTrajectory,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + step * i as f64 })
        .collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<f64> = linspace(la, lb, n).into_iter().map(f64::exp).collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

/// Evaluates the four metrics of the scenario's mode on its time grid.
pub fn run_trajectory(scenario: &Scenario) -> Result<Trajectory> {
    let conv = SymplecticConvention::default();
    let damping = scenario.damping(scenario.omega)?;
    let t_end = match scenario.time {
        TimeSpan::Seconds(t) => t,
        TimeSpan::DampingTimes(k) => {
            if damping.gamma <= 0.0 {
                return Err(config_err(
                    "time.t_end_gamma",
                    "needs a positive damping rate; use t_end_s",
                ));
            }
            k / damping.gamma
        }
    };
    let state = scenario.state.gaussian(conv)?;
    let initial = SingleModeParams {
        mu: scenario.state.mu,
        r: scenario.state.r,
        psi: scenario.state.psi,
        n: state.occupation(),
        s: conv.vacuum_eigenvalue() / scenario.state.mu,
    };
    let times = linspace(0.0, t_end, scenario.points);
    let metrics = MetricTrajectory::compute(&initial, damping.mu_inf(), damping.gamma, &times)?;
    let c = &scenario.condensate;
    Ok(Trajectory {
        summary: TrajectorySummary {
            species: scenario.species.clone(),
            omega: scenario.omega,
            temperature: c.temperature(),
            sound_speed: c.sound_speed(),
            density: c.density(),
            chemical_potential: c.chemical_potential(),
            rate_source: scenario.rate.source,
            damping,
            initial,
            t_half: scenario.half_life()?,
        },
        metrics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sound_speed: f64,
    pub omega: f64,
    pub gamma: f64,
    pub regime: Regime,
    /// Infinite when the purity has no interior minimum.
    pub t_min: f64,
    /// Infinite when the loss constant is unknown.
    pub t_half: f64,
    /// Decoherence slower than three-body loss.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub sound_speed: f64,
    pub t_half: f64,
    /// Frequency where `t_min` meets the half-life, when inside the range.
    pub truncation_omega: Option<f64>,
    pub rows: Vec<SweepRow>,
}

fn sweep_point(s: &Scenario, omega: f64, t_half: f64) -> Result<SweepRow> {
    let d = s.damping(omega)?;
    let relax = Relaxation::new(s.state.mu, s.state.r, d.mu_inf(), d.gamma)?;
    let t_min = purity_minimum_time(&relax).unwrap_or(f64::INFINITY);
    Ok(SweepRow {
        sound_speed: s.condensate.sound_speed(),
        omega,
        gamma: d.gamma,
        regime: d.regime,
        t_min,
        t_half,
        truncated: t_min > t_half,
    })
}

// Bisection in log-frequency on ln t_min - ln t_half.
fn truncation_frequency(s: &Scenario, lo: f64, hi: f64, t_half: f64) -> Result<Option<f64>> {
    if !t_half.is_finite() {
        return Ok(None);
    }
    let f = |w: f64| -> Result<f64> { Ok(sweep_point(s, w, t_half)?.t_min.ln() - t_half.ln()) };
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let (fa, fb) = (f(lo)?, f(hi)?);
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Ok(None);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(m.exp())?.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-13 * a.abs().max(1.0) {
            break;
        }
    }
    Ok(Some((0.5 * (a + b)).exp()))
}

/// `t_min` and half-life across the scenario's frequency range, one curve per
/// speed of sound. Points are computed in parallel; output order is
/// (speed of sound, frequency) as configured.
pub fn run_sweep(scenario: &Scenario) -> Result<Vec<SweepCurve>> {
    let sw = scenario
        .sweep
        .as_ref()
        .ok_or_else(|| config_err("sweep", "missing [sweep] table"))?;
    let omegas = logspace(sw.omega_min, sw.omega_max, sw.points);
    sw.sound_speeds
        .iter()
        .map(|&c| {
            let s = scenario.with_sound_speed(c)?;
            let t_half = s.half_life()?.unwrap_or(f64::INFINITY);
            let rows = omegas
                .par_iter()
                .map(|&w| sweep_point(&s, w, t_half))
                .collect::<Result<Vec<_>>>()?;
            Ok(SweepCurve {
                sound_speed: c,
                t_half,
                truncation_omega: truncation_frequency(&s, sw.omega_min, sw.omega_max, t_half)?,
                rows,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Relative tolerance of the collision integrals.
    pub quadrature_tolerance: f64,
    /// Flips the sign of the damping term in the drift only. For testing the
    /// checks themselves.
    pub flip_gamma_sign: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quadrature_tolerance: QuadratureConfig::default().rel_tol,
            flip_gamma_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            deviation,
            tolerance,
            passed: deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn rel_dev(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn thermal_channel(gamma: f64, omega: f64, n_th: f64, flip: bool) -> Result<LindbladChannel> {
    let conv = SymplecticConvention::default();
    let mut ch = LindbladChannel::thermal(gamma, omega, n_th, conv)?;
    if flip {
        ch.drift += DMatrix::identity(2, 2) * gamma;
    }
    Ok(ch)
}

/// Runs the internal cross-checks of the Gaussian fast path.
pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let conv = SymplecticConvention::default();
    let flip = opts.flip_gamma_sign;
    let quad = QuadratureConfig {
        rel_tol: opts.quadrature_tolerance,
        ..QuadratureConfig::default()
    };
    let mut checks = Vec::new();

    // Thermal state is a stationary point of the Lyapunov equation.
    let base = Scenario::preset("fig1")?;
    let d = base.damping(base.omega)?;
    let mut worst: f64 = 0.0;
    for (g, w, n) in [
        (d.gamma, base.omega, d.n_th),
        (1.0, 2.0, 0.2),
        (3.0, 0.0, 5.0),
    ] {
        let ch = thermal_channel(g, w, n, flip)?;
        let res = ch.lyapunov_residual(&sigma_inf(n, conv));
        worst = worst.max(res.amax() / ch.diffusion.amax());
    }
    checks.push(Check::new("fixed_point", worst, 1e-13));

    // Detailed balance of the split rates and of the collision integrals.
    let warm = base.condensate.with_temperature(5e-9)?;
    let omega = 300.0;
    let split =
        DampingResult::from_net_rate(1.0, omega, warm.temperature(), Regime::Integral, 0.0, 0.0);
    let mut dev = rel_dev(split.gamma_1 / split.gamma_2, split.beta_q.exp());
    checks.push(Check::new("detailed_balance_split", dev, 1e-12));
    let rates = gamma_integral(omega, &warm, &quad)?;
    let beta = split.beta_q;
    dev = rel_dev(rates.beliaev_down, beta.exp() * rates.beliaev_up)
        .max(rel_dev(rates.landau_down, beta.exp() * rates.landau_up));
    checks.push(Check::new(
        "detailed_balance_integrals",
        dev,
        10.0 * opts.quadrature_tolerance,
    ));

    // Beliaev collision integral against its closed form deep in the phonon regime.
    let cold = base.condensate.with_temperature(0.0)?;
    let numeric = gamma_integral(100.0, &cold, &quad)?.gamma_b;
    let closed = gamma_beliaev_asymptotic(100.0, &cold)?.rate;
    checks.push(Check::new(
        "beliaev_integral_vs_closed_form",
        rel_dev(numeric, closed),
        0.1,
    ));

    // Numerical Lyapunov integration against the closed form.
    let (gamma, n_th) = (1.0, 0.2);
    let ch = thermal_channel(gamma, 3.0, n_th, flip)?;
    let s0 = state_from_params(0.8, 1.0, 0.7, [0.5, -0.3], conv)?;
    let grid = linspace(0.0, 5.0 / gamma, 200);
    let mut dev = 0.0f64;
    match evolve_numeric(&s0, &ch, &grid, &IntegratorConfig::default()) {
        Ok(traj) => {
            for (t, s) in grid.iter().zip(&traj) {
                let exact =
                    evolve_closed_form(&s0, &thermal_channel(gamma, 3.0, n_th, false)?, *t)?;
                let diff = s.covariance() - exact.covariance();
                for (x, y) in diff.iter().zip(exact.covariance().iter()) {
                    dev = dev.max(x.abs() / y.abs().max(exact.covariance().amax() * 1e-3));
                }
            }
        }
        Err(_) => dev = f64::INFINITY,
    }
    checks.push(Check::new("lyapunov_numeric_vs_closed_form", dev, 1e-8));

    // Truncated-Fock master equation against the Gaussian closed form.
    let (r0, omega) = (0.5, 2.0);
    let rho = TruncatedDensityMatrix::from_pure(&squeezed_vacuum_fock(r0, 40)?)?;
    let grid = linspace(0.0, 5.0 / gamma, 51);
    let tr = lindblad_step_integrate(&rho, omega, gamma * (1.0 + n_th), gamma * n_th, &grid, conv)?;
    let s0 = state_from_params(1.0, r0, std::f64::consts::PI, [0.0, 0.0], conv)?;
    let ch = thermal_channel(gamma, omega, n_th, false)?;
    let relax = Relaxation::new(1.0, r0, 1.0 / (1.0 + 2.0 * n_th), gamma)?;
    let mut dev = 0.0f64;
    for (i, &t) in grid.iter().enumerate() {
        let exact = evolve_closed_form(&s0, &ch, t)?;
        dev = dev
            .max((tr.purity[i] - purity_evolution(&relax, t)?).abs())
            .max((tr.occupation[i] - exact.occupation()).abs());
        for a in 0..2 {
            for b in 0..2 {
                dev = dev.max((tr.covariance[i][(a, b)] - exact.covariance()[(a, b)]).abs());
            }
        }
    }
    checks.push(Check::new("fock_oracle", dev, 1e-3));

    Ok(VerifyReport {
        options: *opts,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse() {
        for p in PRESETS {
            Scenario::preset(p).unwrap();
        }
        assert!(Scenario::preset("fig3").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{FIG1}\nbogus_key = 1\n");
        let err = Scenario::from_toml_str(&text).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn conflicting_keys_are_rejected() {
        let text = FIG1.replace(
            "sound_speed_m_s = 3.4e-3",
            "sound_speed_m_s = 3.4e-3\ndensity_per_m3 = 1e20",
        );
        let err = Scenario::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, Error::Config { ref key, .. } if key == "sound_speed_m_s"));
        let text = FIG1.replace("[time]", "[rate]\nsource = \"explicit\"\n[time]");
        assert!(matches!(
            Scenario::from_toml_str(&text),
            Err(Error::Config { ref key, .. }) if key == "rate.gamma_per_s"
        ));
    }

    #[test]
    fn explicit_rate_is_used_verbatim() {
        let text = FIG1.replace(
            "[time]",
            "[rate]\nsource = \"explicit\"\ngamma_per_s = 0.25\n[time]",
        );
        let s = Scenario::from_toml_str(&text).unwrap();
        assert_eq!(s.damping(s.omega).unwrap().gamma, 0.25);
    }

    #[test]
    fn logspace_hits_endpoints() {
        let v = logspace(1e3, 1e4, 50);
        assert_eq!(v[0], 1e3);
        assert_eq!(v[49], 1e4);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}
