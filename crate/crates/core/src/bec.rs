//! Uniform-condensate microphysics: coupling constant, speed of sound,
//! Bogoliubov dispersion and coefficients, thermal occupation.

use std::f64::consts::PI;

use crate::constants::{Species, HBAR, K_B};
use crate::error::{ensure, ensure_finite, Result};

/// Which of density or speed of sound was supplied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Medium {
    SoundSpeed(f64),
    Density(f64),
}

/// Parameters of a uniform three-dimensional condensate (SI units).
///
/// Exactly one of speed of sound and number density is supplied; the other
/// follows from `c_s^2 = g n / m` with `g = 4 pi hbar^2 a / m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateParams {
    mass: f64,
    scattering_length: f64,
    sound_speed: f64,
    density: f64,
    temperature: f64,
    volume: Option<f64>,
}

impl CondensateParams {
    pub fn new(
        mass: f64,
        scattering_length: f64,
        medium: Medium,
        temperature: f64,
    ) -> Result<Self> {
        for (v, name) in [
            (mass, "mass"),
            (scattering_length, "scattering_length"),
            (temperature, "temperature"),
        ] {
            ensure_finite(v, name)?;
        }
        ensure(mass > 0.0, "mass", "must be positive")?;
        ensure(
            scattering_length > 0.0,
            "scattering_length",
            "must be positive",
        )?;
        ensure(temperature >= 0.0, "temperature", "must be non-negative")?;
        let g = coupling_constant(mass, scattering_length);
        let (sound_speed, density) = match medium {
            Medium::SoundSpeed(c) => {
                ensure_finite(c, "sound_speed")?;
                ensure(c > 0.0, "sound_speed", "must be positive")?;
                (c, mass * c * c / g)
            }
            Medium::Density(n) => {
                ensure_finite(n, "density")?;
                ensure(n > 0.0, "density", "must be positive")?;
                ((g * n / mass).sqrt(), n)
            }
        };
        Ok(Self {
            mass,
            scattering_length,
            sound_speed,
            density,
            temperature,
            volume: None,
        })
    }

    pub fn for_species(species: Species, medium: Medium, temperature: f64) -> Result<Self> {
        Self::new(species.mass, species.scattering_length, medium, temperature)
    }

    pub fn with_volume(mut self, volume: f64) -> Result<Self> {
        ensure(
            volume.is_finite() && volume > 0.0,
            "volume",
            "must be positive",
        )?;
        self.volume = Some(volume);
        Ok(self)
    }

    pub fn with_temperature(mut self, temperature: f64) -> Result<Self> {
        ensure(
            temperature.is_finite() && temperature >= 0.0,
            "temperature",
            "must be non-negative",
        )?;
        self.temperature = temperature;
        Ok(self)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn scattering_length(&self) -> f64 {
        self.scattering_length
    }
    pub fn sound_speed(&self) -> f64 {
        self.sound_speed
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }
    pub fn volume(&self) -> Option<f64> {
        self.volume
    }

    /// `g = 4 pi hbar^2 a / m`.
    pub fn coupling(&self) -> f64 {
        coupling_constant(self.mass, self.scattering_length)
    }

    /// Chemical potential `g n = m c_s^2`, J.
    pub fn chemical_potential(&self) -> f64 {
        self.mass * self.sound_speed * self.sound_speed
    }

    /// Thermal energy `k_B T`, J.
    pub fn thermal_energy(&self) -> f64 {
        K_B * self.temperature
    }

    /// Dimensionless momentum `hbar k / (m c_s)`.
    pub fn reduced_momentum(&self, k: f64) -> f64 {
        HBAR * k / (self.mass * self.sound_speed)
    }
}

pub fn coupling_constant(mass: f64, scattering_length: f64) -> f64 {
    4.0 * PI * HBAR * HBAR * scattering_length / mass
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode {
    pub k: f64,
    pub omega: f64,
    pub u: f64,
    pub v: f64,
}

impl BogoliubovMode {
    pub fn new(k: f64, params: &CondensateParams) -> Result<Self> {
        let omega = dispersion(k, params)?;
        let (u, v) = bogoliubov_uv(k, params)?;
        Ok(Self { k, omega, u, v })
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    ensure(
        k.is_finite() && k > 0.0,
        "k",
        format!("wavenumber must be positive, got {k}"),
    )
}

/// `omega = sqrt((c_s k)^2 + (hbar k^2 / 2m)^2)`.
pub fn dispersion(k: f64, params: &CondensateParams) -> Result<f64> {
    check_wavenumber(k)?;
    Ok(dispersion_unchecked(k, params))
}

pub(crate) fn dispersion_unchecked(k: f64, p: &CondensateParams) -> f64 {
    let free = HBAR * k * k / (2.0 * p.mass);
    (p.sound_speed * k).hypot(free)
}

/// Group velocity `d omega / dk`.
pub(crate) fn group_velocity(k: f64, p: &CondensateParams) -> f64 {
    let c = p.sound_speed;
    let h = HBAR / (2.0 * p.mass);
    let omega = dispersion_unchecked(k, p);
    if omega == 0.0 {
        return c;
    }
    k * (c * c + 2.0 * h * h * k * k) / omega
}

/// Closed-form inverse of [`dispersion`].
///
/// Solves `h^2 K^2 + c^2 K - omega^2 = 0` for `K = k^2` with the
/// cancellation-free root `K = 2 omega^2 / (c^2 + sqrt(c^4 + 4 h^2 omega^2))`.
pub fn invert_dispersion(omega: f64, params: &CondensateParams) -> Result<f64> {
    ensure(
        omega.is_finite() && omega > 0.0,
        "omega",
        format!("must be positive, got {omega}"),
    )?;
    Ok(invert_dispersion_unchecked(omega, params))
}

pub(crate) fn invert_dispersion_unchecked(omega: f64, p: &CondensateParams) -> f64 {
    let c2 = p.sound_speed * p.sound_speed;
    let h = HBAR / (2.0 * p.mass);
    let disc = (c2 * c2 + 4.0 * h * h * omega * omega).sqrt();
    (2.0 * omega * omega / (c2 + disc)).sqrt()
}

/// Sum and difference `(u + v, u - v)` of the Bogoliubov coefficients.
///
/// With `x = hbar k / (m c_s)` and `e = hbar omega / (m c_s^2) = x sqrt(1 + x^2/4)`:
/// `(u+v)^2 = x^2/(2e)` and `(u-v)^2 = (2 + x^2/2)/e`. Working with these
/// keeps the phonon-regime vertex factors free of catastrophic cancellation.
pub(crate) fn uv_sum_diff(k: f64, p: &CondensateParams) -> (f64, f64) {
    let x = p.reduced_momentum(k);
    let root = (1.0 + 0.25 * x * x).sqrt();
    // x^2 / (2e) = x / (2 root)
    let sum = (x / (2.0 * root)).sqrt();
    // (2 + x^2/2)/e = 2 root / x
    let diff = (2.0 * root / x).sqrt();
    (sum, diff)
}

/// Bogoliubov coefficients `(u, v)` with `u > 0`, `v <= 0` and `u^2 - v^2 = 1`.
pub fn bogoliubov_uv(k: f64, params: &CondensateParams) -> Result<(f64, f64)> {
    check_wavenumber(k)?;
    let (s, d) = uv_sum_diff(k, params);
    Ok((0.5 * (s + d), 0.5 * (s - d)))
}

/// Bose-Einstein occupation `1/(e^beta - 1)`, exactly zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let beta = HBAR * omega / (K_B * temperature);
    1.0 / beta.exp_m1()
}

/// `hbar omega / (k_B T)`; infinite at `T = 0`.
pub fn inverse_temperature(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        f64::INFINITY
    } else {
        HBAR * omega / (K_B * temperature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::RB87;
    use approx::assert_relative_eq;

    fn rb(t: f64) -> CondensateParams {
        CondensateParams::for_species(RB87, Medium::SoundSpeed(3.4e-3), t).unwrap()
    }

    #[test]
    fn derived_density_of_reference_scenario() {
        let p = rb(0.5e-9);
        // n = m^2 c^2 / (4 pi hbar^2 a)
        let n = RB87.mass.powi(2) * 3.4e-3f64.powi(2) / (4.0 * PI * HBAR * HBAR * 5.31e-9);
        assert_relative_eq!(p.density(), n, max_relative = 1e-14);
        assert!((p.density() - 3.2e20).abs() / 3.2e20 < 0.02);
    }

    #[test]
    fn density_speed_duality() {
        let p = rb(1e-9);
        let q = CondensateParams::for_species(RB87, Medium::Density(p.density()), 1e-9).unwrap();
        assert_relative_eq!(q.sound_speed(), 3.4e-3, max_relative = 1e-12);
        assert_relative_eq!(
            p.chemical_potential(),
            p.coupling() * p.density(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(CondensateParams::new(-1.0, 1e-9, Medium::SoundSpeed(1e-3), 0.0).is_err());
        assert!(CondensateParams::new(1e-25, 1e-9, Medium::Density(0.0), 0.0).is_err());
        assert!(CondensateParams::new(1e-25, 1e-9, Medium::SoundSpeed(1e-3), -1.0).is_err());
        assert!(dispersion(0.0, &rb(0.0)).is_err());
        assert!(invert_dispersion(-1.0, &rb(0.0)).is_err());
    }

    #[test]
    fn phonon_and_free_particle_limits() {
        let p = rb(0.0);
        let mc = p.mass() * p.sound_speed();
        let k = 1e-3 * mc / HBAR;
        let w = dispersion(k, &p).unwrap();
        assert!((w / (p.sound_speed() * k) - 1.0).abs() < 1e-3);
        let k = 1e3 * mc / HBAR;
        let w = dispersion(k, &p).unwrap();
        assert!((w / (HBAR * k * k / (2.0 * p.mass())) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn reference_frequency() {
        let p = rb(0.0);
        let k = 2.94e6;
        let w = dispersion(k, &p).unwrap();
        assert!((w - 1.05e4).abs() / 1.05e4 < 0.01, "omega = {w}");
        let phonon = p.sound_speed() * k;
        let frac = w / phonon - 1.0;
        assert!(frac > 0.03 && frac < 0.07, "free-particle share {frac}");
    }

    #[test]
    fn inverse_at_ten_thousand() {
        let p = rb(0.0);
        let k = invert_dispersion(1e4, &p).unwrap();
        // bisection cross-check
        let (mut lo, mut hi) = (1.0, 1e8);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dispersion_unchecked(mid, &p) < 1e4 {
                lo = mid
            } else {
                hi = mid
            }
        }
        assert_relative_eq!(k, 0.5 * (lo + hi), max_relative = 1e-12);
        assert!((k - 2.8e6).abs() / 2.8e6 < 0.02, "k = {k}");
    }

    #[test]
    fn inverse_round_trip_log_grid() {
        let p = rb(0.0);
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let w = 10f64.powf(-2.0 + 10.0 * i as f64 / 200.0);
            let k = invert_dispersion(w, &p).unwrap();
            worst = worst.max((dispersion(k, &p).unwrap() / w - 1.0).abs());
        }
        assert!(worst < 1e-10, "worst {worst}");
    }

    #[test]
    fn uv_normalisation_and_limits() {
        let p = rb(0.0);
        let mc = p.mass() * p.sound_speed();
        for i in 0..50 {
            let k = mc / HBAR * 10f64.powf(-4.0 + 8.0 * i as f64 / 49.0);
            let (u, v) = bogoliubov_uv(k, &p).unwrap();
            assert!(u > 0.0 && v <= 0.0);
            assert!((u * u - v * v - 1.0).abs() < 1e-10, "k={k}");
            // literal form of the coefficient magnitudes
            let w = dispersion(k, &p).unwrap();
            let e0 = HBAR * HBAR * k * k / (2.0 * p.mass()) + p.chemical_potential();
            assert_relative_eq!(
                u * u,
                (e0 + HBAR * w) / (2.0 * HBAR * w),
                max_relative = 1e-9
            );
        }
        let k = 1e-2 * mc / HBAR;
        let (u, v) = bogoliubov_uv(k, &p).unwrap();
        let asym = (mc / (2.0 * HBAR * k)).sqrt();
        assert!((u / asym - 1.0).abs() < 0.05 && (-v / asym - 1.0).abs() < 0.05);
        let (u, v) = bogoliubov_uv(1e3 * mc / HBAR, &p).unwrap();
        assert!((u - 1.0).abs() < 1e-3 && v.abs() < 1e-3);
    }

    #[test]
    fn occupation_values() {
        assert_eq!(thermal_occupation(1e4, 0.0), 0.0);
        let t = HBAR * 1e4 / (K_B * 2f64.ln());
        assert_relative_eq!(thermal_occupation(1e4, t), 1.0, max_relative = 1e-12);
        let beta = inverse_temperature(1e4, 0.5e-9);
        assert!((beta - 152.7).abs() < 0.1, "beta {beta}");
        assert!(thermal_occupation(1e4, 0.5e-9) < 1e-66);
    }

    #[test]
    fn dispersion_is_monotone() {
        let p = rb(0.0);
        let mut prev = 0.0;
        for i in 1..1000 {
            let w = dispersion(i as f64 * 1e4, &p).unwrap();
            assert!(w > prev);
            prev = w;
        }
    }
}
