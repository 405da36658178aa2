//! Physical constants (CODATA 2018) and atomic species presets.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Three-body recombination constant of 87Rb in |F=1, m_F=-1>, m^6/s.
pub const RB87_L3: f64 = 5.8e-42;
/// One-sigma uncertainty of [`RB87_L3`].
pub const RB87_L3_SIGMA: f64 = 1.9e-42;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Species {
    pub name: &'static str,
    /// Atomic mass, kg.
    pub mass: f64,
    /// s-wave scattering length, m.
    pub scattering_length: f64,
}

pub const RB87: Species = Species {
    name: "Rb87",
    mass: 86.909_180_527 * ATOMIC_MASS_UNIT,
    scattering_length: 5.31e-9,
};

pub const YB174: Species = Species {
    name: "Yb174",
    mass: 173.938_866_4 * ATOMIC_MASS_UNIT,
    scattering_length: 105.0 * BOHR_RADIUS,
};

pub const SPECIES: &[Species] = &[RB87, YB174];

pub fn species_by_name(name: &str) -> Option<Species> {
    SPECIES
        .iter()
        .copied()
        .find(|s| s.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rb87_mass_matches_reference() {
        assert!((RB87.mass - 1.4432e-25).abs() / 1.4432e-25 < 1e-4);
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(species_by_name("rb87"), Some(RB87));
        assert_eq!(species_by_name("YB174"), Some(YB174));
        assert!(species_by_name("Na23").is_none());
    }
}
