//! Symplectic phase-space representation of Gaussian states.
//!
//! A state of `M` bosonic modes is described by a displacement vector `d`
//! and a real symmetric covariance matrix `sigma`, both in the quadrature
//! basis `x = (x_1, p_1, ..., x_M, p_M)` scaled so that
//! `[x_i, x_j] = i Omega_ij / (2 kappa^2)`.
//!
//! Single-mode states additionally admit the Williamson parameterisation
//! `(mu, r, psi)`: purity, squeezing magnitude and squeezing phase.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{ensure, ensure_finite, Error, Result};

/// Relative slack below the uncertainty bound that is treated as rounding noise.
pub const UNCERTAINTY_SLACK: f64 = 1e-9;

/// Below this squeezing magnitude the squeezing phase is reported as zero.
const PHASE_UNDEFINED_BELOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticConvention {
    pub kappa: f64,
}

impl Default for SymplecticConvention {
    fn default() -> Self {
        Self {
            kappa: FRAC_1_SQRT_2,
        }
    }
}

impl SymplecticConvention {
    pub fn new(kappa: f64) -> Result<Self> {
        ensure(
            kappa.is_finite() && kappa > 0.0,
            "kappa",
            format!("must be positive, got {kappa}"),
        )?;
        Ok(Self { kappa })
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa * self.kappa
    }

    /// Lower bound on every symplectic eigenvalue, `1/(4 kappa^2)`.
    pub fn vacuum_eigenvalue(&self) -> f64 {
        1.0 / (4.0 * self.kappa2())
    }

    /// Block-diagonal symplectic form for `modes` modes.
    pub fn omega(&self, modes: usize) -> DMatrix<f64> {
        symplectic_form(modes)
    }
}

/// `Omega = diag([[0, 1], [-1, 0]], ...)`.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let n = 2 * modes;
    let mut omega = DMatrix::zeros(n, n);
    for m in 0..modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    d: DVector<f64>,
    sigma: DMatrix<f64>,
    convention: SymplecticConvention,
}

/// Williamson parameters of a single-mode state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeParams {
    pub mu: f64,
    pub r: f64,
    pub psi: f64,
    /// Mean occupation `<b^dagger b>`.
    pub n: f64,
    /// Symplectic eigenvalue `sqrt(det sigma)`.
    pub s: f64,
}

impl GaussianState {
    /// Validates symmetry, positivity and the uncertainty bound.
    pub fn new(
        d: DVector<f64>,
        sigma: DMatrix<f64>,
        convention: SymplecticConvention,
    ) -> Result<Self> {
        let n = sigma.nrows();
        if sigma.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: sigma.ncols(),
            });
        }
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("dimension must be even and nonzero, got {n}"),
            });
        }
        if d.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        if d.iter().chain(sigma.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "entries must be finite".into(),
            });
        }
        let scale = sigma.amax();
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        if sigma.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        let state = Self {
            d,
            sigma,
            convention,
        };
        let bound = convention.vacuum_eigenvalue();
        let smin = state.min_symplectic_eigenvalue();
        if smin < bound * (1.0 - UNCERTAINTY_SLACK) {
            return Err(Error::UncertaintyViolation { value: smin, bound });
        }
        Ok(state)
    }

    pub(crate) fn from_parts_unchecked(
        d: DVector<f64>,
        sigma: DMatrix<f64>,
        convention: SymplecticConvention,
    ) -> Self {
        Self {
            d,
            sigma,
            convention,
        }
    }

    pub fn vacuum(modes: usize, convention: SymplecticConvention) -> Self {
        let n = 2 * modes;
        Self {
            d: DVector::zeros(n),
            sigma: DMatrix::identity(n, n) * convention.vacuum_eigenvalue(),
            convention,
        }
    }

    pub fn modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.d
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn convention(&self) -> SymplecticConvention {
        self.convention
    }

    /// Symplectic eigenvalues (moduli of the eigenvalues of `i Omega sigma`), ascending.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        if self.modes() == 1 {
            return vec![det2(&self.sigma).max(0.0).sqrt()];
        }
        let omega = symplectic_form(self.modes());
        let mut im: Vec<f64> = (omega * &self.sigma)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.im.abs())
            .collect();
        im.sort_by(|a, b| a.total_cmp(b));
        im.into_iter().step_by(2).collect()
    }

    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// Purity `Tr(rho^2) = prod_j 1/(4 kappa^2 s_j)`.
    pub fn purity(&self) -> f64 {
        let v = self.convention.vacuum_eigenvalue();
        self.symplectic_eigenvalues()
            .into_iter()
            .map(|s| (v / s).min(1.0))
            .product()
    }

    /// Total mean occupation `kappa^2 (Tr sigma + d.d) - M/2`.
    pub fn occupation(&self) -> f64 {
        let k2 = self.convention.kappa2();
        k2 * (self.sigma.trace() + self.d.dot(&self.d)) - 0.5 * self.modes() as f64
    }

    /// Same state expressed in a different kappa convention.
    pub fn with_convention(&self, convention: SymplecticConvention) -> Self {
        let ratio = self.convention.kappa / convention.kappa;
        Self {
            d: &self.d * ratio,
            sigma: &self.sigma * (ratio * ratio),
            convention,
        }
    }
}

fn det2(m: &DMatrix<f64>) -> f64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Single-mode covariance in Williamson form.
///
/// Built as `R(psi/2) diag(e^{2r}, e^{-2r}) R(psi/2)^T / (4 kappa^2 mu)`, which
/// avoids the `cosh 2r - sinh 2r` cancellation of the expanded form.
pub fn williamson_covariance(
    mu: f64,
    r: f64,
    psi: f64,
    convention: SymplecticConvention,
) -> Matrix2<f64> {
    let pre = 1.0 / (4.0 * convention.kappa2() * mu);
    let (sn, cs) = (0.5 * psi).sin_cos();
    let big = (2.0 * r).exp();
    let small = (-2.0 * r).exp();
    let s11 = big * cs * cs + small * sn * sn;
    let s22 = big * sn * sn + small * cs * cs;
    let s12 = (2.0 * r).sinh() * psi.sin();
    Matrix2::new(s11, s12, s12, s22) * pre
}

/// Builds a single-mode state from purity, squeezing and displacement.
pub fn state_from_params(
    mu: f64,
    r: f64,
    psi: f64,
    d: [f64; 2],
    convention: SymplecticConvention,
) -> Result<GaussianState> {
    for (v, name) in [(mu, "mu"), (r, "r"), (psi, "psi"), (d[0], "d"), (d[1], "d")] {
        ensure_finite(v, name)?;
    }
    ensure(
        mu > 0.0 && mu <= 1.0,
        "mu",
        format!("must lie in (0, 1], got {mu}"),
    )?;
    ensure(r >= 0.0, "r", format!("must be non-negative, got {r}"))?;
    let s = williamson_covariance(mu, r, psi, convention);
    Ok(GaussianState::from_parts_unchecked(
        DVector::from_row_slice(&d),
        DMatrix::from_row_slice(2, 2, s.as_slice()),
        convention,
    ))
}

/// Extracts `(mu, r, psi, N)` from a single-mode state.
pub fn params_from_state(state: &GaussianState) -> Result<SingleModeParams> {
    if state.modes() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: 2 * state.modes(),
        });
    }
    let conv = state.convention;
    let sig = &state.sigma;
    let bound = conv.vacuum_eigenvalue();
    let mut s = det2(sig).max(0.0).sqrt();
    if s < bound * (1.0 - UNCERTAINTY_SLACK) {
        return Err(Error::UncertaintyViolation { value: s, bound });
    }
    s = s.max(bound);
    let mu = bound / s;
    let diff = sig[(0, 0)] - sig[(1, 1)];
    let off = 2.0 * sig[(0, 1)];
    let sinh2r = diff.hypot(off) / (2.0 * s);
    let r = 0.5 * sinh2r.asinh();
    let psi = if r < PHASE_UNDEFINED_BELOW {
        0.0
    } else {
        off.atan2(diff).rem_euclid(TAU)
    };
    // rem_euclid can return TAU itself for tiny negative inputs
    let psi = if psi >= TAU { psi - TAU } else { psi };
    debug_assert!((0.0..2.0 * PI).contains(&psi));
    Ok(SingleModeParams {
        mu,
        r,
        psi,
        n: state.occupation(),
        s,
    })
}

/// Thermal state with mean occupation `n_th`.
pub fn thermal_state(n_th: f64, convention: SymplecticConvention) -> Result<GaussianState> {
    ensure_finite(n_th, "n_th")?;
    ensure(
        n_th >= 0.0,
        "n_th",
        format!("must be non-negative, got {n_th}"),
    )?;
    let v = (1.0 + 2.0 * n_th) * convention.vacuum_eigenvalue();
    Ok(GaussianState::from_parts_unchecked(
        DVector::zeros(2),
        DMatrix::identity(2, 2) * v,
        convention,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn conv() -> SymplecticConvention {
        SymplecticConvention::default()
    }

    #[test]
    fn omega_squares_to_minus_identity() {
        for modes in 1..4 {
            let o = symplectic_form(modes);
            assert_eq!(&o + o.transpose(), DMatrix::zeros(2 * modes, 2 * modes));
            assert_eq!(&o * &o, -DMatrix::identity(2 * modes, 2 * modes));
        }
    }

    #[test]
    fn vacuum_from_params() {
        let s = state_from_params(1.0, 0.0, 0.0, [0.0, 0.0], conv()).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.covariance()[(1, 1)], 0.5, epsilon = 1e-15);
        assert_eq!(s.covariance()[(0, 1)], 0.0);
    }

    #[test]
    fn highly_squeezed_diagonal() {
        let s = state_from_params(1.0, 10.0, 0.0, [0.0, 0.0], conv()).unwrap();
        let c = s.covariance();
        assert_relative_eq!(c[(0, 0)], 0.5 * 20f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(c[(1, 1)], 0.5 * (-20f64).exp(), max_relative = 1e-14);
        assert_eq!(c[(0, 1)], 0.0);
    }

    #[test]
    fn half_purity_is_identity() {
        let s = state_from_params(0.5, 0.0, 0.0, [0.0, 0.0], conv()).unwrap();
        assert_relative_eq!(s.covariance()[(0, 0)], 1.0, epsilon = 1e-15);
        let p = params_from_state(&s).unwrap();
        assert_relative_eq!(p.mu, 0.5, epsilon = 1e-15);
        assert_relative_eq!(p.n, 0.5, epsilon = 1e-15);
        assert_eq!(p.r, 0.0);
    }

    #[test]
    fn vacuum_params() {
        let p = params_from_state(&GaussianState::vacuum(1, conv())).unwrap();
        assert_relative_eq!(p.mu, 1.0, epsilon = 1e-15);
        assert_eq!(p.r, 0.0);
        assert!(p.n.abs() < 1e-15);
    }

    #[test]
    fn round_trip_generic_phase() {
        let s = state_from_params(0.8, 1.3, 2.1, [0.0, 0.0], conv()).unwrap();
        let p = params_from_state(&s).unwrap();
        assert_relative_eq!(p.mu, 0.8, max_relative = 1e-12);
        assert_relative_eq!(p.r, 1.3, max_relative = 1e-12);
        assert_relative_eq!(p.psi, 2.1, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_purity() {
        assert!(state_from_params(0.0, 0.0, 0.0, [0.0, 0.0], conv()).is_err());
        assert!(state_from_params(1.2, 0.0, 0.0, [0.0, 0.0], conv()).is_err());
        assert!(state_from_params(f64::NAN, 0.0, 0.0, [0.0, 0.0], conv()).is_err());
        assert!(state_from_params(0.5, -1.0, 0.0, [0.0, 0.0], conv()).is_err());
    }

    #[test]
    fn thermal_states() {
        let v = thermal_state(0.0, conv()).unwrap();
        assert_eq!(v, GaussianState::vacuum(1, conv()));
        let t = thermal_state(1.0, conv()).unwrap();
        assert_relative_eq!(t.covariance()[(0, 0)], 1.5, epsilon = 1e-15);
        assert_relative_eq!(t.covariance()[(1, 1)], 1.5, epsilon = 1e-15);
        assert!(thermal_state(-0.1, conv()).is_err());
        // e^{ln 2} - 1 = 1
        let n = 1.0 / (2f64.ln().exp() - 1.0);
        assert_relative_eq!(n, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn uncertainty_violation_rejected_and_noise_clamped() {
        let c = conv();
        let bad = DMatrix::identity(2, 2) * 0.4;
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), bad, c),
            Err(Error::UncertaintyViolation { .. })
        ));
        let noisy = DMatrix::identity(2, 2) * (0.5 * (1.0 - 1e-11));
        let s = GaussianState::new(DVector::zeros(2), noisy, c).unwrap();
        let p = params_from_state(&s).unwrap();
        assert_eq!(p.mu, 1.0);
    }

    #[test]
    fn asymmetric_and_indefinite_rejected() {
        let c = conv();
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.1, 1.0]);
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), asym, c),
            Err(Error::NotSymmetric(_))
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), indef, c),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn two_mode_symplectic_eigenvalues() {
        // product of a thermal mode (N=1) and vacuum, in a rotated-free basis
        let mut sigma = DMatrix::zeros(4, 4);
        sigma[(0, 0)] = 1.5;
        sigma[(1, 1)] = 1.5;
        sigma[(2, 2)] = 0.5;
        sigma[(3, 3)] = 0.5;
        let s = GaussianState::new(DVector::zeros(4), sigma, conv()).unwrap();
        let ev = s.symplectic_eigenvalues();
        assert_relative_eq!(ev[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 1.5, epsilon = 1e-12);
        assert_relative_eq!(s.purity(), 1.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(s.occupation(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn purity_independent_of_kappa() {
        let s = state_from_params(0.37, 0.9, 1.1, [0.3, -0.2], conv()).unwrap();
        let unit = s.with_convention(SymplecticConvention::new(1.0).unwrap());
        assert_relative_eq!(s.purity(), unit.purity(), max_relative = 1e-12);
        assert_relative_eq!(s.occupation(), unit.occupation(), max_relative = 1e-12);
    }
}
