//! Brute-force master equation in a truncated number basis.
//!
//! Integrates
//! `drho/dt = -i omega [b^dagger b, rho] + gamma_1 D[b] rho + gamma_2 D[b^dagger] rho`
//! for a single mode and reads off purity and quadrature moments. Only
//! practical for modest squeezing: the basis must hold essentially all of the
//! population, so `sinh^2 r` has to stay well below the cutoff.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::gaussian::{GaussianState, SymplecticConvention};

/// Population allowed above `0.9 N_cut` in an initial state.
pub const INITIAL_TAIL_MAX: f64 = 1e-8;
/// Population allowed in the top level at any step.
pub const TOP_LEVEL_MAX: f64 = 1e-6;

const TRACE_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-12;
const NEGATIVITY_TOL: f64 = 1e-10;

/// Product of the RK4 step and the fastest rate of the generator.
pub const STEP_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedDensityMatrix {
    rho: DMatrix<Complex64>,
}

impl TruncatedDensityMatrix {
    /// Checks unit trace, Hermiticity and positivity.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = rho.nrows();
        if rho.ncols() != dim || dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: rho.ncols(),
            });
        }
        let tr = rho.trace();
        ensure(
            (tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL,
            "rho",
            format!("trace must be 1, got {tr}"),
        )?;
        let asym = (&rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let lowest = SymmetricEigen::new(rho.clone())
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lowest < -NEGATIVITY_TOL {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { rho })
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &DVector<Complex64>) -> Result<Self> {
        Self::new(psi * psi.adjoint())
    }

    /// Diagonal thermal state, renormalised within the cutoff.
    pub fn thermal(n_th: f64, n_cut: usize) -> Result<Self> {
        ensure(
            n_th >= 0.0 && n_th.is_finite(),
            "n_th",
            "must be non-negative",
        )?;
        let weights = thermal_populations(n_th, n_cut);
        let total: f64 = weights.iter().sum();
        let mut rho = DMatrix::zeros(n_cut + 1, n_cut + 1);
        for (n, w) in weights.iter().enumerate() {
            rho[(n, n)] = Complex64::new(w / total, 0.0);
        }
        Self::new(rho)
    }

    pub fn n_cut(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..=self.n_cut()).map(|n| self.rho[(n, n)].re).collect()
    }

    /// `Tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<b^dagger b>`.
    pub fn occupation(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// Population of levels strictly above `level`.
    pub fn tail_population(&self, level: usize) -> f64 {
        self.populations().iter().skip(level + 1).sum()
    }

    fn expect_lowering(&self, power: usize) -> Complex64 {
        // <b^k> = sum_m rho_{m, m-k} sqrt(m!/(m-k)!)
        let mut acc = Complex64::new(0.0, 0.0);
        for m in power..=self.n_cut() {
            let c: f64 = (m + 1 - power..=m).map(|j| (j as f64).sqrt()).product();
            acc += self.rho[(m, m - power)] * c;
        }
        acc
    }

    /// Mean quadratures and symmetrised covariance.
    pub fn gaussian_moments(&self, convention: SymplecticConvention) -> GaussianState {
        let k = convention.kappa;
        let k2 = convention.kappa2();
        let b = self.expect_lowering(1);
        let b2 = self.expect_lowering(2);
        let n = self.occupation();
        let d = DVector::from_row_slice(&[b.re / k, b.im / k]);
        let s11 = (2.0 * n + 1.0 + 2.0 * b2.re) / (4.0 * k2) - d[0] * d[0];
        let s22 = (2.0 * n + 1.0 - 2.0 * b2.re) / (4.0 * k2) - d[1] * d[1];
        let s12 = b2.im / (2.0 * k2) - d[0] * d[1];
        let sigma = DMatrix::from_row_slice(2, 2, &[s11, s12, s12, s22]);
        GaussianState::from_parts_unchecked(d, sigma, convention)
    }

    /// Third central moments of `cos(t) x_1 + sin(t) x_2` for
    /// `t = 0, pi/4, pi/2, 3 pi/4`; together they fix every symmetric third
    /// cumulant of the two quadratures.
    pub fn third_moments(&self, convention: SymplecticConvention) -> [f64; 4] {
        let dim = self.n_cut() + 1;
        let k = convention.kappa;
        let mut lower = DMatrix::<Complex64>::zeros(dim, dim);
        for m in 1..dim {
            lower[(m - 1, m)] = Complex64::new((m as f64).sqrt(), 0.0);
        }
        let raise = lower.adjoint();
        let x1 = (&lower + &raise) / Complex64::new(2.0 * k, 0.0);
        let x2 = (&lower - &raise) / Complex64::new(0.0, 2.0 * k);
        let mut out = [0.0; 4];
        for (j, slot) in out.iter_mut().enumerate() {
            let (s, c) = (j as f64 * std::f64::consts::FRAC_PI_4).sin_cos();
            let y = &x1 * Complex64::new(c, 0.0) + &x2 * Complex64::new(s, 0.0);
            let mean = (&self.rho * &y).trace();
            let centred = y - DMatrix::identity(dim, dim) * mean;
            let cube = &centred * &centred * &centred;
            *slot = (&self.rho * cube).trace().re;
        }
        out
    }
}

/// Bose-Einstein weights `(1 - q) q^n`, `q = N/(1+N)`.
pub fn thermal_populations(n_th: f64, n_cut: usize) -> Vec<f64> {
    let q = n_th / (1.0 + n_th);
    (0..=n_cut).map(|n| (1.0 - q) * q.powi(n as i32)).collect()
}

fn check_cutoff(amplitudes: &DVector<Complex64>) -> Result<()> {
    let n_cut = amplitudes.len() - 1;
    let missing = 1.0 - amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let top = amplitudes[n_cut].norm_sqr();
    if missing > INITIAL_TAIL_MAX || top > INITIAL_TAIL_MAX {
        return Err(Error::CutoffLeak {
            level: n_cut,
            population: missing.max(top),
        });
    }
    Ok(())
}

/// Squeezed vacuum with amplitudes
/// `c_{2n} = (-tanh r)^n sqrt((2n)!) / (2^n n! sqrt(cosh r))`.
///
/// This is the Williamson state with squeezing phase `psi = pi`: the first
/// quadrature is the squeezed one.
pub fn squeezed_vacuum_fock(r: f64, n_cut: usize) -> Result<DVector<Complex64>> {
    ensure(
        r.is_finite() && r >= 0.0,
        "r",
        format!("must be non-negative, got {r}"),
    )?;
    let mut c = DVector::zeros(n_cut + 1);
    let t = -r.tanh();
    let mut amp = 1.0 / r.cosh().sqrt();
    c[0] = Complex64::new(amp, 0.0);
    let mut n = 1;
    while 2 * n <= n_cut {
        amp *= t * ((2 * n - 1) as f64 / (2 * n) as f64).sqrt();
        c[2 * n] = Complex64::new(amp, 0.0);
        n += 1;
    }
    check_cutoff(&c)?;
    Ok(c)
}

/// Coherent state `e^{-|a|^2/2} a^n / sqrt(n!)`.
pub fn coherent_fock(alpha: Complex64, n_cut: usize) -> Result<DVector<Complex64>> {
    let mut c = DVector::zeros(n_cut + 1);
    c[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 1..=n_cut {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    check_cutoff(&c)?;
    Ok(c)
}

/// Observables recorded at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTrajectory {
    pub t: Vec<f64>,
    pub purity: Vec<f64>,
    pub displacement: Vec<[f64; 2]>,
    pub covariance: Vec<Matrix2<f64>>,
    pub occupation: Vec<f64>,
    pub third_moments: Vec<[f64; 4]>,
    pub final_state: TruncatedDensityMatrix,
}

struct Generator {
    dim: usize,
    omega: f64,
    gamma_1: f64,
    gamma_2: f64,
    sqrt_n: Vec<f64>,
    // diagonal of the truncated b b^dagger: n + 1 below the cutoff, 0 at it
    raise_lower: Vec<f64>,
}

impl Generator {
    fn new(dim: usize, omega: f64, gamma_1: f64, gamma_2: f64) -> Self {
        let sqrt_n = (0..dim).map(|n| (n as f64).sqrt()).collect();
        let raise_lower = (0..dim)
            .map(|n| if n + 1 < dim { (n + 1) as f64 } else { 0.0 })
            .collect();
        Self {
            dim,
            omega,
            gamma_1,
            gamma_2,
            sqrt_n,
            raise_lower,
        }
    }

    // column-major storage, element (m, n) at m + n * dim
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d = self.dim;
        for n in 0..d {
            for m in 0..d {
                let idx = m + n * d;
                let r = rho[idx];
                let mut v = Complex64::new(0.0, -self.omega * (m as f64 - n as f64)) * r;
                v -= r * (0.5 * self.gamma_1 * (m + n) as f64);
                v -= r * (0.5 * self.gamma_2 * (self.raise_lower[m] + self.raise_lower[n]));
                if m + 1 < d && n + 1 < d {
                    v +=
                        rho[idx + 1 + d] * (self.gamma_1 * self.sqrt_n[m + 1] * self.sqrt_n[n + 1]);
                }
                if m > 0 && n > 0 {
                    v += rho[idx - 1 - d] * (self.gamma_2 * self.sqrt_n[m] * self.sqrt_n[n]);
                }
                out[idx] = v;
            }
        }
    }

    fn fastest_rate(&self) -> f64 {
        let top = (self.dim - 1) as f64;
        self.omega.abs() * top + (self.gamma_1 + self.gamma_2) * (top + 1.0)
    }
}

fn rk4(g: &Generator, y: &mut [Complex64], h: f64, scratch: &mut [Vec<Complex64>; 5]) {
    let [k1, k2, k3, k4, tmp] = scratch;
    g.apply(y, k1);
    for i in 0..y.len() {
        tmp[i] = y[i] + k1[i] * (0.5 * h);
    }
    g.apply(tmp, k2);
    for i in 0..y.len() {
        tmp[i] = y[i] + k2[i] * (0.5 * h);
    }
    g.apply(tmp, k3);
    for i in 0..y.len() {
        tmp[i] = y[i] + k3[i] * h;
    }
    g.apply(tmp, k4);
    for i in 0..y.len() {
        y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
}

/// Fixed-step fourth-order Runge-Kutta integration of the master equation.
///
/// The step is `STEP_FRACTION` over the fastest generator rate. The first grid
/// point is the initial time.
pub fn lindblad_step_integrate(
    rho0: &TruncatedDensityMatrix,
    omega: f64,
    gamma_1: f64,
    gamma_2: f64,
    t_grid: &[f64],
    convention: SymplecticConvention,
) -> Result<FockTrajectory> {
    ensure(
        gamma_1 >= 0.0 && gamma_1.is_finite(),
        "gamma_1",
        "must be non-negative",
    )?;
    ensure(
        gamma_2 >= 0.0 && gamma_2.is_finite(),
        "gamma_2",
        "must be non-negative",
    )?;
    ensure(omega.is_finite(), "omega", "must be finite")?;
    ensure(!t_grid.is_empty(), "t_grid", "must not be empty")?;
    for (i, w) in t_grid.windows(2).enumerate() {
        if w[1].partial_cmp(&w[0]) != Some(Ordering::Greater) {
            return Err(Error::NonMonotonicGrid(i + 1));
        }
    }
    let n_cut = rho0.n_cut();
    let tail_from = (9 * n_cut) / 10;
    let tail = rho0.tail_population(tail_from);
    if tail > INITIAL_TAIL_MAX {
        return Err(Error::CutoffLeak {
            level: tail_from,
            population: tail,
        });
    }

    let dim = n_cut + 1;
    let g = Generator::new(dim, omega, gamma_1, gamma_2);
    let rate = g.fastest_rate();
    let max_step = if rate > 0.0 {
        STEP_FRACTION / rate
    } else {
        f64::INFINITY
    };
    let mut y: Vec<Complex64> = rho0.rho.as_slice().to_vec();
    let mut scratch: [Vec<Complex64>; 5] =
        std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); dim * dim]);

    let mut traj = FockTrajectory {
        t: t_grid.to_vec(),
        purity: Vec::with_capacity(t_grid.len()),
        displacement: Vec::with_capacity(t_grid.len()),
        covariance: Vec::with_capacity(t_grid.len()),
        occupation: Vec::with_capacity(t_grid.len()),
        third_moments: Vec::with_capacity(t_grid.len()),
        final_state: rho0.clone(),
    };
    let mut record = |rho: &TruncatedDensityMatrix| {
        let m = rho.gaussian_moments(convention);
        let s = m.covariance();
        traj.purity.push(rho.purity());
        traj.displacement
            .push([m.displacement()[0], m.displacement()[1]]);
        traj.covariance
            .push(Matrix2::new(s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]));
        traj.occupation.push(rho.occupation());
        traj.third_moments.push(rho.third_moments(convention));
    };
    record(rho0);

    let mut state = rho0.clone();
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            rk4(&g, &mut y, h, &mut scratch);
            let top = y[dim * dim - 1].re;
            if top > TOP_LEVEL_MAX {
                return Err(Error::CutoffLeak {
                    level: n_cut,
                    population: top,
                });
            }
        }
        let mut rho = DMatrix::from_column_slice(dim, dim, &y);
        rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        y.copy_from_slice(rho.as_slice());
        state = TruncatedDensityMatrix { rho };
        record(&state);
    }
    traj.final_state = state;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn conv() -> SymplecticConvention {
        SymplecticConvention::default()
    }

    #[test]
    fn squeezed_vacuum_amplitudes() {
        let v = squeezed_vacuum_fock(0.0, 10).unwrap();
        assert_eq!(v[0], Complex64::new(1.0, 0.0));
        assert!(v.iter().skip(1).all(|z| *z == Complex64::new(0.0, 0.0)));
        for (r, n_cut) in [(0.2, 40), (0.5, 40), (1.0, 80)] {
            let v = squeezed_vacuum_fock(r, n_cut).unwrap();
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            let n: f64 = v
                .iter()
                .enumerate()
                .map(|(k, z)| k as f64 * z.norm_sqr())
                .sum();
            assert!((n - r.sinh().powi(2)).abs() < 1e-8);
            assert!(v.iter().skip(1).step_by(2).all(|z| z.norm() == 0.0));
        }
        assert!(matches!(
            squeezed_vacuum_fock(1.0, 40),
            Err(Error::CutoffLeak { .. })
        ));
    }

    #[test]
    fn squeezed_vacuum_moments_match_williamson_form() {
        use crate::gaussian::state_from_params;
        let rho =
            TruncatedDensityMatrix::from_pure(&squeezed_vacuum_fock(0.7, 60).unwrap()).unwrap();
        let m = rho.gaussian_moments(conv());
        let expected =
            state_from_params(1.0, 0.7, std::f64::consts::PI, [0.0, 0.0], conv()).unwrap();
        assert_relative_eq!(m.covariance(), expected.covariance(), epsilon = 1e-10);
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_moments() {
        let a = Complex64::new(0.8, -0.5);
        let rho = TruncatedDensityMatrix::from_pure(&coherent_fock(a, 40).unwrap()).unwrap();
        let m = rho.gaussian_moments(conv());
        let k = conv().kappa;
        assert_relative_eq!(m.displacement()[0], a.re / k, epsilon = 1e-12);
        assert_relative_eq!(m.displacement()[1], a.im / k, epsilon = 1e-12);
        assert_relative_eq!(
            m.covariance(),
            &(DMatrix::identity(2, 2) * conv().vacuum_eigenvalue()),
            epsilon = 1e-10
        );
        assert_relative_eq!(rho.occupation(), a.norm_sqr(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let mut rho = DMatrix::<Complex64>::zeros(3, 3);
        rho[(0, 0)] = Complex64::new(0.5, 0.0);
        assert!(TruncatedDensityMatrix::new(rho.clone()).is_err());
        rho[(1, 1)] = Complex64::new(0.5, 0.0);
        rho[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            TruncatedDensityMatrix::new(rho.clone()),
            Err(Error::NotSymmetric(_))
        ));
        rho[(1, 0)] = Complex64::new(0.1, 0.0);
        assert!(TruncatedDensityMatrix::new(rho.clone()).is_ok());
        rho[(0, 1)] = Complex64::new(0.9, 0.0);
        rho[(1, 0)] = Complex64::new(0.9, 0.0);
        assert!(matches!(
            TruncatedDensityMatrix::new(rho),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn unitary_evolution_keeps_purity() {
        let rho =
            TruncatedDensityMatrix::from_pure(&squeezed_vacuum_fock(0.5, 30).unwrap()).unwrap();
        let grid: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
        let tr = lindblad_step_integrate(&rho, 4.0, 0.0, 0.0, &grid, conv()).unwrap();
        for p in &tr.purity {
            assert!((p - 1.0).abs() < 1e-9, "{p}");
        }
    }

    #[test]
    fn relaxes_to_bose_einstein_weights() {
        let rho =
            TruncatedDensityMatrix::from_pure(&squeezed_vacuum_fock(0.3, 24).unwrap()).unwrap();
        let (gamma, n_th) = (1.0, 0.2);
        let tr = lindblad_step_integrate(
            &rho,
            1.0,
            gamma * (1.0 + n_th),
            gamma * n_th,
            &[0.0, 40.0],
            conv(),
        )
        .unwrap();
        let expected = thermal_populations(n_th, 24);
        for (p, e) in tr.final_state.populations().iter().zip(&expected) {
            assert!((p - e).abs() < 1e-6);
        }
    }

    #[test]
    fn leaking_cutoff_is_reported() {
        let psi = coherent_fock(Complex64::new(2.0, 0.0), 40).unwrap();
        let rho = TruncatedDensityMatrix::from_pure(&psi).unwrap();
        // strong heating pumps population into the top level
        let r = lindblad_step_integrate(&rho, 0.0, 0.0, 5.0, &[0.0, 5.0], conv());
        assert!(matches!(r, Err(Error::CutoffLeak { .. })));
        let mut top = DVector::zeros(13);
        top[12] = Complex64::new(1.0, 0.0);
        let rho = TruncatedDensityMatrix::from_pure(&top).unwrap();
        assert!(matches!(
            lindblad_step_integrate(&rho, 0.0, 1.0, 0.0, &[0.0, 1.0], conv()),
            Err(Error::CutoffLeak { .. })
        ));
    }
}
