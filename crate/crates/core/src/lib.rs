//! Open-system dynamics of single-mode Gaussian phonon states in a uniform,
//! three-dimensional Bose-Einstein condensate.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: symplectic phase-space representation of Gaussian states.
//! - [`bec`]: Bogoliubov dispersion, coefficients and thermal occupation.
//! - [`damping`]: Beliaev/Landau damping rates, closed forms and collision integrals.
//! - [`lyapunov`]: drift/diffusion construction and moment evolution.
//! - [`decoherence`]: closed-form purity, nonclassical depth, squeezing and occupation.
//! - [`three_body`]: three-body recombination lifetime of the condensate.
//! - [`fock`]: truncated number-basis master-equation integrator used as a validator.
//! - [`scenario`]: configuration, trajectories, frequency sweeps and the verify suite.
//!
//! All physical quantities are SI. Quadratures are dimensionless and scaled by
//! the symplectic constant kappa carried in [`gaussian::SymplecticConvention`].

pub mod bec;
pub mod constants;
pub mod damping;
pub mod decoherence;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod lyapunov;
pub mod quadrature;
pub mod scenario;
pub mod three_body;

pub use error::{Error, Result};
