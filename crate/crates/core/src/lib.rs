//! Exact convolution powers of discrete uniform distributions, their maximal
//! point probabilities, and certified checks of the square-root concentration
//! bound `c_{ell,n} < sqrt(6 / (pi (ell^2 - 1) n))` together with its
//! companion inequalities.
//!
//! - [`exactdist`]: exact densities, concentrations, moments.
//! - [`certify`]: interval arithmetic and certified verdicts.
//! - [`bounds`]: the closed-form bounds as enclosures.
//! - [`spectral`]: Fourier inversion and quadrature diagnostics.
//! - [`asymptotics`]: finite-n sharpness and local CLT checks.
//! - [`sweep`]: grid sweeps and reports.

pub mod asymptotics;
pub mod bounds;
pub mod certify;
pub mod error;
pub mod exactdist;
pub mod spectral;
pub mod sweep;

pub use error::{Error, Result};
