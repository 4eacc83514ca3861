//! Fisher-Hartwig Toeplitz matrices at desk scale.
//!
//! The crate builds the order-`N` matrices generated by the symbol
//! `a(z) = (2 - z - 1/z)^alpha (-z)^beta`, diagonalizes them exactly, extracts
//! quasi-particle momenta from eigenvectors and eigenvalues, and constructs the
//! semi-infinite (Toeplitz operator) eigenvectors by Wiener-Hopf quadrature so
//! the two can be compared.
//!
//! Module map:
//!
//! - [`specialfn`]: real gamma / log-gamma with pole detection.
//! - [`symbol`]: the symbol on and off the unit circle, winding numbers, `a(z_c) = eps`.
//! - [`toeplitz`]: matrix elements (closed form, Fourier oracle, asymptotic law).
//! - [`eigensolver`]: dense eigendecomposition, Widom-grid labels, biorthonormal basis.
//! - [`quasiparticle`]: momenta `p_psi`, `p_eps`, momentum tables and log-law fits.
//! - [`wienerhopf`]: the `nu = -1` quadrature solution and its comparison to exact vectors.
//! - [`asymptotics`]: two-term model, `Im(p)` law and the eigenvalue shift.
//! - [`report`]: CSV / JSON records shared by the command-line front end.

pub mod asymptotics;
pub mod eigensolver;
mod error;
pub mod par;
pub mod quad;
pub mod quasiparticle;
pub mod report;
pub mod specialfn;
pub mod symbol;
pub mod toeplitz;
pub mod wienerhopf;

mod assignment;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use symbol::FHParams;

/// Library version recorded in output sidecars.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
