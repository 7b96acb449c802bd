//! Almost-periodic exponential sums with spectra in convex cones.
//!
//! The crate evaluates finite sums `F(z) = sum_n a_n exp(i <z, lambda_n>)`
//! on tube domains `{x + iy : y in K}`, computes conjugate cones, extracts
//! Fourier coefficients by cube means, forms Bochner–Fejér sums, searches
//! for almost periods and estimates growth indicators. The `verify` module
//! composes these into numerical checks of the extension and indicator
//! identities for finite sums.

pub mod cli;
pub mod cones;
pub mod error;
pub mod expsum;
pub mod fejer;
pub mod indicator;
mod linalg;
pub mod meanvalue;
pub mod metrics;
pub mod quadrature;
pub mod verify;

pub use cones::{support_function, Cone};
pub use error::{Error, Result};
pub use expsum::{ComplexScalar, ExponentialSum, Term, TubePoint};
