//! Exactly computable finite-dimensional models for cocycle dimensions,
//! chemical potentials, super-KMS indices and fusion data.
//!
//! Thermal side: [`qsys`], [`cocycle`], [`charge`], [`susy`].
//! Categorical side: [`category`], [`double`].

pub mod category;
pub mod charge;
pub mod cocycle;
pub mod double;
mod error;
pub mod linalg;
pub mod qsys;
pub mod susy;

pub use error::{Error, Result};
pub use num_complex::Complex64;
