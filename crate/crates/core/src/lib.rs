//! AOR iteration with the `P = I + Q` preconditioner catalog, matrix-class
//! analyzers, and an empirical checker for Stein-Rosenberg type comparison
//! theorems.

pub mod aor;
pub mod classes;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod mm;
pub mod preconditioners;
pub mod spectral;
pub mod theorems;

pub use error::{Error, Result};
pub use matrix::{cone_compare, decompose_dlu, inverse_nonneg, ConeOrder, DluSplit, Matrix};
