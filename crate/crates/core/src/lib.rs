//! Exact computations with extended affine root systems, their characters
//! and a multiloop Lie torus realization of type A.

pub mod characters;
pub mod ears;
pub mod error;
pub mod lattice;
pub mod lie_torus;
pub mod report;
pub mod rootsys;
pub mod weyl;

pub use error::{Error, Result};
