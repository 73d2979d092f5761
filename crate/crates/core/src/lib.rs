//! Exterior Helmholtz scattering by coupling a thin finite element layer
//! around a curved scatterer with boundary algebraic equations on the
//! surrounding uniform square lattice.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bae;
pub mod error;
pub mod fem;
pub mod greens;
pub mod harness;
pub mod lattice;
pub mod mesh;
pub mod solve;

pub use error::{Error, Result};
