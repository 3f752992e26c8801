//! Space-time discontinuous Galerkin discretization of coupled
//! hyperbolic-parabolic (poro-/thermoelastic) systems in two dimensions.

pub mod analysis;
pub mod commands;
pub mod error;
pub mod fespace;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod setup;
pub mod solver;
pub mod sparse;
pub mod timeslab;

pub use error::{Error, Result};
