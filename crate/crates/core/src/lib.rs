//! Linearized shallow-network solver library: fixed hidden-layer parameter
//! generators, quadrature, Galerkin and collocation system assembly, dense
//! SVD-based solvers, and the experiment runner behind the `lab` CLI.

pub mod activation;
pub mod assembly;
pub mod collocation;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod points;
pub mod quadrature;
pub mod targets;

pub use error::{Error, Result};
