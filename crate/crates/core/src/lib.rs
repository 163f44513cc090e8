//! Numerical laboratory for Riemannian submersions from hyperkähler manifolds.

pub mod classify;
pub mod cli;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod lab;
pub mod linalg;
pub mod manifest;
pub mod report;
pub mod quaternionic;
pub mod riemann;
pub mod sampling;
pub mod submersion;

pub use error::{Error, Result};
