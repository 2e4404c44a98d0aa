//! Fractional calculus with respect to a weight function `psi`, and solvers
//! for coupled two-equation boundary value problems built on it.

pub mod bvp;
pub mod calculus;
pub mod cli;
pub mod collocation;
pub mod config;
pub mod error;
pub mod expr;
pub mod gamma;
pub mod psi;
pub mod quadrature;
pub mod reproduce;

pub use error::{Error, Result};
