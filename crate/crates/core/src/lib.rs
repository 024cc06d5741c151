//! Numerical verification of the sharp-remainder Rellich and Hardy
//! equalities on explicit test functions.

pub mod error;
pub mod fields;
pub mod identities;
pub mod jet;
pub mod operators;
pub mod point;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
