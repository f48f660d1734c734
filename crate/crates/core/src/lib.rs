//! Numerical shape calculus: Eulerian derivatives of shape functionals,
//! checked against finite differences along flows.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod derivative;
pub mod error;
pub mod experiment;
pub mod fields;
pub mod flow;
pub mod functionals;
pub mod geometry;
pub mod report;
pub mod validation;

pub use error::{Result, ShapeError};
