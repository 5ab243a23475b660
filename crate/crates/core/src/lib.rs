//! Variable-exponent Lebesgue norms and the power-law approximation of
//! supremal functionals on discrete domains.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod discretize;
pub mod energy;
pub mod error;
pub mod exponent_space;
pub mod gamma_lab;
pub mod measure_tools;
pub mod report;
pub mod sampling;
pub mod solve;

pub use error::{Error, Result};
