//! Discrete variable-exponent Lebesgue and Sobolev spaces.
//!
//! A [`Grid`] is a finite measure space (cell centers with positive
//! weights), so every relation between modular and norm holds exactly at
//! the discrete level and can be checked as such.

mod field;
mod grid;
mod limit;
mod norms;
mod relations;

pub use field::{ExponentField, ExponentProfile, ExponentSequence};
pub use grid::{Grid, GridFunction};
pub use limit::norm_limit_study;
pub use norms::{
    log_modular, lq_norm, luxemburg_norm, modular, modular_scaled, sobolev_modular, sobolev_norm,
    LOG_OVERFLOW, LUXEMBURG_RTOL,
};
pub use relations::{
    embedding_bound_check, embedding_constant, holder_check, power_identity_check,
    verify_norm_modular_relations, POWER_IDENTITY_RTOL,
};

pub(crate) use grid::ensure_same_grid;
pub(crate) use norms::log_sum_exp;
