//! Minimization of the discrete power-law functionals with smoothing
//! continuation, and closed-form supremal oracles.

mod banded;
mod minimize;
mod oracle;
mod settings;

pub use minimize::{
    minimize_power, minimize_power_from, Functional, SolveResult, SolveStatus, Stage,
};
pub use oracle::{
    euler_lagrange_1d, inverse_power_integral, mesh_oracle, oracle_minimizer_1d,
    supremal_oracle_1d,
};
pub use settings::{Direction, SolverSettings};
