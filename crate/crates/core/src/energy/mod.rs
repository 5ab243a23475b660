//! Densities `f(x, u, ξ)` and the supremal, norm and integral
//! functionals built from them.

mod density;
mod functionals;
mod probes;

pub use density::{Coefficient, CustomRule, DensityFamily, DensitySpec, SmoothDensity};
pub use functionals::{density_field, eval_cal_fn, eval_fn, eval_supremal, log_cal_fn};
pub use probes::{growth_check, level_convexity_probe};
