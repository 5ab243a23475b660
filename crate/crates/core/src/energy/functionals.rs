use super::density::DensitySpec;
use crate::error::{Error, Result};
use crate::exponent_space::{
    ensure_same_grid, log_sum_exp, luxemburg_norm, ExponentField, GridFunction, LOG_OVERFLOW,
};

/// The cell-wise field `f(x_i, u_i, Du_i)`.
pub fn density_field(f: &DensitySpec, u: &GridFunction, du: &GridFunction) -> Result<GridFunction> {
    ensure_same_grid(u.grid(), du.grid(), "function and gradient")?;
    let grid = u.grid();
    if du.components() != u.components() * grid.dimension() {
        return Err(Error::Precondition(format!(
            "gradient has {} components, expected {}",
            du.components(),
            u.components() * grid.dimension()
        )));
    }
    let values = (0..grid.len())
        .map(|i| f.eval_density(grid.center(i), u.at(i), du.at(i)))
        .collect::<Result<Vec<_>>>()?;
    GridFunction::scalar(grid.clone(), values)
}

/// `ess sup_Ω f(x, u, Du)`, the maximum over cells.
pub fn eval_supremal(f: &DensitySpec, u: &GridFunction, du: &GridFunction) -> Result<f64> {
    Ok(density_field(f, u, du)?.values().iter().copied().fold(0.0, f64::max))
}

/// `‖f(·, u, Du)‖_{p(·)}`.
pub fn eval_fn(
    f: &DensitySpec,
    u: &GridFunction,
    du: &GridFunction,
    p: &ExponentField,
) -> Result<f64> {
    luxemburg_norm(&density_field(f, u, du)?, p)
}

/// `ln Σ w_i f_i^{p_i} / p_i`, finite whenever the densities are.
pub fn log_cal_fn(
    f: &DensitySpec,
    u: &GridFunction,
    du: &GridFunction,
    p: &ExponentField,
) -> Result<f64> {
    let field = density_field(f, u, du)?;
    ensure_same_grid(field.grid(), p.grid(), "density field and exponent")?;
    let logs: Vec<f64> = field
        .values()
        .iter()
        .zip(field.grid().weights())
        .zip(p.values())
        .filter(|((v, _), _)| **v > 0.0)
        .map(|((v, w), pi)| w.ln() - pi.ln() + pi * v.ln())
        .collect();
    if logs.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(log_sum_exp(&logs))
}

/// `∫ f^{p(x)} / p(x) dx`; `+∞` once any cell has `p_i ln f_i` above the
/// overflow threshold.
pub fn eval_cal_fn(
    f: &DensitySpec,
    u: &GridFunction,
    du: &GridFunction,
    p: &ExponentField,
) -> Result<f64> {
    let field = density_field(f, u, du)?;
    ensure_same_grid(field.grid(), p.grid(), "density field and exponent")?;
    let overflow = field
        .values()
        .iter()
        .zip(p.values())
        .any(|(v, pi)| *v > 0.0 && pi * v.ln() > LOG_OVERFLOW);
    if overflow {
        return Ok(f64::INFINITY);
    }
    Ok(log_cal_fn(f, u, du, p)?.exp())
}
