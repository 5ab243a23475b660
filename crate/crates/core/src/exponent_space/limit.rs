use super::field::ExponentSequence;
use super::grid::{ensure_same_grid, GridFunction};
use super::norms::luxemburg_norm;
use crate::error::Result;
use crate::report::{ConvergenceRow, ConvergenceTable};

/// `‖u‖_{p_n(·)}` along the sequence, with the distance to `max_i |u_i|`.
pub fn norm_limit_study(
    u: &GridFunction,
    seq: &ExponentSequence,
    n_values: &[u32],
) -> Result<ConvergenceTable> {
    ensure_same_grid(u.grid(), seq.grid(), "function and exponent sequence")?;
    let sup = u.sup_norm();
    let terms = seq.check_schedule(n_values)?;
    let rows = n_values
        .iter()
        .zip(&terms)
        .map(|(&n, p)| {
            let norm = luxemburg_norm(u, p)?;
            Ok(ConvergenceRow {
                parameter: f64::from(n),
                value: norm,
                error: (norm - sup).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { limit: sup, rows })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exponent_space::{ExponentProfile, Grid};

    #[test]
    fn constant_function_has_zero_error() {
        let g = Arc::new(Grid::uniform_1d(0.0, 1.0, 10).unwrap());
        let u = GridFunction::constant(g.clone(), 0.7).unwrap();
        let seq = ExponentSequence::new(g, ExponentProfile::Constant, 2.0).unwrap();
        let table = norm_limit_study(&u, &seq, &[2, 4, 8, 16]).unwrap();
        for row in &table.rows {
            assert!((row.value - 0.7).abs() < 1e-11);
            assert!(row.error < 1e-11);
        }
    }

    #[test]
    fn schedule_must_increase() {
        let g = Arc::new(Grid::uniform_1d(0.0, 1.0, 10).unwrap());
        let u = GridFunction::constant(g.clone(), 0.7).unwrap();
        let seq = ExponentSequence::new(g, ExponentProfile::Constant, 2.0).unwrap();
        assert!(norm_limit_study(&u, &seq, &[4, 2]).is_err());
    }
}
