//! Finitely supported per-cell probability measures: barycenters,
//! Jensen's inequality for level-convex densities, and the `q → ∞` limit
//! of `L^q` norms against such measures.

use std::sync::Arc;

use crate::energy::DensitySpec;
use crate::error::{Error, Result};
use crate::exponent_space::{ensure_same_grid, log_sum_exp, Grid, GridFunction};
use crate::report::{ConvergenceRow, ConvergenceTable, RelationReport};

/// Normalization tolerance for atom weights.
const MASS_TOL: f64 = 1e-12;
const JENSEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub xi: Vec<f64>,
    pub weight: f64,
}

impl Atom {
    pub fn new(xi: Vec<f64>, weight: f64) -> Self {
        Self { xi, weight }
    }
}

/// One probability measure `μ_x` per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteYoungMeasure {
    grid: Arc<Grid>,
    atoms: Vec<Vec<Atom>>,
}

impl DiscreteYoungMeasure {
    pub fn new(grid: Arc<Grid>, atoms: Vec<Vec<Atom>>) -> Result<Self> {
        if atoms.len() != grid.len() {
            return Err(Error::invalid(
                "Young measure",
                format!("{} cells of atoms for {} grid cells", atoms.len(), grid.len()),
            ));
        }
        let dim = atoms.first().and_then(|c| c.first()).map(|a| a.xi.len());
        for (i, cell) in atoms.iter().enumerate() {
            validate_cell(cell).map_err(|d| Error::invalid("Young measure", format!("cell {i}: {d}")))?;
            if cell.iter().any(|a| Some(a.xi.len()) != dim) {
                return Err(Error::invalid("Young measure", format!("cell {i}: atom dimension differs")));
            }
        }
        Ok(Self { grid, atoms })
    }

    /// `δ_{ξ_i}` in every cell.
    pub fn dirac(du: &GridFunction) -> Self {
        let atoms = (0..du.grid().len())
            .map(|i| vec![Atom::new(du.at(i).to_vec(), 1.0)])
            .collect();
        Self {
            grid: du.grid().clone(),
            atoms,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn cell(&self, i: usize) -> &[Atom] {
        &self.atoms[i]
    }

    pub fn xi_dimension(&self) -> usize {
        self.atoms[0][0].xi.len()
    }
}

fn validate_cell(cell: &[Atom]) -> std::result::Result<(), String> {
    if cell.is_empty() {
        return Err("no atoms".into());
    }
    if let Some(a) = cell.iter().find(|a| !(a.weight > 0.0) || a.xi.iter().any(|v| !v.is_finite())) {
        return Err(format!("bad atom {a:?}"));
    }
    let total: f64 = cell.iter().map(|a| a.weight).sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(format!("weights sum to {total}"));
    }
    Ok(())
}

fn cell_barycenter(atoms: &[Atom]) -> Vec<f64> {
    let k = atoms[0].xi.len();
    let mut out = vec![0.0; k];
    for a in atoms {
        for (o, v) in out.iter_mut().zip(&a.xi) {
            *o += a.weight * v;
        }
    }
    out
}

/// `∫ ξ dμ_x(ξ)` per cell.
pub fn barycenter(mu: &DiscreteYoungMeasure) -> GridFunction {
    let k = mu.xi_dimension();
    let values = mu.atoms.iter().flat_map(|c| cell_barycenter(c)).collect();
    GridFunction::new(mu.grid.clone(), k, values).expect("finite atoms give finite barycenters")
}

/// `f(x, u, ∫ξ dμ) ≤ max_a f(x, u, ξ_a)`. Uses raw density values so
/// that non-admissible probes report a violation instead of an error.
pub fn jensen_check(
    f: &DensitySpec,
    x: &[f64],
    u_val: &[f64],
    atoms: &[Atom],
) -> Result<RelationReport> {
    validate_cell(atoms).map_err(|d| Error::invalid("atom set", d))?;
    let bary = cell_barycenter(atoms);
    let lhs = f.value(x, u_val, &bary);
    let rhs = atoms
        .iter()
        .map(|a| f.value(x, u_val, &a.xi))
        .fold(f64::NEG_INFINITY, f64::max);
    let slack = rhs - lhs;
    let mut report = RelationReport::new();
    report.push_with(
        "jensen",
        slack >= -JENSEN_TOL * (1.0 + rhs.abs()),
        slack,
        format!("f(barycenter {bary:?}) = {lhs:.6e}, max over atoms = {rhs:.6e}"),
    );
    Ok(report)
}

/// Jensen's inequality in cell `cell` of `mu`.
pub fn jensen_check_cell(
    f: &DensitySpec,
    mu: &DiscreteYoungMeasure,
    cell: usize,
    u_val: &[f64],
) -> Result<RelationReport> {
    jensen_check(f, mu.grid.center(cell), u_val, mu.cell(cell))
}

/// Rows `(q, (Σ_i w_i Σ_a μ_a f(x_i, u_i, ξ_a)^q)^{1/q})` against the limit
/// `max_i max_a f`.
pub fn young_q_limit(
    f: &DensitySpec,
    u: &GridFunction,
    mu: &DiscreteYoungMeasure,
    q_values: &[f64],
) -> Result<ConvergenceTable> {
    ensure_same_grid(u.grid(), &mu.grid, "function and Young measure")?;
    let grid = &mu.grid;
    let mut log_base = Vec::new();
    let mut log_f = Vec::new();
    let mut limit = 0.0f64;
    for i in 0..grid.len() {
        for a in mu.cell(i) {
            let v = f.eval_density(grid.center(i), u.at(i), &a.xi)?;
            limit = limit.max(v);
            if v > 0.0 {
                log_base.push(grid.weight(i).ln() + a.weight.ln());
                log_f.push(v.ln());
            }
        }
    }
    let rows = q_values
        .iter()
        .map(|&q| {
            if !(q > 0.0) {
                return Err(Error::Precondition(format!("q = {q} must be positive")));
            }
            let value = if log_f.is_empty() {
                0.0
            } else {
                let logs: Vec<f64> = log_base.iter().zip(&log_f).map(|(b, l)| b + q * l).collect();
                (log_sum_exp(&logs) / q).exp()
            };
            Ok(ConvergenceRow {
                parameter: q,
                value,
                error: (value - limit).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { limit, rows })
}

/// The geometric schedule `2, 4, …, 1024`.
pub fn default_q_schedule() -> Vec<f64> {
    (1..=10).map(|k| f64::from(1u32 << k)).collect()
}
