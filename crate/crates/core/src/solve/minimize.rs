use crate::discretize::{gradient, interpolate_boundary, DiscreteField, MeshSpec};
use crate::energy::{eval_cal_fn, eval_fn, DensitySpec};
use crate::error::{Error, Result};
use crate::exponent_space::{
    ensure_same_grid, log_sum_exp, luxemburg_norm, ExponentField, GridFunction,
};

use super::banded::BandMatrix;
use super::settings::{Direction, SolverSettings};

/// Which power-law functional to minimize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// `‖f(·, u, Du)‖_{p(·)}`
    Fn,
    /// `∫ f^{p(x)} / p(x) dx`
    CalFn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    /// The line search could not decrease the objective.
    Stagnated,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::Stagnated => "stagnated",
        }
    }
}

/// One continuation stage. `trace` holds the log of the smoothed objective:
/// per Newton iteration for `CalFn`, per norm update for `Fn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stage {
    pub epsilon: f64,
    pub trace: Vec<f64>,
    pub iterations: usize,
    /// `‖∇ ln J‖_∞` over interior nodes at the end of the stage.
    pub residual: f64,
    pub status: SolveStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub nodes: Vec<f64>,
    /// The unsmoothed functional at the returned field (`+∞` sentinel for
    /// an overflowing `CalFn`).
    pub objective: f64,
    pub iterations: usize,
    pub stages: Vec<Stage>,
    pub status: SolveStatus,
}

impl SolveResult {
    pub fn field<'m>(&self, mesh: &'m MeshSpec) -> DiscreteField<'m> {
        DiscreteField::new(mesh, self.nodes.clone()).expect("solver keeps nodes finite")
    }

    pub fn residual(&self) -> f64 {
        self.stages.last().map_or(0.0, |s| s.residual)
    }
}

/// Minimizes `functional` over the interior nodes of `mesh`, starting from
/// the interpolated boundary data.
pub fn minimize_power(
    functional: Functional,
    f: &DensitySpec,
    p: &ExponentField,
    mesh: &MeshSpec,
    settings: &SolverSettings,
) -> Result<SolveResult> {
    minimize_power_from(functional, f, p, &interpolate_boundary(mesh), settings)
}

/// As [`minimize_power`] from a given field; its boundary nodes are kept.
pub fn minimize_power_from(
    functional: Functional,
    f: &DensitySpec,
    p: &ExponentField,
    start: &DiscreteField<'_>,
    settings: &SolverSettings,
) -> Result<SolveResult> {
    settings.validate()?;
    let mesh = start.mesh();
    ensure_same_grid(mesh.grid(), p.grid(), "exponent and mesh")?;
    f.check_dimension(mesh.dimension())?;
    let mut problem = Problem::new(f, p, mesh);
    let mut nodes = start.nodes().to_vec();
    let mut stages = Vec::with_capacity(settings.epsilons.len());
    let mut status = SolveStatus::Converged;
    let mut iterations = 0;
    for &eps in &settings.epsilons {
        problem.eps = eps;
        let stage = match functional {
            Functional::CalFn => {
                problem.log_coeff = p.values().iter().zip(mesh.grid().weights()).map(|(pi, w)| w.ln() - pi.ln()).collect();
                let run = problem.descend(&mut nodes, settings);
                Stage {
                    epsilon: eps,
                    trace: run.trace,
                    iterations: run.iterations,
                    residual: run.residual,
                    status: run.status,
                }
            }
            Functional::Fn => problem.alternate(&mut nodes, settings)?,
        };
        iterations += stage.iterations;
        if stage.status != SolveStatus::Converged && status != SolveStatus::Stagnated {
            status = stage.status;
        }
        let stagnated = stage.status == SolveStatus::Stagnated;
        stages.push(stage);
        if stagnated {
            break;
        }
    }
    let field = DiscreteField::new(mesh, nodes.clone())?;
    let (u, du) = (field.cell_values(), gradient(&field));
    let objective = match functional {
        Functional::Fn => eval_fn(f, &u, &du, p)?,
        Functional::CalFn => eval_cal_fn(f, &u, &du, p)?,
    };
    Ok(SolveResult {
        nodes,
        objective,
        iterations,
        stages,
        status,
    })
}

struct Run {
    trace: Vec<f64>,
    iterations: usize,
    residual: f64,
    status: SolveStatus,
}

/// `J(u) = Σ_i exp(log_coeff_i) · φ_ε(Du_i)^{p_i}` over interior nodes.
struct Problem<'a> {
    f: &'a DensitySpec,
    p: &'a [f64],
    mesh: &'a MeshSpec,
    unknown: Vec<Option<usize>>,
    interior: Vec<usize>,
    bandwidth: usize,
    log_coeff: Vec<f64>,
    eps: f64,
}

struct Derivatives {
    log_value: f64,
    grad: Vec<f64>,
    hess: BandMatrix,
}

impl<'a> Problem<'a> {
    fn new(f: &'a DensitySpec, p: &'a ExponentField, mesh: &'a MeshSpec) -> Self {
        let interior = mesh.interior_nodes();
        let mut unknown = vec![None; mesh.node_count()];
        for (k, n) in interior.iter().enumerate() {
            unknown[*n] = Some(k);
        }
        let bandwidth = if mesh.dimension() == 1 { 1 } else { mesh.cells()[0] };
        Self {
            f,
            p: p.values(),
            mesh,
            unknown,
            interior,
            bandwidth,
            log_coeff: Vec::new(),
            eps: 0.0,
        }
    }

    fn cell_gradient(&self, nodes: &[f64], cell: usize) -> ([f64; 2], Vec<(usize, [f64; 2])>) {
        let st = self.mesh.stencil(cell);
        let mut xi = [0.0; 2];
        for (n, c) in &st {
            xi[0] += c[0] * nodes[*n];
            xi[1] += c[1] * nodes[*n];
        }
        (xi, st)
    }

    fn smoothed_densities(&self, nodes: &[f64]) -> Vec<f64> {
        let d = self.mesh.dimension();
        let grid = self.mesh.grid();
        (0..grid.len())
            .map(|c| {
                let (xi, _) = self.cell_gradient(nodes, c);
                self.f.smoothed(grid.center(c), &xi[..d], self.eps).value
            })
            .collect()
    }

    fn log_terms(&self, phi: &[f64]) -> Vec<f64> {
        phi.iter()
            .zip(self.p)
            .zip(&self.log_coeff)
            .map(|((v, pi), lc)| if *v > 0.0 { lc + pi * v.ln() } else { f64::NEG_INFINITY })
            .collect()
    }

    fn log_value(&self, nodes: &[f64]) -> f64 {
        log_sum_exp(&self.log_terms(&self.smoothed_densities(nodes)))
    }

    /// Gradient and Hessian of `J / J(u)`, i.e. `∇ ln J` and `∇²J / J`.
    fn derivatives(&self, nodes: &[f64]) -> Derivatives {
        let d = self.mesh.dimension();
        let grid = self.mesh.grid();
        let n = self.interior.len();
        let mut grad = vec![0.0; n];
        let mut hess = BandMatrix::zeros(n, self.bandwidth);
        let cells: Vec<_> = (0..grid.len())
            .map(|c| {
                let (xi, st) = self.cell_gradient(nodes, c);
                (self.f.smoothed(grid.center(c), &xi[..d], self.eps), st)
            })
            .collect();
        let phi: Vec<f64> = cells.iter().map(|(s, _)| s.value).collect();
        let logs = self.log_terms(&phi);
        let log_value = log_sum_exp(&logs);
        for (c, (sd, st)) in cells.iter().enumerate() {
            let s = (logs[c] - log_value).exp();
            if s == 0.0 {
                continue;
            }
            let (pi, v) = (self.p[c], sd.value);
            let mut gx = [0.0; 2];
            let mut hx = [0.0; 4];
            for k in 0..d {
                gx[k] = s * pi * sd.grad[k] / v;
                for l in 0..d {
                    hx[k * 2 + l] = s
                        * (pi * (pi - 1.0) * sd.grad[k] * sd.grad[l] / (v * v)
                            + pi * sd.hess[k * d + l] / v);
                }
            }
            for (na, ca) in st {
                let Some(ia) = self.unknown[*na] else { continue };
                grad[ia] += (0..d).map(|k| ca[k] * gx[k]).sum::<f64>();
                for (nb, cb) in st {
                    let Some(ib) = self.unknown[*nb] else { continue };
                    if ib > ia {
                        continue;
                    }
                    let mut v = 0.0;
                    for k in 0..d {
                        for l in 0..d {
                            v += ca[k] * hx[k * 2 + l] * cb[l];
                        }
                    }
                    hess.add_lower(ia, ib, v);
                }
            }
        }
        Derivatives {
            log_value,
            grad,
            hess,
        }
    }

    fn newton_direction(&self, der: &Derivatives) -> Option<Vec<f64>> {
        let rhs: Vec<f64> = der.grad.iter().map(|g| -g).collect();
        if let Some(d) = der.hess.solve_shifted(0.0, &rhs) {
            return Some(d);
        }
        let mut shift = 1e-10 * der.hess.max_diagonal().max(f64::MIN_POSITIVE);
        for _ in 0..8 {
            if let Some(d) = der.hess.solve_shifted(shift, &rhs) {
                return Some(d);
            }
            shift *= 100.0;
        }
        None
    }

    /// Line-searched descent on `ln J` at the current coefficients.
    fn descend(&self, nodes: &mut [f64], settings: &SolverSettings) -> Run {
        let mut trace = Vec::new();
        let mut residual;
        let mut step = settings.initial_step;
        for it in 0..settings.max_iterations {
            let der = self.derivatives(nodes);
            residual = der.grad.iter().fold(0.0, |m, g| f64::max(m, g.abs()));
            trace.push(der.log_value);
            if residual == 0.0 {
                return Run { trace, iterations: it, residual, status: SolveStatus::Converged };
            }
            let steepest: Vec<f64> = der.grad.iter().map(|g| -g).collect();
            let (dir, newton) = match settings.direction {
                Direction::Newton => match self.newton_direction(&der) {
                    Some(d) if dot(&d, &der.grad) < 0.0 => (d, true),
                    _ => (steepest.clone(), false),
                },
                Direction::Steepest => (steepest.clone(), false),
            };
            let slope = dot(&dir, &der.grad);
            if newton && -slope < 2.0 * settings.rel_tol {
                return Run { trace, iterations: it, residual, status: SolveStatus::Converged };
            }
            let t0 = if newton { settings.initial_step } else { step };
            let accepted = self
                .line_search(nodes, &dir, slope, der.log_value, t0, settings)
                .or_else(|| {
                    if newton {
                        let s = dot(&steepest, &der.grad);
                        self.line_search(nodes, &steepest, s, der.log_value, step, settings)
                    } else {
                        None
                    }
                });
            match accepted {
                Some((t, log_new)) => {
                    if !newton {
                        step = (t / settings.shrink).min(1e12);
                    }
                    if !newton && der.log_value - log_new < settings.rel_tol {
                        trace.push(log_new);
                        return Run { trace, iterations: it + 1, residual, status: SolveStatus::Converged };
                    }
                }
                None => {
                    let status = if -slope < 1e-8 { SolveStatus::Converged } else { SolveStatus::Stagnated };
                    return Run { trace, iterations: it, residual, status };
                }
            }
        }
        let der = self.derivatives(nodes);
        let residual = der.grad.iter().fold(0.0, |m, g| f64::max(m, g.abs()));
        trace.push(der.log_value);
        Run {
            trace,
            iterations: settings.max_iterations,
            residual,
            status: SolveStatus::MaxIterations,
        }
    }

    /// Backtracks from `t0` until the Armijo condition on `ln J` holds;
    /// updates `nodes` and returns `(t, ln J_new)` on success.
    fn line_search(
        &self,
        nodes: &mut [f64],
        dir: &[f64],
        slope: f64,
        log_value: f64,
        t0: f64,
        settings: &SolverSettings,
    ) -> Option<(f64, f64)> {
        let mut trial = nodes.to_vec();
        let mut t = t0;
        for _ in 0..settings.max_backtracks {
            for (k, n) in self.interior.iter().enumerate() {
                trial[*n] = nodes[*n] + t * dir[k];
            }
            let log_new = self.log_value(&trial);
            if log_new.is_finite() && log_new <= log_value + settings.sufficient_decrease * t * slope {
                nodes.copy_from_slice(&trial);
                return Some((t, log_new));
            }
            t *= settings.shrink;
        }
        None
    }

    /// Minimizes the smoothed Luxemburg norm by alternating between the
    /// norm `λ` of the current density field and descent on the modular
    /// `Σ w_i (φ_i / λ)^{p_i}` at fixed `λ`. Each pass keeps the modular at
    /// most one, so the recorded norms never increase.
    fn alternate(&mut self, nodes: &mut [f64], settings: &SolverSettings) -> Result<Stage> {
        let grid = self.mesh.grid().clone();
        let weights = grid.weights().to_vec();
        let norm_of = |pb: &Self, nodes: &[f64]| -> Result<f64> {
            let phi = GridFunction::scalar(grid.clone(), pb.smoothed_densities(nodes))?;
            let p = ExponentField::new(grid.clone(), pb.p.to_vec())?;
            luxemburg_norm(&phi, &p)
        };
        let mut lambda = norm_of(self, nodes)?;
        let mut trace = vec![lambda.ln()];
        let mut iterations = 0;
        let mut residual = 0.0;
        let mut status = SolveStatus::MaxIterations;
        for _ in 0..settings.max_passes {
            if !(lambda > 0.0) {
                status = SolveStatus::Converged;
                break;
            }
            let ll = lambda.ln();
            self.log_coeff = weights.iter().zip(self.p).map(|(w, pi)| w.ln() - pi * ll).collect();
            let run = self.descend(nodes, settings);
            iterations += run.iterations;
            residual = run.residual;
            let next = norm_of(self, nodes)?;
            if next > lambda * (1.0 + 1e-9) {
                return Err(Error::Solver(format!("norm increased from {lambda} to {next}")));
            }
            trace.push(next.ln());
            let settled = lambda - next <= 1e-12 * lambda;
            lambda = next;
            if run.status == SolveStatus::Stagnated {
                status = SolveStatus::Stagnated;
                break;
            }
            if settled {
                status = run.status;
                break;
            }
        }
        Ok(Stage {
            epsilon: self.eps,
            trace,
            iterations,
            residual,
            status,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
