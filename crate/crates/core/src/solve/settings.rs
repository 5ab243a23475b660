use crate::error::{Error, Result};

/// How the search direction is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Damped Newton on the smoothed objective, falling back to steepest
    /// descent whenever the Hessian is not numerically positive definite.
    Newton,
    Steepest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSettings {
    /// Smoothing parameters, strictly decreasing.
    pub epsilons: Vec<f64>,
    pub direction: Direction,
    pub initial_step: f64,
    pub shrink: f64,
    pub sufficient_decrease: f64,
    /// Stop once the predicted (Newton) or achieved (steepest) decrease of
    /// the log-objective falls below this.
    pub rel_tol: f64,
    pub max_iterations: usize,
    pub max_backtracks: usize,
    /// Cap on norm updates per stage when minimizing a Luxemburg norm.
    pub max_passes: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            direction: Direction::Newton,
            initial_step: 1.0,
            shrink: 0.5,
            sufficient_decrease: 1e-4,
            rel_tol: 1e-13,
            max_iterations: 500,
            max_backtracks: 60,
            max_passes: 100,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let bad = |detail: String| Err(Error::invalid("solver settings", detail));
        if self.epsilons.is_empty() {
            return bad("empty epsilon schedule".into());
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad(format!("epsilons must be positive, got {:?}", self.epsilons));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!("epsilons must strictly decrease, got {:?}", self.epsilons));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad(format!("shrink {} outside (0, 1)", self.shrink));
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease <= 0.5) {
            return bad(format!("sufficient decrease {} outside (0, 1/2]", self.sufficient_decrease));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return bad(format!("initial step {}", self.initial_step));
        }
        if !(self.rel_tol > 0.0) {
            return bad(format!("rel_tol {}", self.rel_tol));
        }
        if self.max_iterations == 0 || self.max_backtracks == 0 || self.max_passes == 0 {
            return bad("iteration limits must be positive".into());
        }
        Ok(())
    }

    /// The same settings with the last epsilon replaced.
    pub fn with_floor(&self, floor: f64) -> Self {
        let mut out = self.clone();
        out.epsilons.retain(|e| *e > floor);
        out.epsilons.push(floor);
        out
    }
}
