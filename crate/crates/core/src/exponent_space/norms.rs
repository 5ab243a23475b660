//! Modulars and Luxemburg norms evaluated in the log domain.

use super::field::ExponentField;
use super::grid::{ensure_same_grid, neumaier_sum, GridFunction};
use crate::error::{Error, Result};

/// A single term `w·|u/λ|^p` with `p·(ln|u| - ln λ)` above this is treated
/// as overflow and the whole modular becomes `+∞`.
pub const LOG_OVERFLOW: f64 = 700.0;

/// Relative bracket width at which the Luxemburg bisection stops.
pub const LUXEMBURG_RTOL: f64 = 1e-12;

/// Terms `w_i |v_i|^{p_i}` kept as `(ln w_i, ln |v_i|, p_i)`; zero
/// magnitudes carry `ln 0 = -∞` and contribute nothing.
#[derive(Debug, Clone)]
pub(crate) struct PowerTerms {
    log_weight: Vec<f64>,
    log_mag: Vec<f64>,
    exponent: Vec<f64>,
}

impl PowerTerms {
    pub(crate) fn new() -> Self {
        Self {
            log_weight: Vec::new(),
            log_mag: Vec::new(),
            exponent: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, weight: f64, magnitude: f64, exponent: f64) {
        self.log_weight.push(weight.ln());
        self.log_mag.push(magnitude.abs().ln());
        self.exponent.push(exponent);
    }

    pub(crate) fn from_parts(weights: &[f64], magnitudes: &[f64], exponents: &[f64]) -> Self {
        let mut terms = Self::new();
        for ((w, m), p) in weights.iter().zip(magnitudes).zip(exponents) {
            terms.push(*w, *m, *p);
        }
        terms
    }

    fn max_log_mag(&self) -> f64 {
        self.log_mag.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `Σ w |v/λ|^p` given `ln λ`, or `+∞` on overflow.
    pub(crate) fn modular_at(&self, ln_lambda: f64) -> f64 {
        let mut terms = Vec::with_capacity(self.log_mag.len());
        for ((lw, lm), p) in self.log_weight.iter().zip(&self.log_mag).zip(&self.exponent) {
            if *lm == f64::NEG_INFINITY {
                continue;
            }
            let e = p * (lm - ln_lambda);
            if e > LOG_OVERFLOW {
                return f64::INFINITY;
            }
            terms.push((lw + e).exp());
        }
        neumaier_sum(terms)
    }

    /// `ln Σ w |v/λ|^p`, finite for any finite input; `-∞` when all terms vanish.
    pub(crate) fn log_modular_at(&self, ln_lambda: f64) -> f64 {
        let logs: Vec<f64> = self
            .log_weight
            .iter()
            .zip(&self.log_mag)
            .zip(&self.exponent)
            .filter(|((_, lm), _)| **lm != f64::NEG_INFINITY)
            .map(|((lw, lm), p)| lw + p * (lm - ln_lambda))
            .collect();
        if logs.is_empty() {
            return f64::NEG_INFINITY;
        }
        log_sum_exp(&logs)
    }

    /// `inf{λ > 0 : Σ w |v/λ|^p ≤ 1}` by bracketing and bisection.
    pub(crate) fn luxemburg(&self) -> f64 {
        let top = self.max_log_mag();
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        let feasible = |lambda: f64| self.modular_at(lambda.ln()) <= 1.0;
        let start = top.exp();
        let (mut lo, mut hi) = if feasible(start) {
            let mut hi = start;
            let mut lo = 0.5 * start;
            while feasible(lo) {
                hi = lo;
                lo *= 0.5;
            }
            (lo, hi)
        } else {
            let mut lo = start;
            let mut hi = 2.0 * start;
            while !feasible(hi) {
                lo = hi;
                hi *= 2.0;
            }
            (lo, hi)
        };
        while hi - lo > LUXEMBURG_RTOL * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn scalar_terms(u: &GridFunction, p: &ExponentField) -> Result<PowerTerms> {
    ensure_same_grid(u.grid(), p.grid(), "function and exponent live on different grids")?;
    if !u.is_scalar() {
        return Err(Error::Precondition(format!(
            "expected a scalar function, got {} components",
            u.components()
        )));
    }
    Ok(PowerTerms::from_parts(u.grid().weights(), u.values(), p.values()))
}

/// `ρ_p(u) = Σ w_i |u_i|^{p_i}`, `+∞` on overflow.
pub fn modular(u: &GridFunction, p: &ExponentField) -> Result<f64> {
    Ok(scalar_terms(u, p)?.modular_at(0.0))
}

/// `ρ_p(u/λ)` without forming `u/λ`.
pub fn modular_scaled(u: &GridFunction, p: &ExponentField, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Precondition(format!("scale λ = {lambda} must be positive")));
    }
    Ok(scalar_terms(u, p)?.modular_at(lambda.ln()))
}

/// `ln ρ_p(u)`; never overflows.
pub fn log_modular(u: &GridFunction, p: &ExponentField) -> Result<f64> {
    Ok(scalar_terms(u, p)?.log_modular_at(0.0))
}

/// The Luxemburg norm `‖u‖_{p(·)}`.
pub fn luxemburg_norm(u: &GridFunction, p: &ExponentField) -> Result<f64> {
    Ok(scalar_terms(u, p)?.luxemburg())
}

/// Classical weighted `(Σ w_i |u_i|^q)^{1/q}` for a constant `q ≥ 1`,
/// accumulated in the log domain.
pub fn lq_norm(u: &GridFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::Precondition(format!("q = {q} must be in [1, ∞)")));
    }
    let mags = u.magnitudes();
    let logs: Vec<f64> = u
        .grid()
        .weights()
        .iter()
        .zip(&mags)
        .filter(|(_, m)| **m > 0.0)
        .map(|(w, m)| w.ln() + q * m.ln())
        .collect();
    if logs.is_empty() {
        return Ok(0.0);
    }
    Ok((log_sum_exp(&logs) / q).exp())
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + neumaier_sum(values.iter().map(|v| (v - max).exp())).ln()
}

fn sobolev_terms(u: &GridFunction, du: &GridFunction, p: &ExponentField) -> Result<PowerTerms> {
    ensure_same_grid(u.grid(), p.grid(), "function and exponent live on different grids")?;
    ensure_same_grid(du.grid(), p.grid(), "gradient and exponent live on different grids")?;
    if du.components() != u.components() * u.grid().dimension() {
        return Err(Error::Precondition(format!(
            "gradient has {} components, expected {}",
            du.components(),
            u.components() * u.grid().dimension()
        )));
    }
    let w = u.grid().weights();
    let mut terms = PowerTerms::from_parts(w, &u.magnitudes(), p.values());
    for ((wi, m), pi) in w.iter().zip(du.magnitudes()).zip(p.values()) {
        terms.push(*wi, m, *pi);
    }
    Ok(terms)
}

/// First-order Sobolev semimodular `ρ_p(|u|) + ρ_p(|Du|)`.
pub fn sobolev_modular(u: &GridFunction, du: &GridFunction, p: &ExponentField) -> Result<f64> {
    Ok(sobolev_terms(u, du, p)?.modular_at(0.0))
}

/// Norm induced by [`sobolev_modular`] through the same bisection.
pub fn sobolev_norm(u: &GridFunction, du: &GridFunction, p: &ExponentField) -> Result<f64> {
    Ok(sobolev_terms(u, du, p)?.luxemburg())
}
