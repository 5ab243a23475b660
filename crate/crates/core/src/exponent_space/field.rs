use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::Grid;
use crate::error::{Error, Result};

/// A variable exponent sampled at the cells of a grid.
///
/// Exponents down to 1 are accepted so that the conjugate and quotient
/// exponents appearing in Hölder-type bounds stay representable; the
/// approximating sequences used by the studies require `p⁻ > 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    grid: Arc<Grid>,
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "exponent field",
                format!("{} exponents for {} cells", values.len(), grid.len()),
            ));
        }
        if let Some(i) = values.iter().position(|p| !(p.is_finite() && *p >= 1.0)) {
            return Err(Error::invalid(
                "exponent field",
                format!("cell {i} has exponent {} (need 1 ≤ p < ∞)", values[i]),
            ));
        }
        let p_minus = values.iter().copied().fold(f64::INFINITY, f64::min);
        let p_plus = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            grid,
            values,
            p_minus,
            p_plus,
        })
    }

    pub fn constant(grid: Arc<Grid>, p: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![p; n])
    }

    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// `p(x) · factor`, e.g. `p/s` for the power identity.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.grid.clone(), self.values.iter().map(|p| p * factor).collect())
    }

    /// The dual exponent `p' = p/(p-1)`; requires `p⁻ > 1`.
    pub fn conjugate(&self) -> Result<Self> {
        if self.p_minus <= 1.0 {
            return Err(Error::Precondition("conjugate exponent needs p⁻ > 1".into()));
        }
        Self::new(self.grid.clone(), self.values.iter().map(|p| p / (p - 1.0)).collect())
    }
}

/// Shape `π(x)` of an exponent sequence `p_n(x) = n·π(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExponentProfile {
    /// `π ≡ 1`, so `p_n ≡ n`.
    Constant,
    /// `π(x) = mean + amplitude·sin(2π·frequency·x₁)`.
    Sine {
        mean: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl ExponentProfile {
    /// The default variable profile `2 + sin(2πx₁)`.
    pub const DEFAULT_SINE: ExponentProfile = ExponentProfile::Sine {
        mean: 2.0,
        amplitude: 1.0,
        frequency: 1.0,
    };

    pub fn value(&self, x: &[f64]) -> f64 {
        match *self {
            ExponentProfile::Constant => 1.0,
            ExponentProfile::Sine {
                mean,
                amplitude,
                frequency,
            } => mean + amplitude * (2.0 * PI * frequency * x[0]).sin(),
        }
    }
}

/// `n ↦ n·π(x)` on a fixed grid with the ratio bound `p_n⁺ ≤ β p_n⁻`.
#[derive(Debug, Clone)]
pub struct ExponentSequence {
    grid: Arc<Grid>,
    profile: ExponentProfile,
    beta: f64,
}

impl ExponentSequence {
    pub fn new(grid: Arc<Grid>, profile: ExponentProfile, beta: f64) -> Result<Self> {
        if !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::Contract {
                label: "pn2 exponent ratio",
                detail: format!("beta = {beta}, need beta > 1"),
            });
        }
        let profile_min = (0..grid.len())
            .map(|i| profile.value(grid.center(i)))
            .fold(f64::INFINITY, f64::min);
        if !(profile_min > 0.0) {
            return Err(Error::invalid(
                "exponent profile",
                format!("profile minimum {profile_min} is not positive"),
            ));
        }
        Ok(Self {
            grid,
            profile,
            beta,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn profile(&self) -> ExponentProfile {
        self.profile
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The `n`-th exponent; fails if it leaves `(1, ∞)` or breaks the ratio bound.
    pub fn term(&self, n: u32) -> Result<ExponentField> {
        let nf = f64::from(n);
        let field = ExponentField::from_fn(self.grid.clone(), |x| nf * self.profile.value(x))
            .map_err(|e| Error::Contract {
                label: "pn1 exponent growth",
                detail: format!("term n = {n}: {e}"),
            })?;
        if field.p_minus() <= 1.0 {
            return Err(Error::Contract {
                label: "pn1 exponent growth",
                detail: format!("term n = {n} has p⁻ = {} ≤ 1", field.p_minus()),
            });
        }
        if field.p_plus() > self.beta * field.p_minus() {
            return Err(Error::Contract {
                label: "pn2 exponent ratio",
                detail: format!(
                    "term n = {n}: p⁺ = {} > beta·p⁻ = {}",
                    field.p_plus(),
                    self.beta * field.p_minus()
                ),
            });
        }
        Ok(field)
    }

    /// Checks every term of `schedule` and that `p_n⁻` grows along it.
    pub fn check_schedule(&self, schedule: &[u32]) -> Result<Vec<ExponentField>> {
        if schedule.is_empty() {
            return Err(Error::Contract {
                label: "pn1 exponent growth",
                detail: "empty schedule".into(),
            });
        }
        if let Some(w) = schedule.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Contract {
                label: "pn1 exponent growth",
                detail: format!("schedule not increasing at {} → {}", w[0], w[1]),
            });
        }
        let terms = schedule
            .iter()
            .map(|&n| self.term(n))
            .collect::<Result<Vec<_>>>()?;
        if let Some(w) = terms.windows(2).find(|w| w[1].p_minus() < w[0].p_minus()) {
            return Err(Error::Contract {
                label: "pn1 exponent growth",
                detail: format!("p⁻ decreases from {} to {}", w[0].p_minus(), w[1].p_minus()),
            });
        }
        Ok(terms)
    }
}
