use crate::error::{Error, Result};
use crate::exponent_space::Grid;

/// A closed-form scalar coefficient `a(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coefficient {
    Constant(f64),
    /// `1 / (offset + slope·x₁)`.
    InverseLinear { offset: f64, slope: f64 },
    /// `left` for `x₁ < breakpoint`, `right` otherwise.
    Piecewise { breakpoint: f64, left: f64, right: f64 },
}

impl Coefficient {
    pub fn value(&self, x: &[f64]) -> f64 {
        match *self {
            Coefficient::Constant(c) => c,
            Coefficient::InverseLinear { offset, slope } => 1.0 / (offset + slope * x[0]),
            Coefficient::Piecewise {
                breakpoint,
                left,
                right,
            } => {
                if x[0] < breakpoint {
                    left
                } else {
                    right
                }
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            Coefficient::Constant(v) => Coefficient::Constant(c * v),
            Coefficient::InverseLinear { offset, slope } => Coefficient::InverseLinear {
                offset: offset / c,
                slope: slope / c,
            },
            Coefficient::Piecewise {
                breakpoint,
                left,
                right,
            } => Coefficient::Piecewise {
                breakpoint,
                left: c * left,
                right: c * right,
            },
        }
    }

    /// Abscissae where the coefficient is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Coefficient::Piecewise { breakpoint, .. } => vec![breakpoint],
            _ => Vec::new(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Coefficient::Constant(_))
    }
}

/// Radial profiles `φ(r)` for custom densities `a(x)·φ(|ξ|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CustomRule {
    /// `min(r, cap) + slope·r`
    TruncatedNorm { cap: f64, slope: f64 },
    /// `|r - radius|`; sublevel sets are annuli.
    DistanceToSphere { radius: f64 },
    /// `-r`; negative, for probing only.
    NegativeNorm,
    /// `r^exponent`
    PowerNorm { exponent: f64 },
}

impl CustomRule {
    /// `(φ, φ', φ'')` at `r > 0`.
    fn profile(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            CustomRule::TruncatedNorm { cap, slope } => {
                if r < cap {
                    (r + slope * r, 1.0 + slope, 0.0)
                } else {
                    (cap + slope * r, slope, 0.0)
                }
            }
            CustomRule::DistanceToSphere { radius } => {
                ((r - radius).abs(), if r >= radius { 1.0 } else { -1.0 }, 0.0)
            }
            CustomRule::NegativeNorm => (-r, -1.0, 0.0),
            CustomRule::PowerNorm { exponent: k } => {
                (r.powf(k), k * r.powf(k - 1.0), k * (k - 1.0) * r.powf(k - 2.0))
            }
        }
    }

    /// Whether `a·φ(|ξ|)` is 1-homogeneous in `ξ`.
    fn homogeneous(&self) -> bool {
        matches!(self, CustomRule::PowerNorm { exponent } if *exponent == 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityFamily {
    /// `a(x)|ξ|`
    WeightedNorm { a: Coefficient },
    /// `a(x)|ξ - b(x)|`
    ShiftedNorm { a: Coefficient, shift: Vec<Coefficient> },
    /// `max_j a_j(x)|ξ_j|`
    Anisotropic { weights: Vec<Coefficient> },
    /// `a(x)·φ(|ξ|)` for a named profile `φ`.
    Custom { a: Coefficient, rule: CustomRule },
}

/// An integrand `f(x, u, ξ)` with growth constants `f ≥ α|ξ|^γ` and a
/// declared level-convexity flag. `outer_power` raises the whole density
/// to a positive power (`g = f^{1/γ}` is `outer_power = 1/γ`).
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    pub family: DensityFamily,
    pub alpha: f64,
    pub gamma: f64,
    pub level_convex: bool,
    pub outer_power: f64,
}

/// Value, gradient and Hessian (row-major) in `ξ` of a smoothed density.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothDensity {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl DensitySpec {
    pub fn weighted_norm(a: Coefficient) -> Self {
        Self::built_in(DensityFamily::WeightedNorm { a })
    }

    pub fn shifted_norm(a: Coefficient, shift: Vec<Coefficient>) -> Self {
        Self::built_in(DensityFamily::ShiftedNorm { a, shift })
    }

    pub fn anisotropic(weights: Vec<Coefficient>) -> Self {
        Self::built_in(DensityFamily::Anisotropic { weights })
    }

    pub fn custom(a: Coefficient, rule: CustomRule, level_convex: bool) -> Self {
        Self {
            family: DensityFamily::Custom { a, rule },
            alpha: 1.0,
            gamma: 1.0,
            level_convex,
            outer_power: 1.0,
        }
    }

    fn built_in(family: DensityFamily) -> Self {
        Self {
            family,
            alpha: 1.0,
            gamma: 1.0,
            level_convex: true,
            outer_power: 1.0,
        }
    }

    pub fn with_growth(mut self, alpha: f64, gamma: f64) -> Self {
        self.alpha = alpha;
        self.gamma = gamma;
        self
    }

    /// `c·f`; the growth constant scales with it.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = c.powf(1.0 / self.outer_power);
        let family = match &self.family {
            DensityFamily::WeightedNorm { a } => DensityFamily::WeightedNorm { a: a.scaled(inner) },
            DensityFamily::ShiftedNorm { a, shift } => DensityFamily::ShiftedNorm {
                a: a.scaled(inner),
                shift: shift.clone(),
            },
            DensityFamily::Anisotropic { weights } => DensityFamily::Anisotropic {
                weights: weights.iter().map(|w| w.scaled(inner)).collect(),
            },
            DensityFamily::Custom { a, rule } => DensityFamily::Custom {
                a: a.scaled(inner),
                rule: *rule,
            },
        };
        Self {
            family,
            alpha: self.alpha * c,
            ..self.clone()
        }
    }

    /// `f^k` for `k > 0`; `f ≥ α|ξ|^γ` becomes `f^k ≥ α^k |ξ|^{γk}`.
    pub fn powered(&self, k: f64) -> Self {
        Self {
            alpha: self.alpha.powf(k),
            gamma: self.gamma * k,
            outer_power: self.outer_power * k,
            ..self.clone()
        }
    }

    /// True when `f(x, u, tξ) = t f(x, u, ξ)` for `t ≥ 0`.
    pub fn is_one_homogeneous(&self) -> bool {
        self.outer_power == 1.0
            && match &self.family {
                DensityFamily::WeightedNorm { .. } | DensityFamily::Anisotropic { .. } => true,
                DensityFamily::ShiftedNorm { .. } => false,
                DensityFamily::Custom { rule, .. } => rule.homogeneous(),
            }
    }

    /// The scalar coefficient `a` of the radial families.
    pub fn coefficient(&self) -> Option<Coefficient> {
        match &self.family {
            DensityFamily::WeightedNorm { a }
            | DensityFamily::ShiftedNorm { a, .. }
            | DensityFamily::Custom { a, .. } => Some(*a),
            DensityFamily::Anisotropic { .. } => None,
        }
    }

    pub fn check_dimension(&self, xi_len: usize) -> Result<()> {
        let expected = match &self.family {
            DensityFamily::ShiftedNorm { shift, .. } => Some(shift.len()),
            DensityFamily::Anisotropic { weights } => Some(weights.len()),
            _ => None,
        };
        match expected {
            Some(k) if k != xi_len => Err(Error::Precondition(format!(
                "density expects gradients of length {k}, got {xi_len}"
            ))),
            _ => Ok(()),
        }
    }

    /// The raw value, possibly negative for probing rules.
    pub fn value(&self, x: &[f64], _u: &[f64], xi: &[f64]) -> f64 {
        let base = match &self.family {
            DensityFamily::WeightedNorm { a } => a.value(x) * norm(xi),
            DensityFamily::ShiftedNorm { a, shift } => {
                let d: f64 = xi
                    .iter()
                    .zip(shift)
                    .map(|(v, b)| (v - b.value(x)).powi(2))
                    .sum();
                a.value(x) * d.sqrt()
            }
            DensityFamily::Anisotropic { weights } => xi
                .iter()
                .zip(weights)
                .map(|(v, w)| w.value(x) * v.abs())
                .fold(0.0, f64::max),
            DensityFamily::Custom { a, rule } => {
                let r = norm(xi);
                let phi = if r == 0.0 {
                    match rule {
                        CustomRule::DistanceToSphere { radius } => radius.abs(),
                        _ => 0.0,
                    }
                } else {
                    rule.profile(r).0
                };
                a.value(x) * phi
            }
        };
        if self.outer_power == 1.0 {
            base
        } else {
            base.powf(self.outer_power)
        }
    }

    /// `f(x, u, ξ)` with the nonnegativity contract enforced.
    pub fn eval_density(&self, x: &[f64], u: &[f64], xi: &[f64]) -> Result<f64> {
        self.check_dimension(xi.len())?;
        let v = self.value(x, u, xi);
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Contract {
                label: "nonnegative density",
                detail: format!("f(x = {x:?}, ξ = {xi:?}) = {v}"),
            });
        }
        Ok(v)
    }

    pub fn eval_cell(&self, grid: &Grid, cell: usize, u: &[f64], xi: &[f64]) -> Result<f64> {
        self.eval_density(grid.center(cell), u, xi)
    }

    /// The density with `|·|` replaced by `sqrt(|·|² + ε²)` (and the
    /// anisotropic max by a log-sum-exp at temperature `ε`), together with
    /// its first two derivatives in `ξ`.
    pub fn smoothed(&self, x: &[f64], xi: &[f64], eps: f64) -> SmoothDensity {
        let k = xi.len();
        let mut out = match &self.family {
            DensityFamily::WeightedNorm { a } => {
                radial(a.value(x), xi, &vec![0.0; k], eps, |r| (r, 1.0, 0.0))
            }
            DensityFamily::ShiftedNorm { a, shift } => {
                let b: Vec<f64> = shift.iter().map(|s| s.value(x)).collect();
                radial(a.value(x), xi, &b, eps, |r| (r, 1.0, 0.0))
            }
            DensityFamily::Custom { a, rule } => {
                radial(a.value(x), xi, &vec![0.0; k], eps, |r| rule.profile(r))
            }
            DensityFamily::Anisotropic { weights } => {
                let a: Vec<f64> = weights.iter().map(|w| w.value(x)).collect();
                smooth_max(&a, xi, eps)
            }
        };
        if self.outer_power != 1.0 {
            let p = self.outer_power;
            let f = out.value;
            let d1 = p * f.powf(p - 1.0);
            let d2 = p * (p - 1.0) * f.powf(p - 2.0);
            for i in 0..k {
                for j in 0..k {
                    out.hess[i * k + j] = d1 * out.hess[i * k + j] + d2 * out.grad[i] * out.grad[j];
                }
            }
            for g in &mut out.grad {
                *g *= d1;
            }
            out.value = f.powf(p);
        }
        out
    }
}

fn norm(xi: &[f64]) -> f64 {
    xi.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn radial(
    a: f64,
    xi: &[f64],
    shift: &[f64],
    eps: f64,
    phi: impl Fn(f64) -> (f64, f64, f64),
) -> SmoothDensity {
    let k = xi.len();
    let v: Vec<f64> = xi.iter().zip(shift).map(|(x, b)| x - b).collect();
    let r = (v.iter().map(|t| t * t).sum::<f64>() + eps * eps).sqrt();
    let (f, d1, d2) = phi(r);
    let grad = v.iter().map(|t| a * d1 * t / r).collect();
    let mut hess = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let vv = v[i] * v[j] / (r * r);
            let id = if i == j { 1.0 } else { 0.0 };
            hess[i * k + j] = a * (d2 * vv + d1 * (id - vv) / r);
        }
    }
    SmoothDensity {
        value: a * f,
        grad,
        hess,
    }
}

fn smooth_max(a: &[f64], xi: &[f64], eps: f64) -> SmoothDensity {
    let k = xi.len();
    let r: Vec<f64> = xi.iter().map(|v| (v * v + eps * eps).sqrt()).collect();
    let s: Vec<f64> = a.iter().zip(&r).map(|(ai, ri)| ai * ri).collect();
    let g: Vec<f64> = (0..k).map(|j| a[j] * xi[j] / r[j]).collect();
    let curv: Vec<f64> = (0..k).map(|j| a[j] * eps * eps / r[j].powi(3)).collect();
    let tau = eps.max(f64::MIN_POSITIVE);
    let top = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = s.iter().map(|v| ((v - top) / tau).exp()).collect();
    let z: f64 = e.iter().sum();
    let pi: Vec<f64> = e.iter().map(|v| v / z).collect();
    let value = top + tau * z.ln();
    let grad: Vec<f64> = (0..k).map(|j| pi[j] * g[j]).collect();
    let mut hess = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let diag = if i == j {
                pi[i] * curv[i] + pi[i] * g[i] * g[i] / tau
            } else {
                0.0
            };
            hess[i * k + j] = diag - grad[i] * grad[j] / tau;
        }
    }
    SmoothDensity { value, grad, hess }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_norm_values() {
        let f = DensitySpec::weighted_norm(Coefficient::Constant(1.0));
        assert_eq!(f.eval_density(&[0.0, 0.0], &[0.0], &[3.0, 4.0]).unwrap(), 5.0);
        let f = DensitySpec::weighted_norm(Coefficient::InverseLinear {
            offset: 1.0,
            slope: 1.0,
        });
        assert_eq!(f.eval_density(&[1.0], &[0.0], &[2.0]).unwrap(), 1.0);
    }

    #[test]
    fn anisotropic_takes_weighted_max() {
        let f = DensitySpec::anisotropic(vec![Coefficient::Constant(1.0), Coefficient::Constant(2.0)]);
        assert_eq!(f.eval_density(&[0.0, 0.0], &[0.0], &[3.0, 1.0]).unwrap(), 3.0);
        assert!(f.eval_density(&[0.0, 0.0], &[0.0], &[3.0]).is_err());
    }

    #[test]
    fn negative_rule_breaks_contract() {
        let f = DensitySpec::custom(Coefficient::Constant(1.0), CustomRule::NegativeNorm, false);
        assert!(matches!(
            f.eval_density(&[0.0], &[0.0], &[1.0]),
            Err(Error::Contract { .. })
        ));
        assert_eq!(f.value(&[0.0], &[0.0], &[1.0]), -1.0);
    }

    #[test]
    fn scaling_and_powers() {
        let f = DensitySpec::weighted_norm(Coefficient::InverseLinear {
            offset: 1.0,
            slope: 1.0,
        })
        .with_growth(0.5, 1.0);
        let g = f.scaled(3.0);
        assert!((g.value(&[0.5], &[], &[2.0]) - 3.0 * f.value(&[0.5], &[], &[2.0])).abs() < 1e-14);
        assert_eq!(g.alpha, 1.5);
        let h = f.powered(2.0);
        assert!((h.value(&[0.5], &[], &[2.0]) - f.value(&[0.5], &[], &[2.0]).powi(2)).abs() < 1e-14);
        assert_eq!(h.gamma, 2.0);
    }

    fn finite_difference_check(f: &DensitySpec, x: &[f64], xi: &[f64], eps: f64) {
        let k = xi.len();
        let s = f.smoothed(x, xi, eps);
        let h = 1e-6;
        for i in 0..k {
            let mut plus = xi.to_vec();
            let mut minus = xi.to_vec();
            plus[i] += h;
            minus[i] -= h;
            let sp = f.smoothed(x, &plus, eps);
            let sm = f.smoothed(x, &minus, eps);
            let fd = (sp.value - sm.value) / (2.0 * h);
            assert!((fd - s.grad[i]).abs() < 1e-6 * (1.0 + fd.abs()), "grad {i}: {fd} vs {}", s.grad[i]);
            for j in 0..k {
                let fd = (sp.grad[j] - sm.grad[j]) / (2.0 * h);
                assert!(
                    (fd - s.hess[i * k + j]).abs() < 1e-5 * (1.0 + fd.abs()),
                    "hess {i}{j}: {fd} vs {}",
                    s.hess[i * k + j]
                );
            }
        }
    }

    #[test]
    fn smoothed_derivatives_match_finite_differences() {
        let x = [0.3, 0.6];
        let xi = [0.7, -0.4];
        for f in [
            DensitySpec::weighted_norm(Coefficient::Constant(1.5)),
            DensitySpec::shifted_norm(
                Coefficient::Constant(1.0),
                vec![Coefficient::Constant(0.2), Coefficient::Constant(-0.1)],
            ),
            DensitySpec::anisotropic(vec![Coefficient::Constant(1.0), Coefficient::Constant(2.0)]),
            DensitySpec::custom(Coefficient::Constant(1.0), CustomRule::PowerNorm { exponent: 3.0 }, true),
            DensitySpec::weighted_norm(Coefficient::Constant(1.0)).powered(2.5),
        ] {
            finite_difference_check(&f, &x, &xi, 0.3);
        }
    }

    #[test]
    fn smoothing_vanishes_with_epsilon() {
        let f = DensitySpec::anisotropic(vec![Coefficient::Constant(1.0), Coefficient::Constant(2.0)]);
        let exact = f.value(&[0.0, 0.0], &[], &[3.0, 1.0]);
        let s = f.smoothed(&[0.0, 0.0], &[3.0, 1.0], 1e-8);
        assert!((s.value - exact).abs() < 1e-7);
    }
}
