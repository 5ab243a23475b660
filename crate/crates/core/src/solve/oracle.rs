//! Closed-form minima and minimizers of the 1-D weighted Lipschitz
//! extension problem and its power-law approximations.

use crate::discretize::{BoundaryTrace, MeshSpec};
use crate::energy::{Coefficient, DensityFamily, DensitySpec};
use crate::error::{Error, Result};

fn check_positive(a: &Coefficient, x0: f64, x1: f64) -> Result<()> {
    let ok = match *a {
        Coefficient::Constant(c) => c > 0.0,
        Coefficient::InverseLinear { offset, slope } => {
            offset + slope * x0 > 0.0 && offset + slope * x1 > 0.0
        }
        Coefficient::Piecewise { left, right, .. } => left > 0.0 && right > 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(format!("coefficient {a:?} is not positive on [{x0}, {x1}]")))
    }
}

/// `∫_{x0}^{x} a(t)^{-r} dt` in closed form.
pub fn inverse_power_integral(a: &Coefficient, x0: f64, x: f64, r: f64) -> f64 {
    match *a {
        Coefficient::Constant(c) => c.powf(-r) * (x - x0),
        Coefficient::InverseLinear { offset, slope } => {
            if slope == 0.0 {
                offset.powf(r) * (x - x0)
            } else {
                ((offset + slope * x).powf(r + 1.0) - (offset + slope * x0).powf(r + 1.0))
                    / (slope * (r + 1.0))
            }
        }
        Coefficient::Piecewise {
            breakpoint,
            left,
            right,
        } => {
            let b = breakpoint.clamp(x0.min(x), x0.max(x));
            left.powf(-r) * (b - x0) + right.powf(-r) * (x - b)
        }
    }
}

/// `L* = |g1 - g0| / ∫ a⁻¹`, the least value of `sup a|u'|` over `u` with
/// `u(x0) = g0`, `u(x1) = g1`.
pub fn supremal_oracle_1d(a: &Coefficient, x0: f64, x1: f64, g0: f64, g1: f64) -> Result<f64> {
    check_positive(a, x0, x1)?;
    Ok((g1 - g0).abs() / inverse_power_integral(a, x0, x1, 1.0))
}

/// The minimizer `u*(x) = g0 + sign(g1 - g0)·L*·∫_{x0}^{x} a⁻¹` of the
/// supremal problem.
pub fn oracle_minimizer_1d(
    a: &Coefficient,
    x0: f64,
    x1: f64,
    g0: f64,
    g1: f64,
) -> Result<impl Fn(f64) -> f64> {
    let l = supremal_oracle_1d(a, x0, x1, g0, g1)?;
    let sign = (g1 - g0).signum();
    let a = *a;
    Ok(move |x: f64| g0 + sign * l * inverse_power_integral(&a, x0, x, 1.0))
}

/// Minimizer of `∫ (a|u'|)^q` under the boundary data: `u' ∝ a^{-q/(q-1)}`.
pub fn euler_lagrange_1d(
    a: &Coefficient,
    q: f64,
    x0: f64,
    x1: f64,
    g0: f64,
    g1: f64,
) -> Result<impl Fn(f64) -> f64> {
    check_positive(a, x0, x1)?;
    if !(q > 1.0) {
        return Err(Error::Precondition(format!("exponent {q} must exceed 1")));
    }
    let r = q / (q - 1.0);
    let total = inverse_power_integral(a, x0, x1, r);
    let a = *a;
    Ok(move |x: f64| g0 + (g1 - g0) * inverse_power_integral(&a, x0, x, r) / total)
}

/// The supremal minimum for a mesh: the 1-D oracle for weighted norms, or
/// `c·|∇g|` for affine data in 2-D under a constant weight `c`.
pub fn mesh_oracle(f: &DensitySpec, mesh: &MeshSpec) -> Result<f64> {
    let a = match &f.family {
        DensityFamily::WeightedNorm { a } => *a,
        other => {
            return Err(Error::Precondition(format!("no closed-form minimum for {other:?}")))
        }
    };
    let value = match (mesh.dimension(), mesh.boundary()) {
        (1, BoundaryTrace::Endpoints { g0, g1 }) => {
            let x0 = mesh.origin()[0];
            supremal_oracle_1d(&a, x0, x0 + mesh.extent()[0], g0, g1)?
        }
        (2, BoundaryTrace::Quadratic { gx, gy, gxx, gxy, gyy, .. })
            if gxx == 0.0 && gxy == 0.0 && gyy == 0.0 =>
        {
            let Coefficient::Constant(c) = a else {
                return Err(Error::Precondition("2-D oracle needs a constant coefficient".into()));
            };
            if c <= 0.0 {
                return Err(Error::Precondition(format!("coefficient {c} is not positive")));
            }
            c * gx.hypot(gy)
        }
        _ => {
            return Err(Error::Precondition(
                "2-D oracle needs affine boundary data".into(),
            ))
        }
    };
    Ok(value.powf(f.outer_power))
}
