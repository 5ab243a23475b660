//! The norm–modular relations, Hölder's inequality, the power identity
//! and the `L^q` embedding bound, each evaluated as a [`RelationReport`].

use super::field::ExponentField;
use super::grid::{ensure_same_grid, GridFunction};
use super::norms::{log_modular, lq_norm, luxemburg_norm};
use crate::error::{Error, Result};
use crate::report::RelationReport;

/// Log-domain tolerance per unit of exponent for the power sandwiches.
const LOG_RTOL: f64 = 1e-9;
/// Band around `ln ‖u‖ = 0` treated as "equal to one".
const UNIT_BAND: f64 = 1e-10;
/// Relative tolerance for the Hölder and embedding bounds.
const BOUND_RTOL: f64 = 1e-9;
/// Required agreement of the two sides of the power identity.
pub const POWER_IDENTITY_RTOL: f64 = 1e-8;

fn sign_with_band(x: f64, band: f64) -> i8 {
    if x > band {
        1
    } else if x < -band {
        -1
    } else {
        0
    }
}

/// `a ≤ b + tol` for log-domain values where `-∞` encodes zero.
fn log_le(a: f64, b: f64, tol: f64) -> (bool, f64) {
    if a == f64::NEG_INFINITY {
        return (true, if b == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY });
    }
    if b == f64::NEG_INFINITY {
        return (false, f64::NEG_INFINITY);
    }
    (a <= b + tol, b - a)
}

/// Evaluates `‖u‖` and `ρ(u)` and checks every relation between them that
/// applies to the instance. Failures are report entries, never errors.
pub fn verify_norm_modular_relations(
    u: &GridFunction,
    p: &ExponentField,
) -> Result<RelationReport> {
    let norm = luxemburg_norm(u, p)?;
    let ln_rho = log_modular(u, p)?;
    let ln_norm = norm.ln();
    let (pm, pp) = (p.p_minus(), p.p_plus());
    let tol = LOG_RTOL * (1.0 + pp);
    let mut report = RelationReport::new();

    // Position relative to the unit sphere; the modular band is wider
    // because ln ρ ≈ p·ln‖u‖ near the sphere.
    let sn = sign_with_band(ln_norm, UNIT_BAND);
    let sr = sign_with_band(ln_rho, 2.0 * UNIT_BAND * pp);
    let consistent = sn == sr || (sr == 0 && ln_norm.abs() <= 2.0 * UNIT_BAND * pp / pm + 1e-11);
    let margin = if consistent { ln_norm.abs() } else { -ln_norm.abs() };
    for name in [
        "norm_le_one_iff_modular_le_one",
        "norm_lt_one_iff_modular_lt_one",
        "norm_eq_one_iff_modular_eq_one",
        "norm_gt_one_iff_modular_gt_one",
    ] {
        report.push_with(
            name,
            consistent,
            margin,
            format!("‖u‖ = {norm:.15e}, ln ρ = {ln_rho:.6e}"),
        );
    }

    if sn <= 0 {
        let (ok, slack) = log_le(ln_rho, ln_norm, tol);
        report.push("modular_le_norm_in_unit_ball", ok, slack);
    }
    if sn > 0 {
        let (ok, slack) = log_le(ln_norm, ln_rho, tol);
        report.push("norm_le_modular_outside_unit_ball", ok, slack);
    }

    let (r_lo, r_hi) = {
        let a = ln_rho / pm;
        let b = ln_rho / pp;
        if ln_rho == f64::NEG_INFINITY {
            (f64::NEG_INFINITY, f64::NEG_INFINITY)
        } else {
            (a.min(b), a.max(b))
        }
    };
    let (ok_lo, s_lo) = log_le(r_lo, ln_norm, tol);
    let (ok_hi, s_hi) = log_le(ln_norm, r_hi, tol);
    report.push("root_sandwich", ok_lo && ok_hi, s_lo.min(s_hi));

    if sn > 0 {
        let (a, sa) = log_le(pm * ln_norm, ln_rho, tol);
        let (b, sb) = log_le(ln_rho, pp * ln_norm, tol);
        report.push("power_sandwich_outside_unit_ball", a && b, sa.min(sb));
    } else if sn < 0 && norm > 0.0 {
        let (a, sa) = log_le(pp * ln_norm, ln_rho, tol);
        let (b, sb) = log_le(ln_rho, pm * ln_norm, tol);
        report.push("power_sandwich_inside_unit_ball", a && b, sa.min(sb));
    }

    let one = GridFunction::constant(u.grid().clone(), 1.0)?;
    let ln_one = luxemburg_norm(&one, p)?.ln();
    let ln_m = u.grid().total_measure().ln();
    let bound = (ln_m / pm).max(ln_m / pp);
    let (ok, slack) = log_le(ln_one, bound, tol);
    report.push("unit_function_norm_bound", ok, slack);
    Ok(report)
}

fn le_rel(lhs: f64, rhs: f64) -> (bool, f64) {
    (lhs <= rhs * (1.0 + BOUND_RTOL) + f64::MIN_POSITIVE, rhs - lhs)
}

/// Hölder's inequality `‖fg‖_s ≤ ((s/p)⁺ + (s/q)⁺) ‖f‖_p ‖g‖_q` for
/// `1/s = 1/p + 1/q`, plus the integral form when `s ≡ 1`.
pub fn holder_check(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
    q: &ExponentField,
    s: &ExponentField,
) -> Result<RelationReport> {
    ensure_same_grid(p.grid(), q.grid(), "Hölder exponents p and q")?;
    ensure_same_grid(p.grid(), s.grid(), "Hölder exponents p and s")?;
    for i in 0..p.values().len() {
        let defect = 1.0 / s.at(i) - 1.0 / p.at(i) - 1.0 / q.at(i);
        if defect.abs() > 1e-10 {
            return Err(Error::invalid(
                "exponent triple",
                format!("1/s - 1/p - 1/q = {defect:e} at cell {i}"),
            ));
        }
    }
    let fg = f.product(g)?;
    let lhs = luxemburg_norm(&fg, s)?;
    let nf = luxemburg_norm(f, p)?;
    let ng = luxemburg_norm(g, q)?;
    let ratio_sup = |a: &ExponentField| {
        s.values()
            .iter()
            .zip(a.values())
            .map(|(si, ai)| si / ai)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let constant = ratio_sup(p) + ratio_sup(q);
    let mut report = RelationReport::new();
    let (ok, slack) = le_rel(lhs, constant * nf * ng);
    report.push_with(
        "holder",
        ok,
        slack,
        format!("‖fg‖ = {lhs:.6e}, K = {constant:.6}, ‖f‖ = {nf:.6e}, ‖g‖ = {ng:.6e}"),
    );
    if s.is_constant() && s.p_minus() == 1.0 {
        let integral: f64 = fg
            .values()
            .iter()
            .zip(fg.grid().weights())
            .map(|(v, w)| w * v.abs())
            .sum();
        let constant = 1.0 / p.p_minus() + 1.0 / q.p_minus();
        let (ok, slack) = le_rel(integral, constant * nf * ng);
        report.push("holder_integral", ok, slack);
    }
    Ok(report)
}

/// `‖|u|^s‖_{p/s}^{1/s} = ‖u‖_p` for `1 < s < p⁻`.
pub fn power_identity_check(
    u: &GridFunction,
    p: &ExponentField,
    s: f64,
) -> Result<RelationReport> {
    if !(s > 1.0 && s < p.p_minus()) {
        return Err(Error::Precondition(format!(
            "power identity needs 1 < s < p⁻, got s = {s}, p⁻ = {}",
            p.p_minus()
        )));
    }
    let powered = u.map(|v| v.abs().powf(s))?;
    let lhs = luxemburg_norm(&powered, &p.scaled(1.0 / s)?)?.powf(1.0 / s);
    let rhs = luxemburg_norm(u, p)?;
    let diff = (lhs - rhs).abs();
    let allowed = POWER_IDENTITY_RTOL * rhs.max(lhs);
    let mut report = RelationReport::new();
    report.push_with(
        "power_identity",
        diff <= allowed,
        allowed - diff,
        format!("lhs = {lhs:.15e}, rhs = {rhs:.15e}"),
    );
    Ok(report)
}

/// The constant in `‖u‖_q ≤ C ‖u‖_{p(·)}` for `1 ≤ q ≤ p⁻` and `p⁺ ≤ β p⁻`.
pub fn embedding_constant(measure: f64, p_minus: f64, p_plus: f64, beta: f64, q: f64) -> f64 {
    let m = measure;
    let a = m.powf(1.0 / q - 1.0 / p_minus);
    let b = m.powf(beta * (1.0 / q - 1.0 / p_plus));
    a.max(b) * (1.0 + (q / p_plus) * (beta - 1.0)).powf(1.0 / q)
}

/// Checks the classical `L^q` norm against the variable-exponent norm.
pub fn embedding_bound_check(
    u: &GridFunction,
    p: &ExponentField,
    q: f64,
    beta: f64,
) -> Result<RelationReport> {
    if !(q >= 1.0 && q <= p.p_minus()) {
        return Err(Error::Precondition(format!(
            "embedding needs 1 ≤ q ≤ p⁻, got q = {q}, p⁻ = {}",
            p.p_minus()
        )));
    }
    if !(beta > 1.0) || p.p_plus() > beta * p.p_minus() {
        return Err(Error::Precondition(format!(
            "embedding needs β > 1 and p⁺ ≤ β p⁻ (β = {beta}, p⁺ = {}, p⁻ = {})",
            p.p_plus(),
            p.p_minus()
        )));
    }
    let lhs = lq_norm(u, q)?;
    let c = embedding_constant(u.grid().total_measure(), p.p_minus(), p.p_plus(), beta, q);
    let rhs = c * luxemburg_norm(u, p)?;
    let (ok, slack) = le_rel(lhs, rhs);
    let mut report = RelationReport::new();
    report.push_with(
        "lq_embedding_bound",
        ok,
        slack,
        format!("‖u‖_q = {lhs:.6e}, C = {c:.6}, bound = {rhs:.6e}"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exponent_space::Grid;

    fn split_grid() -> (Arc<Grid>, ExponentField) {
        let g = Arc::new(Grid::uniform_1d(0.0, 1.0, 2).unwrap());
        let p = ExponentField::new(g.clone(), vec![2.0, 4.0]).unwrap();
        (g, p)
    }

    #[test]
    fn unit_function_on_unit_measure_is_the_equality_case() {
        let g = Arc::new(Grid::new(1, vec![0.1, 0.4, 0.8], vec![0.2, 0.5, 0.3]).unwrap());
        let p = ExponentField::new(g.clone(), vec![1.5, 7.0, 3.0]).unwrap();
        let u = GridFunction::constant(g, 1.0).unwrap();
        let report = verify_norm_modular_relations(&u, &p).unwrap();
        assert!(report.all_hold(), "{report}");
        assert!(report.get("norm_eq_one_iff_modular_eq_one").unwrap().holds);
    }

    #[test]
    fn piecewise_example_sits_in_root_sandwich() {
        let (g, p) = split_grid();
        let u = GridFunction::constant(g, 2.0).unwrap();
        let report = verify_norm_modular_relations(&u, &p).unwrap();
        assert!(report.all_hold(), "{report}");
        assert!(report.get("power_sandwich_outside_unit_ball").is_some());
        // 10^{1/4} ≤ 2 ≤ 10^{1/2}
        assert!(10f64.powf(0.25) <= 2.0 && 2.0 <= 10f64.sqrt());
    }

    #[test]
    fn zero_function_passes_everything() {
        let (g, p) = split_grid();
        let u = GridFunction::constant(g, 0.0).unwrap();
        let report = verify_norm_modular_relations(&u, &p).unwrap();
        assert!(report.all_hold(), "{report}");
    }

    #[test]
    fn holder_constants_saturate() {
        let g = Arc::new(Grid::uniform_1d(0.0, 1.0, 5).unwrap());
        let p = ExponentField::constant(g.clone(), 2.0).unwrap();
        let s = ExponentField::constant(g.clone(), 1.0).unwrap();
        let one = GridFunction::constant(g.clone(), 1.0).unwrap();
        let r = holder_check(&one, &one, &p, &p, &s).unwrap();
        assert!(r.all_hold(), "{r}");
        assert!(r.get("holder").unwrap().slack.abs() < 1e-10);

        let f = GridFunction::constant(g.clone(), 2.0).unwrap();
        let h = GridFunction::constant(g, 3.0).unwrap();
        let r = holder_check(&f, &h, &p, &p, &s).unwrap();
        assert!(r.all_hold(), "{r}");
        assert!(r.get("holder_integral").unwrap().slack.abs() < 1e-9);
    }

    #[test]
    fn holder_rejects_incompatible_exponents() {
        let g = Arc::new(Grid::uniform_1d(0.0, 1.0, 3).unwrap());
        let p = ExponentField::constant(g.clone(), 2.0).unwrap();
        let s = ExponentField::constant(g.clone(), 1.5).unwrap();
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert!(matches!(
            holder_check(&one, &one, &p, &p, &s),
            Err(Error::Invalid { .. })
        ));
    }

    #[test]
    fn power_identity_on_piecewise_example() {
        // ‖u²≡4‖ under exponents {1, 2} is 4 = 2².
        let (g, p) = split_grid();
        let u = GridFunction::constant(g.clone(), 2.0).unwrap();
        let four = GridFunction::constant(g, 4.0).unwrap();
        assert!((luxemburg_norm(&four, &p.scaled(0.5).unwrap()).unwrap() - 4.0).abs() < 1e-10);
        let r = power_identity_check(&u, &p, 2.0 - 1e-9).unwrap();
        assert!(r.all_hold(), "{r}");
    }

    #[test]
    fn power_identity_rejects_out_of_range_s() {
        let (g, p) = split_grid();
        let u = GridFunction::constant(g, 2.0).unwrap();
        assert!(matches!(power_identity_check(&u, &p, 2.0), Err(Error::Precondition(_))));
        assert!(matches!(power_identity_check(&u, &p, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn embedding_examples() {
        let (g, p) = split_grid();
        let u = GridFunction::constant(g.clone(), 2.0).unwrap();
        let r = embedding_bound_check(&u, &p, 2.0, 2.0).unwrap();
        assert!(r.all_hold(), "{r}");
        let c = embedding_constant(1.0, 2.0, 4.0, 2.0, 2.0);
        assert!((c * 2.0 - 2.449_489_742_783_178).abs() < 1e-12);
        assert!(matches!(
            embedding_bound_check(&u, &p, 2.5, 2.0),
            Err(Error::Precondition(_))
        ));
        let one = GridFunction::constant(g, 1.0).unwrap();
        assert!(embedding_bound_check(&one, &p, 1.0, 2.0).unwrap().all_hold());
    }
}
