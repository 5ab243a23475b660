//! Randomized checks of the level-convexity and growth hypotheses.

use rand::Rng;

use super::density::DensitySpec;
use crate::exponent_space::Grid;
use crate::report::RelationReport;
use crate::sampling;

const PROBE_TOL: f64 = 1e-12;

fn random_vector(rng: &mut impl Rng, k: usize, radius: f64) -> Vec<f64> {
    (0..k).map(|_| rng.random_range(-radius..radius)).collect()
}

/// Tests `f(x, u, θξ₁ + (1-θ)ξ₂) ≤ max(f(x, u, ξ₁), f(x, u, ξ₂))` on random
/// draws and reports each violation with its witness.
pub fn level_convexity_probe(
    f: &DensitySpec,
    grid: &Grid,
    components: usize,
    trials: usize,
    seed: u64,
) -> RelationReport {
    let mut rng = sampling::rng(seed);
    let k = grid.dimension() * components;
    let mut report = RelationReport::new();
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let cell = rng.random_range(0..grid.len());
        let x = grid.center(cell);
        let u = random_vector(&mut rng, components, 2.0);
        let xi1 = random_vector(&mut rng, k, 3.0);
        let xi2 = if rng.random_bool(0.25) {
            let t = rng.random_range(0.2..2.0);
            xi1.iter().map(|v| -t * v).collect()
        } else {
            random_vector(&mut rng, k, 3.0)
        };
        let theta: f64 = rng.random();
        let mid: Vec<f64> = xi1
            .iter()
            .zip(&xi2)
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect();
        let top = f.value(x, &u, &xi1).max(f.value(x, &u, &xi2));
        let at_mid = f.value(x, &u, &mid);
        let slack = top - at_mid;
        worst = worst.min(slack);
        if slack < -PROBE_TOL * (1.0 + top.abs()) {
            report.push_with(
                "level_convexity",
                false,
                slack,
                format!("cell {cell}: ξ₁ = {xi1:?}, ξ₂ = {xi2:?}, θ = {theta:.4}, f(mid) = {at_mid:.6} > {top:.6}"),
            );
        }
    }
    if report.relations.is_empty() {
        report.push_with(
            "level_convexity",
            true,
            worst,
            format!("{trials} trials, no violation"),
        );
    }
    report
}

/// Tests `f(x, u, ξ) ≥ α|ξ|^γ` on a sweep over every cell plus random
/// draws; the reported slack is the smallest `f / (α|ξ|^γ) - 1` and
/// failures carry that witness.
pub fn growth_check(
    f: &DensitySpec,
    grid: &Grid,
    components: usize,
    trials: usize,
    seed: u64,
) -> RelationReport {
    let mut rng = sampling::rng(seed);
    let k = grid.dimension() * components;
    let mut worst: Option<(f64, String)> = None;
    let mut violations = 0usize;
    let mut check = |cell: usize, u: &[f64], xi: &[f64]| {
        let x = grid.center(cell);
        let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bound = f.alpha * r.powf(f.gamma);
        let value = f.value(x, u, xi);
        if bound == 0.0 {
            return;
        }
        let slack = value / bound - 1.0;
        if slack < -PROBE_TOL {
            violations += 1;
        }
        if worst.as_ref().is_none_or(|(s, _)| slack < *s) {
            worst = Some((
                slack,
                format!("cell {cell} at x = {x:?}, ξ = {xi:?}: f = {value:.6}, α|ξ|^γ = {bound:.6}"),
            ));
        }
    };
    let unit: Vec<f64> = (0..k).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
    let zero_u = vec![0.0; components];
    for cell in 0..grid.len() {
        check(cell, &zero_u, &unit);
    }
    for _ in 0..trials {
        let cell = rng.random_range(0..grid.len());
        let u = random_vector(&mut rng, components, 2.0);
        let xi = random_vector(&mut rng, k, 3.0);
        check(cell, &u, &xi);
    }
    let (slack, witness) = worst.unwrap_or((f64::INFINITY, String::new()));
    let mut report = RelationReport::new();
    report.push_with(
        "growth",
        violations == 0,
        slack,
        if violations == 0 {
            format!("tightest: {witness}")
        } else {
            format!("{violations} violations; worst: {witness}")
        },
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{Coefficient, CustomRule};

    fn grid() -> Grid {
        Grid::uniform_1d(0.0, 1.0, 100).unwrap()
    }

    #[test]
    fn norms_are_level_convex() {
        let f = DensitySpec::weighted_norm(Coefficient::Constant(1.0));
        let r = level_convexity_probe(&f, &grid(), 1, 10_000, 1);
        assert!(r.all_hold(), "{r}");
    }

    #[test]
    fn truncated_norm_is_level_convex() {
        let f = DensitySpec::custom(
            Coefficient::Constant(1.0),
            CustomRule::TruncatedNorm {
                cap: 1.0,
                slope: 1e-6,
            },
            true,
        );
        let r = level_convexity_probe(&f, &grid(), 1, 10_000, 2);
        assert!(r.all_hold(), "{r}");
    }

    #[test]
    fn annulus_density_is_caught() {
        // Witness by hand: ξ₁ = 1.5, ξ₂ = -1.5, θ = ½ gives f(0) = 1 > 0.5.
        let f = DensitySpec::custom(
            Coefficient::Constant(1.0),
            CustomRule::DistanceToSphere { radius: 1.0 },
            false,
        );
        assert_eq!(f.value(&[0.5], &[], &[0.0]), 1.0);
        assert_eq!(f.value(&[0.5], &[], &[1.5]), 0.5);
        let r = level_convexity_probe(&f, &grid(), 1, 10_000, 3);
        assert!(r.failure_count() > 0);
    }

    #[test]
    fn growth_examples() {
        let g = grid();
        let f = DensitySpec::weighted_norm(Coefficient::Constant(0.7)).with_growth(0.7, 1.0);
        assert!(growth_check(&f, &g, 1, 1000, 4).all_hold());

        let a = Coefficient::InverseLinear {
            offset: 1.0,
            slope: 1.0,
        };
        let f = DensitySpec::weighted_norm(a).with_growth(0.5, 1.0);
        assert!(growth_check(&f, &g, 1, 1000, 5).all_hold());

        let f = DensitySpec::weighted_norm(a).with_growth(0.9, 1.0);
        let r = growth_check(&f, &g, 1, 1000, 6);
        assert!(!r.all_hold());
        // The worst witness is the last cell, next to x = 1.
        assert!(r.relations[0].detail.contains("cell 99"), "{r}");
    }
}
