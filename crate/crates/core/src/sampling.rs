//! Seeded generators for randomized property runs.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::exponent_space::{ExponentField, Grid, GridFunction};

pub type SuiteRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A 1-D grid with `16..=256` cells, irregular weights and a total measure
/// drawn log-uniformly from `[0.2, 5]`.
pub fn random_grid(rng: &mut impl Rng) -> Arc<Grid> {
    let cells = rng.random_range(16..=256);
    let raw: Vec<f64> = (0..cells).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let measure = (rng.random_range(0.2f64.ln()..5f64.ln())).exp();
    let weights: Vec<f64> = raw.iter().map(|w| w * measure / total).collect();
    let mut x = 0.0;
    let centers = weights
        .iter()
        .map(|w| {
            let c = x + 0.5 * w;
            x += w;
            c
        })
        .collect();
    Arc::new(Grid::new(1, centers, weights).expect("positive weights"))
}

/// Exponents uniform in `[lo, hi]`; with probability ½ a smooth profile
/// instead of independent samples.
pub fn random_exponent(rng: &mut impl Rng, grid: &Arc<Grid>, lo: f64, hi: f64) -> ExponentField {
    let values = if rng.random_bool(0.5) {
        (0..grid.len()).map(|_| rng.random_range(lo..=hi)).collect()
    } else {
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let freq = rng.random_range(0.5..4.0);
        let mid = 0.5 * (lo + hi);
        let amp = 0.5 * (hi - lo);
        (0..grid.len())
            .map(|i| mid + amp * (freq * grid.center(i)[0] + phase).sin())
            .collect()
    };
    ExponentField::new(grid.clone(), values).expect("exponents in range")
}

/// Signed values with magnitudes spread over several decades around a
/// random overall scale, with occasional exact zeros.
pub fn random_function(rng: &mut impl Rng, grid: &Arc<Grid>) -> GridFunction {
    let scale = rng.random_range(-2.0f64..2.0).exp();
    let values = (0..grid.len())
        .map(|_| {
            if rng.random_bool(0.05) {
                0.0
            } else {
                let mag = scale * rng.random_range(-3.0f64..1.0).exp();
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            }
        })
        .collect();
    GridFunction::scalar(grid.clone(), values).expect("finite values")
}

/// A random `(u, p)` pair with `p` in `(1, 12]`.
pub fn random_instance(rng: &mut impl Rng) -> (GridFunction, ExponentField) {
    let grid = random_grid(rng);
    let lo = rng.random_range(1.05..4.0);
    let hi = lo * rng.random_range(1.0..3.0);
    let p = random_exponent(rng, &grid, lo, hi);
    let u = random_function(rng, &grid);
    (u, p)
}
