//! The seeded property suite behind `suplab verify`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use suplab::energy::{growth_check, level_convexity_probe, Coefficient, CustomRule, DensitySpec};
use suplab::exponent_space::{
    embedding_bound_check, holder_check, power_identity_check, verify_norm_modular_relations,
    ExponentField, Grid, GridFunction,
};
use suplab::measure_tools::{default_q_schedule, jensen_check, young_q_limit, Atom, DiscreteYoungMeasure};
use suplab::report::RelationReport;
use suplab::sampling;

use crate::config::{RunConfig, CONTRACT_SEED};

/// What a relation is expected to do on its instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expect {
    Hold,
    Violation,
}

impl Expect {
    pub fn as_str(self) -> &'static str {
        match self {
            Expect::Hold => "hold",
            Expect::Violation => "violation",
        }
    }
}

/// Aggregate of one relation over a suite's instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub suite: String,
    pub relation: String,
    pub instances: usize,
    pub failures: usize,
    pub min_slack: f64,
    pub expect: Expect,
    /// First recorded failure, or the last detail seen.
    pub detail: String,
}

impl SuiteRow {
    pub fn pass(&self) -> bool {
        match self.expect {
            Expect::Hold => self.failures == 0,
            Expect::Violation => self.failures > 0,
        }
    }
}

#[derive(Default)]
struct Tally {
    rows: BTreeMap<String, SuiteRow>,
}

impl Tally {
    fn add(&mut self, suite: &str, report: &RelationReport, expect: Expect) {
        for r in &report.relations {
            let row = self.rows.entry(r.name.clone()).or_insert_with(|| SuiteRow {
                suite: suite.into(),
                relation: r.name.clone(),
                instances: 0,
                failures: 0,
                min_slack: f64::INFINITY,
                expect,
                detail: String::new(),
            });
            row.instances += 1;
            row.min_slack = row.min_slack.min(r.slack);
            if !r.holds {
                if row.failures == 0 {
                    row.detail = r.detail.clone();
                }
                row.failures += 1;
            } else if row.failures == 0 {
                row.detail = r.detail.clone();
            }
        }
    }

    fn into_rows(self) -> Vec<SuiteRow> {
        self.rows.into_values().collect()
    }
}

/// Independent stream per suite so that resizing one leaves the others
/// untouched.
fn suite_rng(seed: u64, salt: u64) -> sampling::SuiteRng {
    sampling::rng(seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn norm_modular_suite(seed: u64, instances: usize) -> suplab::Result<Vec<SuiteRow>> {
    let mut rng = suite_rng(seed, 1);
    let mut tally = Tally::default();
    for _ in 0..instances {
        let (u, p) = sampling::random_instance(&mut rng);
        tally.add("norm_modular", &verify_norm_modular_relations(&u, &p)?, Expect::Hold);
    }
    Ok(tally.into_rows())
}

/// Every fourth instance uses `s ≡ 1` with the conjugate `q = p'`.
pub fn holder_suite(seed: u64, instances: usize) -> suplab::Result<Vec<SuiteRow>> {
    let mut rng = suite_rng(seed, 2);
    let mut tally = Tally::default();
    for i in 0..instances {
        let grid = sampling::random_grid(&mut rng);
        let (p, q) = if i % 4 == 0 {
            let p = sampling::random_exponent(&mut rng, &grid, 1.1, 8.0);
            let q = p.conjugate()?;
            (p, q)
        } else {
            (
                sampling::random_exponent(&mut rng, &grid, 2.0, 9.0),
                sampling::random_exponent(&mut rng, &grid, 2.0, 9.0),
            )
        };
        let s_values = p
            .values()
            .iter()
            .zip(q.values())
            .map(|(a, b)| if i % 4 == 0 { 1.0 } else { 1.0 / (1.0 / a + 1.0 / b) })
            .collect();
        let s = ExponentField::new(grid.clone(), s_values)?;
        let f = sampling::random_function(&mut rng, &grid);
        let g = sampling::random_function(&mut rng, &grid);
        tally.add("holder", &holder_check(&f, &g, &p, &q, &s)?, Expect::Hold);
    }
    Ok(tally.into_rows())
}

pub fn power_identity_suite(seed: u64, instances: usize) -> suplab::Result<Vec<SuiteRow>> {
    let mut rng = suite_rng(seed, 3);
    let mut tally = Tally::default();
    for _ in 0..instances {
        let (u, p) = sampling::random_instance(&mut rng);
        let s = 1.0 + (p.p_minus() - 1.0) * rng.random_range(0.02..0.98);
        tally.add("power_identity", &power_identity_check(&u, &p, s)?, Expect::Hold);
    }
    Ok(tally.into_rows())
}

/// Every fourth instance sits on the edge `q = p⁻`.
pub fn embedding_suite(seed: u64, instances: usize) -> suplab::Result<Vec<SuiteRow>> {
    let mut rng = suite_rng(seed, 4);
    let mut tally = Tally::default();
    for i in 0..instances {
        let (u, p) = sampling::random_instance(&mut rng);
        let q = if i % 4 == 0 {
            p.p_minus()
        } else {
            rng.random_range(1.0..=p.p_minus())
        };
        // One ulp of headroom so that rounding in the ratio cannot break p⁺ ≤ βp⁻.
        let beta = (p.p_plus() / p.p_minus() * (1.0 + f64::EPSILON)).max(1.0 + 1e-6);
        tally.add("embedding", &embedding_bound_check(&u, &p, q, beta)?, Expect::Hold);
    }
    Ok(tally.into_rows())
}

/// The built-in families used by the Jensen and level-convexity suites,
/// with whether each is level convex.
pub fn builtin_families() -> Vec<(&'static str, DensitySpec, Expect)> {
    let one = Coefficient::Constant(1.0);
    vec![
        (
            "weighted_norm",
            DensitySpec::weighted_norm(Coefficient::InverseLinear { offset: 1.0, slope: 1.0 }),
            Expect::Hold,
        ),
        (
            "shifted_norm",
            DensitySpec::shifted_norm(one, vec![Coefficient::Constant(0.5), Coefficient::Constant(-0.25)]),
            Expect::Hold,
        ),
        (
            "anisotropic",
            DensitySpec::anisotropic(vec![one, Coefficient::Constant(2.0)]),
            Expect::Hold,
        ),
        (
            "truncated_norm",
            DensitySpec::custom(one, CustomRule::TruncatedNorm { cap: 1.0, slope: 1e-6 }, true),
            Expect::Hold,
        ),
        (
            "power_norm",
            DensitySpec::custom(one, CustomRule::PowerNorm { exponent: 2.0 }, true),
            Expect::Hold,
        ),
        (
            "distance_to_sphere",
            DensitySpec::custom(one, CustomRule::DistanceToSphere { radius: 1.0 }, false),
            Expect::Violation,
        ),
    ]
}

fn square_grid() -> Arc<Grid> {
    Arc::new(Grid::uniform_2d([0.0, 0.0], [1.0, 1.0], [8, 8]).expect("valid square"))
}

fn random_atoms(rng: &mut impl Rng, k: usize) -> Vec<Atom> {
    let count = rng.random_range(2..=5);
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    // Log-uniform scale so that small and large atom clouds both appear.
    let scale = rng.random_range(0.2f64.ln()..3f64.ln()).exp();
    raw.iter()
        .map(|w| Atom::new((0..k).map(|_| rng.random_range(-scale..scale)).collect(), w / total))
        .collect()
}

fn jensen_family(
    rng: &mut impl Rng,
    name: &str,
    f: &DensitySpec,
    grid: &Grid,
    trials: usize,
    expect: Expect,
) -> suplab::Result<SuiteRow> {
    let mut tally = Tally::default();
    let k = grid.dimension();
    for _ in 0..trials {
        let cell = rng.random_range(0..grid.len());
        let atoms = random_atoms(rng, k);
        tally.add("jensen", &jensen_check(f, grid.center(cell), &[0.0], &atoms)?, expect);
    }
    let mut row = tally.into_rows().pop().expect("at least one trial");
    row.relation = format!("jensen/{name}");
    Ok(row)
}

pub fn jensen_suite(seed: u64, trials: usize, config_density: Option<&DensitySpec>, config_grid: &Grid) -> suplab::Result<Vec<SuiteRow>> {
    let mut rng = suite_rng(seed, 5);
    let grid = square_grid();
    let mut rows = Vec::new();
    for (name, f, expect) in builtin_families() {
        rows.push(jensen_family(&mut rng, name, &f, &grid, trials, expect)?);
    }
    if let Some(f) = config_density {
        rows.push(jensen_family(&mut rng, "config", f, config_grid, trials, Expect::Hold)?);
    }
    Ok(rows)
}

fn single(suite: &str, relation: String, report: &RelationReport, expect: Expect, instances: usize) -> SuiteRow {
    let failures = report.failure_count();
    let detail = report
        .failures()
        .next()
        .or(report.relations.first())
        .map(|r| r.detail.clone())
        .unwrap_or_default();
    SuiteRow {
        suite: suite.into(),
        relation,
        instances,
        failures,
        min_slack: report.min_slack(),
        expect,
        detail,
    }
}

pub fn level_convexity_suite(seed: u64, trials: usize) -> Vec<SuiteRow> {
    let grid = square_grid();
    builtin_families()
        .into_iter()
        .enumerate()
        .map(|(i, (name, f, expect))| {
            let r = level_convexity_probe(&f, &grid, 1, trials, seed ^ (i as u64 + 1));
            single("level_convexity", format!("level_convexity/{name}"), &r, expect, trials)
        })
        .collect()
}

/// The configured density must satisfy its growth bound; the `1/(1+x)`
/// weight holds with `α = ½` and fails with `α = 0.9`.
pub fn growth_suite(cfg: &RunConfig) -> suplab::Result<Vec<SuiteRow>> {
    let trials = cfg.contract_trials;
    let interval = Grid::uniform_1d(0.0, 1.0, 100)?;
    let a = Coefficient::InverseLinear { offset: 1.0, slope: 1.0 };
    let cases = [
        ("config", cfg.study.density.clone(), cfg.study.mesh.grid().as_ref().clone(), Expect::Hold),
        ("inverse_linear_half", DensitySpec::weighted_norm(a).with_growth(0.5, 1.0), interval.clone(), Expect::Hold),
        ("inverse_linear_0.9", DensitySpec::weighted_norm(a).with_growth(0.9, 1.0), interval, Expect::Violation),
    ];
    Ok(cases
        .into_iter()
        .map(|(name, f, grid, expect)| {
            let r = growth_check(&f, &grid, 1, trials, CONTRACT_SEED);
            single("growth", format!("growth/{name}"), &r, expect, grid.len() + trials)
        })
        .collect())
}

/// One cell, atoms `1` and `3` of equal mass under `f = |ξ|`: the
/// `L^q(μ)` averages must reach within 2% of 3 by `q = 1024`.
pub fn young_suite() -> suplab::Result<Vec<SuiteRow>> {
    let grid = Arc::new(Grid::uniform_1d(0.0, 1.0, 1)?);
    let f = DensitySpec::weighted_norm(Coefficient::Constant(1.0));
    let mu = DiscreteYoungMeasure::new(
        grid.clone(),
        vec![vec![Atom::new(vec![1.0], 0.5), Atom::new(vec![3.0], 0.5)]],
    )?;
    let u = GridFunction::constant(grid, 0.0)?;
    let q = default_q_schedule();
    let table = young_q_limit(&f, &u, &mu, &q)?;
    let final_rel = table.final_error().unwrap_or(f64::INFINITY) / table.limit;
    let monotone = table.errors_nonincreasing(0.0);
    let mut report = RelationReport::new();
    report.push_with(
        "young_q_limit",
        final_rel < 0.02 && monotone,
        0.02 - final_rel,
        format!(
            "limit {}, q = {}: {:.6} (relative error {final_rel:.3e})",
            table.limit,
            q.last().expect("nonempty schedule"),
            table.rows.last().expect("nonempty schedule").value
        ),
    );
    Ok(vec![single("young", "young_q_limit".into(), &report, Expect::Hold, q.len())])
}

/// Runs every suite in a fixed order.
pub fn run_suite(cfg: &RunConfig, seed: u64) -> suplab::Result<Vec<SuiteRow>> {
    let s = cfg.suite;
    let grid = cfg.study.mesh.grid();
    let mut rows = norm_modular_suite(seed, s.norm_instances)?;
    rows.extend(holder_suite(seed, s.inequality_instances)?);
    rows.extend(power_identity_suite(seed, s.inequality_instances)?);
    rows.extend(embedding_suite(seed, s.inequality_instances)?);
    rows.extend(jensen_suite(seed, s.jensen_trials, Some(&cfg.study.density), grid)?);
    rows.extend(level_convexity_suite(seed, s.jensen_trials));
    rows.extend(growth_suite(cfg)?);
    rows.extend(young_suite()?);
    Ok(rows)
}
