//! Convergence studies along exponent sequences `p_n = n·π(x)`: minima of
//! the norm functionals, the 0/∞ dichotomy of the integral functionals,
//! minimizer convergence and the norm limit.

use rayon::prelude::*;

use crate::discretize::{gradient, interpolate_boundary, BoundaryTrace, DiscreteField, MeshSpec};
use crate::energy::{eval_cal_fn, eval_fn, eval_supremal, log_cal_fn, DensityFamily, DensitySpec};
use crate::error::{Error, Result};
use crate::exponent_space::{
    embedding_constant, luxemburg_norm, ExponentField, ExponentProfile, ExponentSequence,
    GridFunction,
};
use crate::report::{eventually_decreasing, nonincreasing};
use crate::solve::{
    euler_lagrange_1d, mesh_oracle, minimize_power, oracle_minimizer_1d, Functional,
    SolverSettings, SolveStatus, Stage,
};

/// `𝓕_n` values below this count as vanished.
pub const VANISHING_THRESHOLD: f64 = 1e-8;
/// `𝓕_n` values above this count as diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyKind {
    NormGamma,
    IntegralDichotomy,
    NormLimit,
    ConstantExponent,
}

impl StudyKind {
    pub const ALL: [StudyKind; 4] = [
        StudyKind::NormGamma,
        StudyKind::IntegralDichotomy,
        StudyKind::NormLimit,
        StudyKind::ConstantExponent,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StudyKind::NormGamma => "norm_gamma",
            StudyKind::IntegralDichotomy => "integral_dichotomy",
            StudyKind::NormLimit => "norm_limit",
            StudyKind::ConstantExponent => "constant_exponent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

/// The field a dichotomy or norm-limit study evaluates, before scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeField {
    /// `u(x) = x₁`
    Coordinate,
    /// The supremal minimizer under the mesh boundary data.
    Oracle,
    /// The interpolated boundary data.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub field: ProbeField,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub density: DensitySpec,
    pub mesh: MeshSpec,
    pub profile: ExponentProfile,
    pub beta: f64,
    pub schedule: Vec<u32>,
    pub solver: SolverSettings,
    /// Relative error required of the last row.
    pub threshold: f64,
    /// Sup-norm distance required of the last minimizer.
    pub distance_threshold: f64,
    pub probe: Probe,
    /// Half-width of the excluded band around `sup f = 1`.
    pub delta: f64,
}

impl StudyConfig {
    /// Defaults: profile `2 + sin(2πx₁)`, `β = 3`, `n ∈ {4, 8, 16, 32, 64}`.
    pub fn new(kind: StudyKind, density: DensitySpec, mesh: MeshSpec) -> Self {
        Self {
            kind,
            density,
            mesh,
            profile: ExponentProfile::DEFAULT_SINE,
            beta: 3.0,
            schedule: vec![4, 8, 16, 32, 64],
            solver: SolverSettings::default(),
            threshold: 0.02,
            distance_threshold: 0.01,
            probe: Probe {
                field: ProbeField::Coordinate,
                scale: 1.0,
            },
            delta: 0.1,
        }
    }

    pub fn sequence(&self) -> Result<ExponentSequence> {
        ExponentSequence::new(self.mesh.grid().clone(), self.profile, self.beta)
    }

    /// Checks the exponent sequence on the schedule and the solver settings.
    pub fn validate(&self) -> Result<Vec<ExponentField>> {
        self.solver.validate()?;
        self.density.check_dimension(self.mesh.dimension())?;
        if !(self.threshold > 0.0 && self.distance_threshold > 0.0) {
            return Err(Error::invalid("study", "thresholds must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("study", format!("delta {} outside (0, 1)", self.delta)));
        }
        if !self.probe.scale.is_finite() {
            return Err(Error::invalid("study", "probe scale must be finite"));
        }
        self.sequence()?.check_schedule(&self.schedule)
    }

    fn ensure_kind(&self, allowed: &[StudyKind]) -> Result<()> {
        if allowed.contains(&self.kind) {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "study kind {} cannot run here; expected one of {:?}",
                self.kind.as_str(),
                allowed.iter().map(StudyKind::as_str).collect::<Vec<_>>()
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: u32,
    pub p_minus: f64,
    pub p_plus: f64,
    pub value: f64,
    pub oracle: f64,
    /// Relative error to the oracle, or the minimizer distance in
    /// minimizer studies; `None` where no finite target exists.
    pub error: Option<f64>,
    /// Values for [`StudyResult::extra_columns`].
    pub extra: Vec<Option<f64>>,
    pub status: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub oracle: f64,
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<StudyRow>,
    pub verdicts: Vec<Verdict>,
    /// Solver stages per `n`, for studies that minimize.
    pub traces: Vec<(u32, Vec<Stage>)>,
}

impl StudyResult {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.error).collect()
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

fn verdict(name: &'static str, pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        name,
        pass,
        detail: detail.into(),
    }
}

fn fields_on(mesh: &MeshSpec, nodes: Vec<f64>) -> Result<(GridFunction, GridFunction)> {
    let field = DiscreteField::new(mesh, nodes)?;
    Ok((field.cell_values(), gradient(&field)))
}

fn split_rows(mut computed: Vec<(StudyRow, Vec<Stage>)>) -> (Vec<StudyRow>, Vec<(u32, Vec<Stage>)>) {
    computed.sort_by_key(|(r, _)| r.n);
    let traces = computed.iter().map(|(r, s)| (r.n, s.clone())).collect();
    (computed.into_iter().map(|(r, _)| r).collect(), traces)
}

/// `|Δg|` in 1-D, `|∇g|·area` for affine 2-D data: a lower bound for
/// `∫|Du|` over feasible fields.
fn boundary_variation(mesh: &MeshSpec) -> Option<f64> {
    match mesh.boundary() {
        BoundaryTrace::Endpoints { g0, g1 } => Some((g1 - g0).abs()),
        trace @ BoundaryTrace::Quadratic { gx, gy, .. } if trace.is_affine() => {
            Some(gx.hypot(gy) * mesh.grid().total_measure())
        }
        _ => None,
    }
}

/// `m_n = min F_n` along the schedule against the supremal oracle, with
/// the growth lower bound and the affine-competitor upper bound per row.
pub fn run_norm_gamma_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.ensure_kind(&[StudyKind::NormGamma, StudyKind::ConstantExponent])?;
    let terms = cfg.validate()?;
    let oracle = mesh_oracle(&cfg.density, &cfg.mesh)?;
    let mesh = &cfg.mesh;
    let f = &cfg.density;
    let measure = mesh.grid().total_measure();
    let variation = boundary_variation(mesh);
    let (u0, du0) = fields_on(mesh, interpolate_boundary(mesh).nodes().to_vec())?;
    let eps_floor = *cfg.solver.epsilons.last().expect("validated schedule");
    let mut unit = vec![0.0; mesh.dimension()];
    unit[0] = 1.0;
    let weight_max = (0..mesh.grid().len())
        .map(|c| f.value(mesh.grid().center(c), &[0.0], &unit))
        .fold(0.0, f64::max);
    let el = match (&f.family, cfg.profile, mesh.boundary()) {
        (
            DensityFamily::WeightedNorm { a },
            ExponentProfile::Constant,
            BoundaryTrace::Endpoints { g0, g1 },
        ) if f.outer_power == 1.0 => Some((*a, g0, g1)),
        _ => None,
    };

    let computed = cfg
        .schedule
        .par_iter()
        .zip(terms.par_iter())
        .map(|(&n, p)| -> Result<(StudyRow, Vec<Stage>)> {
            let r = minimize_power(Functional::Fn, f, p, mesh, &cfg.solver)?;
            let upper = eval_fn(f, &u0, &du0, p)?;
            let lower = variation.map(|v| {
                let g = f.gamma;
                let c = embedding_constant(measure, g * p.p_minus(), g * p.p_plus(), cfg.beta, 1.0);
                f.alpha * (v / c).powf(g)
            });
            let el_distance = match el {
                Some((a, g0, g1)) => {
                    let x0 = mesh.origin()[0];
                    let u = euler_lagrange_1d(&a, p.p_minus(), x0, x0 + mesh.extent()[0], g0, g1)?;
                    let exact: Vec<f64> =
                        (0..mesh.node_count()).map(|k| u(mesh.node_coords(k)[0])).collect();
                    Some(r.field(mesh).sup_distance(&exact))
                }
                None => None,
            };
            let row = StudyRow {
                n,
                p_minus: p.p_minus(),
                p_plus: p.p_plus(),
                value: r.objective,
                oracle,
                error: Some((r.objective - oracle).abs() / oracle),
                extra: vec![
                    lower,
                    Some(upper),
                    el_distance,
                    Some(r.residual()),
                    Some(r.iterations as f64),
                ],
                status: r.status.as_str(),
            };
            Ok((row, r.stages))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, traces) = split_rows(computed);

    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    let final_error = *errors.last().expect("nonempty schedule");
    let stalled: Vec<u32> = rows
        .iter()
        .filter(|r| r.status == SolveStatus::Stagnated.as_str())
        .map(|r| r.n)
        .collect();
    let out_of_bounds: Vec<u32> = rows
        .iter()
        .filter(|r| {
            let below = r.extra[0].is_some_and(|lo| r.value < lo * (1.0 - 1e-9));
            let above = r.extra[1]
                .is_some_and(|hi| r.value > hi * (1.0 + 1e-9) + eps_floor * weight_max);
            below || above
        })
        .map(|r| r.n)
        .collect();
    let verdicts = vec![
        verdict(
            "errors_eventually_decreasing",
            eventually_decreasing(&errors, 1e-9),
            format!("{errors:?}"),
        ),
        verdict(
            "final_error_below_threshold",
            final_error < cfg.threshold,
            format!("{final_error:.3e} vs {}", cfg.threshold),
        ),
        verdict("no_stagnation", stalled.is_empty(), format!("stagnated at n = {stalled:?}")),
        verdict(
            "bounds_hold",
            out_of_bounds.is_empty(),
            format!("violated at n = {out_of_bounds:?}"),
        ),
    ];
    Ok(StudyResult {
        kind: cfg.kind,
        oracle,
        extra_columns: vec!["lower_bound", "upper_bound", "el_distance", "residual", "iterations"],
        rows,
        verdicts,
        traces,
    })
}

/// Node values of the configured probe, scaled.
pub fn probe_field(cfg: &StudyConfig) -> Result<DiscreteField<'_>> {
    let mesh = &cfg.mesh;
    let s = cfg.probe.scale;
    match cfg.probe.field {
        ProbeField::Coordinate => DiscreteField::from_fn(mesh, |x| s * x[0]),
        ProbeField::Boundary => Ok(interpolate_boundary(mesh).scaled(s)),
        ProbeField::Oracle => Ok(oracle_field(&cfg.density, mesh)?.scaled(s)),
    }
}

/// The supremal minimizer on the mesh nodes: the closed form in 1-D, the
/// affine extension for affine 2-D data.
pub fn oracle_field<'m>(f: &DensitySpec, mesh: &'m MeshSpec) -> Result<DiscreteField<'m>> {
    mesh_oracle(f, mesh)?;
    match (mesh.boundary(), &f.family) {
        (BoundaryTrace::Endpoints { g0, g1 }, DensityFamily::WeightedNorm { a }) => {
            let x0 = mesh.origin()[0];
            let u = oracle_minimizer_1d(a, x0, x0 + mesh.extent()[0], g0, g1)?;
            DiscreteField::from_fn(mesh, |x| u(x[0]))
        }
        _ => Ok(interpolate_boundary(mesh)),
    }
}

/// `𝓕_n(u)` for a fixed probe `u` whose supremal value sits at least
/// `delta` away from one.
pub fn run_integral_dichotomy_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.ensure_kind(&[StudyKind::IntegralDichotomy])?;
    let terms = cfg.validate()?;
    let probe = probe_field(cfg)?;
    let (u, du) = (probe.cell_values(), gradient(&probe));
    let sup = eval_supremal(&cfg.density, &u, &du)?;
    if (sup - 1.0).abs() < cfg.delta {
        return Err(Error::IllPosed(format!(
            "probe has sup f = {sup}, within delta = {} of 1",
            cfg.delta
        )));
    }
    let vanishing = sup < 1.0;
    let limit = if vanishing { 0.0 } else { f64::INFINITY };
    let rows = cfg
        .schedule
        .par_iter()
        .zip(terms.par_iter())
        .map(|(&n, p)| -> Result<StudyRow> {
            let value = eval_cal_fn(&cfg.density, &u, &du, p)?;
            let log_value = log_cal_fn(&cfg.density, &u, &du, p)?;
            Ok(StudyRow {
                n,
                p_minus: p.p_minus(),
                p_plus: p.p_plus(),
                value,
                oracle: limit,
                error: vanishing.then_some(value),
                extra: vec![Some(sup), Some(log_value)],
                status: if value == f64::INFINITY { "overflow" } else { "ok" },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = rows.last().expect("nonempty schedule");
    let verdicts = vec![if vanishing {
        verdict(
            "vanishes",
            last.value < VANISHING_THRESHOLD,
            format!("n = {}: {:.3e}", last.n, last.value),
        )
    } else {
        verdict(
            "diverges",
            last.value > DIVERGENCE_THRESHOLD,
            format!("n = {}: {:.3e}", last.n, last.value),
        )
    }];
    Ok(StudyResult {
        kind: cfg.kind,
        oracle: limit,
        extra_columns: vec!["sup_density", "log_value"],
        rows,
        verdicts,
        traces: Vec::new(),
    })
}

/// Sup-norm distance between the computed `F_n` minimizers and the
/// supremal minimizer, for constant exponents in 1-D.
pub fn run_minimizer_convergence(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.ensure_kind(&[StudyKind::ConstantExponent])?;
    let mesh = &cfg.mesh;
    let f = &cfg.density;
    let (a, g0, g1) = match (&f.family, mesh.boundary(), cfg.profile) {
        (
            DensityFamily::WeightedNorm { a },
            BoundaryTrace::Endpoints { g0, g1 },
            ExponentProfile::Constant,
        ) if f.outer_power == 1.0 => (*a, g0, g1),
        _ => {
            return Err(Error::Precondition(
                "minimizer convergence needs a 1-D weighted norm with a constant exponent profile"
                    .into(),
            ))
        }
    };
    let terms = cfg.validate()?;
    let (x0, x1) = (mesh.origin()[0], mesh.origin()[0] + mesh.extent()[0]);
    let oracle = mesh_oracle(f, mesh)?;
    let u_star = oracle_minimizer_1d(&a, x0, x1, g0, g1)?;
    let star: Vec<f64> = (0..mesh.node_count()).map(|k| u_star(mesh.node_coords(k)[0])).collect();
    let computed = cfg
        .schedule
        .par_iter()
        .zip(terms.par_iter())
        .map(|(&n, p)| -> Result<(StudyRow, Vec<Stage>)> {
            let r = minimize_power(Functional::Fn, f, p, mesh, &cfg.solver)?;
            let u_el = euler_lagrange_1d(&a, p.p_minus(), x0, x1, g0, g1)?;
            let el: Vec<f64> = (0..mesh.node_count()).map(|k| u_el(mesh.node_coords(k)[0])).collect();
            let field = r.field(mesh);
            let row = StudyRow {
                n,
                p_minus: p.p_minus(),
                p_plus: p.p_plus(),
                value: r.objective,
                oracle,
                error: Some(field.sup_distance(&star)),
                extra: vec![Some(field.sup_distance(&el)), Some(r.residual())],
                status: r.status.as_str(),
            };
            Ok((row, r.stages))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, traces) = split_rows(computed);
    let distances: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    let final_distance = *distances.last().expect("nonempty schedule");
    let worst_el = rows.iter().filter_map(|r| r.extra[0]).fold(0.0, f64::max);
    let verdicts = vec![
        verdict(
            "distances_eventually_decreasing",
            eventually_decreasing(&distances, 1e-9),
            format!("{distances:?}"),
        ),
        verdict(
            "final_distance_below_threshold",
            final_distance < cfg.distance_threshold,
            format!("{final_distance:.3e} vs {}", cfg.distance_threshold),
        ),
        verdict(
            "matches_euler_lagrange",
            worst_el < cfg.distance_threshold,
            format!("worst {worst_el:.3e}"),
        ),
    ];
    Ok(StudyResult {
        kind: cfg.kind,
        oracle,
        extra_columns: vec!["el_distance", "residual"],
        rows,
        verdicts,
        traces,
    })
}

/// `‖u‖_{p_n}` for the probe's cell values against `max |u|`.
pub fn run_norm_limit_study(cfg: &StudyConfig) -> Result<StudyResult> {
    cfg.ensure_kind(&[StudyKind::NormLimit])?;
    let terms = cfg.validate()?;
    let u = probe_field(cfg)?.cell_values();
    let sup = u.sup_norm();
    if sup == 0.0 {
        return Err(Error::Precondition("probe vanishes identically".into()));
    }
    let rows = cfg
        .schedule
        .iter()
        .zip(&terms)
        .map(|(&n, p)| -> Result<StudyRow> {
            let value = luxemburg_norm(&u, p)?;
            Ok(StudyRow {
                n,
                p_minus: p.p_minus(),
                p_plus: p.p_plus(),
                value,
                oracle: sup,
                error: Some((value - sup).abs() / sup),
                extra: Vec::new(),
                status: "ok",
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    let final_error = *errors.last().expect("nonempty schedule");
    let verdicts = vec![
        verdict("errors_decreasing", nonincreasing(&errors, 0.0), format!("{errors:?}")),
        verdict(
            "final_error_below_threshold",
            final_error < cfg.threshold,
            format!("{final_error:.3e} vs {}", cfg.threshold),
        ),
    ];
    Ok(StudyResult {
        kind: cfg.kind,
        oracle: sup,
        extra_columns: Vec::new(),
        rows,
        verdicts,
        traces: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::Coefficient;

    fn inverse_linear() -> Coefficient {
        Coefficient::InverseLinear { offset: 1.0, slope: 1.0 }
    }

    fn benchmark(kind: StudyKind, a: Coefficient, cells: usize) -> StudyConfig {
        let mesh = MeshSpec::interval(0.0, 1.0, cells, 0.0, 1.0).unwrap();
        StudyConfig::new(kind, DensitySpec::weighted_norm(a).with_growth(0.5, 1.0), mesh)
    }

    #[test]
    fn affine_case_is_exact() {
        let mut cfg = benchmark(StudyKind::NormGamma, Coefficient::Constant(1.0), 64);
        cfg.density = DensitySpec::weighted_norm(Coefficient::Constant(1.0));
        cfg.profile = ExponentProfile::Constant;
        let r = run_norm_gamma_study(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        assert!(r.rows.iter().all(|row| (row.value - 1.0).abs() < 1e-9));
    }

    #[test]
    fn weighted_benchmark_converges_for_both_profiles() {
        let mut cfg = benchmark(StudyKind::NormGamma, inverse_linear(), 200);
        let variable = run_norm_gamma_study(&cfg).unwrap();
        cfg.profile = ExponentProfile::Constant;
        let constant = run_norm_gamma_study(&cfg).unwrap();
        for r in [&variable, &constant] {
            assert!(r.passed(), "{:?}", r.verdicts);
            assert!((r.oracle - 2.0 / 3.0).abs() < 1e-15);
            assert_eq!(r.rows.iter().map(|row| row.n).collect::<Vec<_>>(), vec![4, 8, 16, 32, 64]);
        }
        let (a, b) = (variable.rows[4].value, constant.rows[4].value);
        assert!((a - b).abs() / b < 0.01);
        assert!(constant.rows.iter().all(|row| row.extra[2].unwrap() < 0.01));
    }

    #[test]
    fn rescaling_the_density_rescales_minima() {
        let mut cfg = benchmark(StudyKind::NormGamma, inverse_linear(), 60);
        cfg.schedule = vec![4, 16];
        let base = run_norm_gamma_study(&cfg).unwrap();
        cfg.density = cfg.density.scaled(3.5);
        let scaled = run_norm_gamma_study(&cfg).unwrap();
        assert!((scaled.oracle / base.oracle - 3.5).abs() < 1e-12);
        for (x, y) in base.rows.iter().zip(&scaled.rows) {
            assert!((y.value / x.value - 3.5).abs() < 1e-8 * 3.5);
        }
    }

    #[test]
    fn two_dimensional_affine_study() {
        let mesh = MeshSpec::rectangle([0.0, 0.0], [1.0, 1.0], [10, 10], BoundaryTrace::affine(0.0, 0.6, 0.8)).unwrap();
        let mut cfg = StudyConfig::new(
            StudyKind::NormGamma,
            DensitySpec::weighted_norm(Coefficient::Constant(1.0)),
            mesh,
        );
        cfg.schedule = vec![4, 8, 16];
        let r = run_norm_gamma_study(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);
        assert!(r.rows.iter().all(|row| row.value < 1.0 && row.value >= row.extra[0].unwrap()));
        cfg.profile = ExponentProfile::Constant;
        let r = run_norm_gamma_study(&cfg).unwrap();
        assert!(r.rows.iter().all(|row| (row.value - 1.0).abs() < 1e-8));
    }

    #[test]
    fn dichotomy_branches() {
        let mut cfg = benchmark(StudyKind::IntegralDichotomy, Coefficient::Constant(1.0), 64);
        cfg.profile = ExponentProfile::Constant;
        cfg.schedule = vec![10, 20, 50];
        cfg.probe.scale = 0.5;
        let r = run_integral_dichotomy_study(&cfg).unwrap();
        assert!(r.passed());
        for row in &r.rows {
            let n = f64::from(row.n);
            let closed = 0.5f64.powf(n) / n;
            assert!((row.value - closed).abs() < 1e-12 * closed);
        }

        cfg.probe.scale = 2.0;
        cfg.schedule = vec![10, 30];
        let r = run_integral_dichotomy_study(&cfg).unwrap();
        let closed = 2f64.powi(30) / 30.0;
        assert!((r.rows[1].value - closed).abs() < 1e-9 * closed);
        assert!(!r.passed());
        cfg.profile = ExponentProfile::DEFAULT_SINE;
        let r = run_integral_dichotomy_study(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);

        cfg.probe.scale = 1.0;
        assert!(matches!(run_integral_dichotomy_study(&cfg), Err(Error::IllPosed(_))));
    }

    #[test]
    fn minimizer_convergence_cases() {
        let mut cfg = benchmark(StudyKind::ConstantExponent, inverse_linear(), 200);
        cfg.profile = ExponentProfile::Constant;
        let r = run_minimizer_convergence(&cfg).unwrap();
        assert!(r.passed(), "{:?}", r.verdicts);

        let pw = Coefficient::Piecewise { breakpoint: 0.5, left: 1.0, right: 2.0 };
        let mut cfg = benchmark(StudyKind::ConstantExponent, pw, 100);
        cfg.profile = ExponentProfile::Constant;
        let r = run_minimizer_convergence(&cfg).unwrap();
        assert!((r.oracle - 4.0 / 3.0).abs() < 1e-14);
        assert!(r.verdict("distances_eventually_decreasing").unwrap().pass);

        let mut cfg = benchmark(StudyKind::ConstantExponent, Coefficient::Constant(1.0), 50);
        cfg.profile = ExponentProfile::Constant;
        let r = run_minimizer_convergence(&cfg).unwrap();
        assert!(r.errors().iter().all(|d| *d < 1e-9));

        cfg.profile = ExponentProfile::DEFAULT_SINE;
        assert!(run_minimizer_convergence(&cfg).is_err());
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let cfg = benchmark(StudyKind::NormLimit, inverse_linear(), 20);
        assert!(run_norm_gamma_study(&cfg).is_err());
        assert!(run_norm_limit_study(&cfg).is_ok());
    }

    #[test]
    fn norm_limit_rows() {
        let mut cfg = benchmark(StudyKind::NormLimit, Coefficient::Constant(1.0), 200);
        cfg.profile = ExponentProfile::Constant;
        cfg.schedule = vec![10, 50, 200];
        let r = run_norm_limit_study(&cfg).unwrap();
        assert!(r.verdict("errors_decreasing").unwrap().pass);
        let h = 1.0 / 200.0;
        for row in &r.rows {
            let n = f64::from(row.n);
            let brute = (0..200).map(|i| h * ((i as f64 + 0.5) * h).powf(n)).sum::<f64>().powf(1.0 / n);
            assert!((row.value - brute).abs() < 1e-10);
        }
    }
}
