//! The TOML study document: five flat sections, every key optional unless
//! noted, unknown keys rejected by path.

use std::collections::BTreeMap;

use suplab::discretize::{BoundaryTrace, MeshSpec};
use suplab::energy::{growth_check, level_convexity_probe, Coefficient, CustomRule, DensitySpec};
use suplab::exponent_space::ExponentProfile;
use suplab::gamma_lab::{Probe, ProbeField, StudyConfig, StudyKind};
use suplab::solve::{Direction, SolverSettings};
use thiserror::Error;
use toml::{Table, Value};

/// Seed of the contract probes run while parsing.
pub const CONTRACT_SEED: u64 = 0x006d_6f64_756c_6172;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config syntax: {0}")]
    Syntax(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("{key}: {message}")]
    Invalid { key: String, message: String },
    #[error("{key}: {label} violated: {detail}")]
    Contract {
        key: String,
        label: String,
        detail: String,
    },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

/// Sizes of the randomized verify suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSizes {
    pub norm_instances: usize,
    pub inequality_instances: usize,
    pub jensen_trials: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        Self {
            norm_instances: 1000,
            inequality_instances: 200,
            jensen_trials: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub study: StudyConfig,
    /// Whether `study.kind` was given explicitly.
    pub kind_given: bool,
    pub suite: SuiteSizes,
    pub contract_trials: usize,
}

struct Section {
    name: &'static str,
    entries: BTreeMap<String, Value>,
}

impl Section {
    fn new(root: &mut Table, name: &'static str) -> Result<Self, ConfigError> {
        let entries = match root.remove(name) {
            None => BTreeMap::new(),
            Some(Value::Table(t)) => t.into_iter().collect(),
            Some(_) => return Err(invalid(name, "expected a [section]")),
        };
        Ok(Self { name, entries })
    }

    fn key(&self, k: &str) -> String {
        format!("{}.{k}", self.name)
    }

    fn take(&mut self, k: &str) -> Option<Value> {
        self.entries.remove(k)
    }

    fn has(&self, k: &str) -> bool {
        self.entries.contains_key(k)
    }

    fn f64(&mut self, k: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(k) {
            None => Ok(None),
            Some(v) => as_f64(&v).map(Some).ok_or_else(|| invalid(self.key(k), "expected a number")),
        }
    }

    fn f64_or(&mut self, k: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(k)?.unwrap_or(default))
    }

    fn usize_or(&mut self, k: &str, default: usize) -> Result<usize, ConfigError> {
        match self.take(k) {
            None => Ok(default),
            Some(Value::Integer(i)) if i >= 0 => Ok(i as usize),
            Some(_) => Err(invalid(self.key(k), "expected a nonnegative integer")),
        }
    }

    fn bool(&mut self, k: &str) -> Result<Option<bool>, ConfigError> {
        match self.take(k) {
            None => Ok(None),
            Some(Value::Boolean(b)) => Ok(Some(b)),
            Some(_) => Err(invalid(self.key(k), "expected true or false")),
        }
    }

    fn string(&mut self, k: &str) -> Result<Option<String>, ConfigError> {
        match self.take(k) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(invalid(self.key(k), "expected a string")),
        }
    }

    fn f64_list(&mut self, k: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.take(k) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(as_f64)
                .collect::<Option<Vec<_>>>()
                .map(Some)
                .ok_or_else(|| invalid(self.key(k), "expected a list of numbers")),
            Some(v) => as_f64(&v)
                .map(|x| Some(vec![x]))
                .ok_or_else(|| invalid(self.key(k), "expected a number or a list of numbers")),
        }
    }

    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.keys().next() {
            Some(k) => Err(ConfigError::UnknownKey(format!("{}.{k}", self.name))),
            None => Ok(()),
        }
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn one_of<'a>(key: String, value: &str, options: &[&'a str]) -> Result<&'a str, ConfigError> {
    options
        .iter()
        .find(|o| **o == value)
        .copied()
        .ok_or_else(|| invalid(key, format!("`{value}` is not one of {options:?}")))
}

fn coefficient(s: &mut Section) -> Result<Coefficient, ConfigError> {
    let kind = s.string("coefficient")?.unwrap_or_else(|| "constant".into());
    let key = s.key("coefficient");
    let c = match one_of(key, &kind, &["constant", "inverse_linear", "piecewise"])? {
        "constant" => Coefficient::Constant(s.f64_or("a", 1.0)?),
        "inverse_linear" => Coefficient::InverseLinear {
            offset: s.f64_or("offset", 1.0)?,
            slope: s.f64_or("slope", 1.0)?,
        },
        _ => Coefficient::Piecewise {
            breakpoint: s.f64_or("breakpoint", 0.5)?,
            left: s.f64("left")?.ok_or_else(|| invalid(s.key("left"), "required for piecewise"))?,
            right: s.f64("right")?.ok_or_else(|| invalid(s.key("right"), "required for piecewise"))?,
        },
    };
    Ok(c)
}

fn coefficient_inf(c: &Coefficient, mesh: &MeshSpec) -> f64 {
    let g = mesh.grid();
    (0..g.len()).map(|i| c.value(g.center(i))).fold(f64::INFINITY, f64::min)
}

fn density(s: &mut Section, mesh: &MeshSpec) -> Result<DensitySpec, ConfigError> {
    let family = s.string("family")?.unwrap_or_else(|| "weighted_norm".into());
    let family = one_of(
        s.key("family"),
        &family,
        &["weighted_norm", "shifted_norm", "anisotropic", "custom"],
    )?;
    let d = mesh.dimension();
    let (spec, default_alpha) = match family {
        "weighted_norm" => {
            let a = coefficient(s)?;
            (DensitySpec::weighted_norm(a), Some(coefficient_inf(&a, mesh)))
        }
        "shifted_norm" => {
            let a = coefficient(s)?;
            let shift = s.f64_list("shift")?.unwrap_or_else(|| vec![0.0; d]);
            if shift.len() != d {
                return Err(invalid(s.key("shift"), format!("needs {d} entries")));
            }
            let shift = shift.into_iter().map(Coefficient::Constant).collect();
            (DensitySpec::shifted_norm(a, shift), Some(coefficient_inf(&a, mesh)))
        }
        "anisotropic" => {
            let w = s
                .f64_list("weights")?
                .ok_or_else(|| invalid(s.key("weights"), "required for anisotropic"))?;
            if w.len() != d {
                return Err(invalid(s.key("weights"), format!("needs {d} entries")));
            }
            let low = w.iter().copied().fold(f64::INFINITY, f64::min) / (d as f64).sqrt();
            (
                DensitySpec::anisotropic(w.into_iter().map(Coefficient::Constant).collect()),
                Some(low),
            )
        }
        _ => {
            let a = coefficient(s)?;
            let rule = s.string("rule")?.ok_or_else(|| invalid(s.key("rule"), "required for custom"))?;
            let rule = match one_of(
                s.key("rule"),
                &rule,
                &["truncated_norm", "distance_to_sphere", "negative_norm", "power_norm"],
            )? {
                "truncated_norm" => CustomRule::TruncatedNorm {
                    cap: s.f64_or("cap", 1.0)?,
                    slope: s.f64_or("rule_slope", 0.0)?,
                },
                "distance_to_sphere" => CustomRule::DistanceToSphere {
                    radius: s.f64_or("radius", 1.0)?,
                },
                "negative_norm" => CustomRule::NegativeNorm,
                _ => CustomRule::PowerNorm {
                    exponent: s.f64_or("exponent", 1.0)?,
                },
            };
            let level_convex = match s.bool("level_convex")? {
                Some(b) => b,
                None => matches!(rule, CustomRule::TruncatedNorm { .. } | CustomRule::PowerNorm { .. }),
            };
            (DensitySpec::custom(a, rule, level_convex), None)
        }
    };
    if family != "custom" && s.has("level_convex") {
        return Err(invalid(s.key("level_convex"), "only custom densities declare level convexity"));
    }
    let alpha = match (s.f64("alpha")?, default_alpha) {
        (Some(a), _) => a,
        (None, Some(a)) => a,
        (None, None) => return Err(invalid(s.key("alpha"), "required for custom densities")),
    };
    let gamma = s.f64_or("gamma", 1.0)?;
    if !(alpha > 0.0 && gamma > 0.0 && alpha.is_finite() && gamma.is_finite()) {
        return Err(invalid(s.key("alpha"), "alpha and gamma must be positive"));
    }
    let mut spec = spec.with_growth(alpha, gamma);
    if let Some(k) = s.f64("outer_power")? {
        if !(k > 0.0) {
            return Err(invalid(s.key("outer_power"), "must be positive"));
        }
        spec = spec.powered(k);
    }
    Ok(spec)
}

fn mesh(s: &mut Section) -> Result<MeshSpec, ConfigError> {
    let cells: Vec<usize> = match s.take("cells") {
        None => vec![200],
        Some(Value::Integer(i)) if i > 0 => vec![i as usize],
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::Integer(i) if *i > 0 => Some(*i as usize),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| invalid(s.key("cells"), "expected positive integers"))?,
        Some(_) => return Err(invalid(s.key("cells"), "expected an integer or a list")),
    };
    let d = cells.len();
    let dim = s.usize_or("dimension", d)?;
    if dim != d {
        return Err(invalid(s.key("dimension"), format!("{dim} disagrees with {d} cell counts")));
    }
    let origin = s.f64_list("origin")?.unwrap_or_else(|| vec![0.0; d]);
    let extent = s.f64_list("extent")?.unwrap_or_else(|| vec![1.0; d]);
    let boundary = if d == 1 {
        BoundaryTrace::Endpoints {
            g0: s.f64_or("g0", 0.0)?,
            g1: s.f64_or("g1", 1.0)?,
        }
    } else {
        BoundaryTrace::Quadratic {
            c: s.f64_or("g_c", 0.0)?,
            gx: s.f64_or("g_x", 1.0)?,
            gy: s.f64_or("g_y", 0.0)?,
            gxx: s.f64_or("g_xx", 0.0)?,
            gxy: s.f64_or("g_xy", 0.0)?,
            gyy: s.f64_or("g_yy", 0.0)?,
        }
    };
    for k in ["g0", "g1"] {
        if d == 2 && s.has(k) {
            return Err(invalid(s.key(k), "endpoint data only applies in 1-D"));
        }
    }
    MeshSpec::new(origin, extent, cells, boundary).map_err(|e| invalid("mesh", e.to_string()))
}

fn exponents(s: &mut Section) -> Result<(ExponentProfile, f64, Vec<u32>), ConfigError> {
    let profile = s.string("profile")?.unwrap_or_else(|| "sine".into());
    let profile = match one_of(s.key("profile"), &profile, &["constant", "sine"])? {
        "constant" => {
            for k in ["mean", "amplitude", "frequency"] {
                if s.has(k) {
                    return Err(invalid(s.key(k), "only applies to the sine profile"));
                }
            }
            ExponentProfile::Constant
        }
        _ => ExponentProfile::Sine {
            mean: s.f64_or("mean", 2.0)?,
            amplitude: s.f64_or("amplitude", 1.0)?,
            frequency: s.f64_or("frequency", 1.0)?,
        },
    };
    let beta = s.f64_or("beta", 3.0)?;
    let schedule = match s.take("schedule") {
        None => vec![4, 8, 16, 32, 64],
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| match v {
                Value::Integer(i) if *i > 0 && *i <= i64::from(u32::MAX) => Some(*i as u32),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| invalid(s.key("schedule"), "expected positive integers"))?,
        Some(_) => return Err(invalid(s.key("schedule"), "expected a list of integers")),
    };
    Ok((profile, beta, schedule))
}

fn solver(s: &mut Section) -> Result<SolverSettings, ConfigError> {
    let d = SolverSettings::default();
    let direction = match s.string("direction")? {
        None => d.direction,
        Some(v) => match one_of(s.key("direction"), &v, &["newton", "steepest"])? {
            "newton" => Direction::Newton,
            _ => Direction::Steepest,
        },
    };
    let settings = SolverSettings {
        epsilons: s.f64_list("epsilons")?.unwrap_or(d.epsilons),
        direction,
        initial_step: s.f64_or("initial_step", d.initial_step)?,
        shrink: s.f64_or("shrink", d.shrink)?,
        sufficient_decrease: s.f64_or("sufficient_decrease", d.sufficient_decrease)?,
        rel_tol: s.f64_or("rel_tol", d.rel_tol)?,
        max_iterations: s.usize_or("max_iterations", d.max_iterations)?,
        max_backtracks: s.usize_or("max_backtracks", d.max_backtracks)?,
        max_passes: s.usize_or("max_passes", d.max_passes)?,
    };
    settings.validate().map_err(|e| invalid("solver", e.to_string()))?;
    Ok(settings)
}

fn contract_error(key: &str, e: suplab::Error) -> ConfigError {
    match e {
        suplab::Error::Contract { label, detail } => ConfigError::Contract {
            key: key.into(),
            label: label.into(),
            detail,
        },
        other => invalid(key, other.to_string()),
    }
}

/// Parses and validates a study document, running the growth, level
/// convexity and exponent-sequence contracts.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.to_string()))?;
    let mut dens = Section::new(&mut root, "density")?;
    let mut msec = Section::new(&mut root, "mesh")?;
    let mut esec = Section::new(&mut root, "exponents")?;
    let mut ssec = Section::new(&mut root, "solver")?;
    let mut study = Section::new(&mut root, "study")?;
    if let Some(k) = root.keys().next() {
        return Err(ConfigError::UnknownKey(k.clone()));
    }

    let mesh = mesh(&mut msec)?;
    msec.finish()?;
    let density = density(&mut dens, &mesh)?;
    dens.finish()?;
    let (profile, beta, schedule) = exponents(&mut esec)?;
    esec.finish()?;
    let solver = solver(&mut ssec)?;
    ssec.finish()?;

    let kind = study.string("kind")?;
    let kind_given = kind.is_some();
    let kind = match kind {
        None => StudyKind::NormGamma,
        Some(k) => StudyKind::parse(&k).ok_or_else(|| {
            invalid(
                study.key("kind"),
                format!("`{k}` is not one of {:?}", StudyKind::ALL.map(|k| k.as_str())),
            )
        })?,
    };
    let probe = match study.string("probe")? {
        None => ProbeField::Coordinate,
        Some(p) => match one_of(study.key("probe"), &p, &["coordinate", "oracle", "boundary"])? {
            "coordinate" => ProbeField::Coordinate,
            "oracle" => ProbeField::Oracle,
            _ => ProbeField::Boundary,
        },
    };
    let mut cfg = StudyConfig::new(kind, density, mesh);
    cfg.profile = profile;
    cfg.beta = beta;
    cfg.schedule = schedule;
    cfg.solver = solver;
    cfg.threshold = study.f64_or("threshold", cfg.threshold)?;
    cfg.distance_threshold = study.f64_or("distance_threshold", cfg.distance_threshold)?;
    cfg.delta = study.f64_or("delta", cfg.delta)?;
    cfg.probe = Probe {
        field: probe,
        scale: study.f64_or("probe_scale", 1.0)?,
    };
    let contract_trials = study.usize_or("contract_trials", 2000)?;
    let defaults = SuiteSizes::default();
    let suite = SuiteSizes {
        norm_instances: study.usize_or("norm_instances", defaults.norm_instances)?,
        inequality_instances: study.usize_or("inequality_instances", defaults.inequality_instances)?,
        jensen_trials: study.usize_or("jensen_trials", defaults.jensen_trials)?,
    };
    study.finish()?;

    check_contracts(&cfg, contract_trials)?;
    cfg.validate().map_err(|e| {
        let key = match &e {
            suplab::Error::Contract { label, .. } if label.starts_with("pn2") => "exponents.beta",
            suplab::Error::Contract { .. } => "exponents.schedule",
            _ => "study",
        };
        contract_error(key, e)
    })?;
    Ok(RunConfig {
        study: cfg,
        kind_given,
        suite,
        contract_trials,
    })
}

fn check_contracts(cfg: &StudyConfig, trials: usize) -> Result<(), ConfigError> {
    let grid = cfg.mesh.grid();
    cfg.sequence().map_err(|e| contract_error("exponents.beta", e))?;
    if !cfg.density.level_convex {
        return Err(ConfigError::Contract {
            key: "density.level_convex".into(),
            label: "H1 level convexity".into(),
            detail: "the density is declared not level convex".into(),
        });
    }
    let convex = level_convexity_probe(&cfg.density, grid, 1, trials, CONTRACT_SEED);
    if let Some(r) = convex.failures().next() {
        return Err(ConfigError::Contract {
            key: "density.level_convex".into(),
            label: "H1 level convexity".into(),
            detail: r.detail.clone(),
        });
    }
    let growth = growth_check(&cfg.density, grid, 1, trials, CONTRACT_SEED);
    if let Some(r) = growth.failures().next() {
        return Err(ConfigError::Contract {
            key: "density.alpha".into(),
            label: "H2 growth".into(),
            detail: r.detail.clone(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[density]\nfamily = \"weighted_norm\"\n[mesh]\ncells = 64\n[exponents]\nprofile = \"constant\"\n";

    #[test]
    fn minimal_document_gets_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.study.mesh.cells(), &[64]);
        assert_eq!(cfg.study.profile, ExponentProfile::Constant);
        assert_eq!(cfg.study.schedule, vec![4, 8, 16, 32, 64]);
        assert_eq!(cfg.study.density.alpha, 1.0);
        assert_eq!(cfg.study.solver, SolverSettings::default());
        assert!(!cfg.kind_given);
    }

    #[test]
    fn empty_document_is_valid() {
        parse_config("").unwrap();
    }

    #[test]
    fn beta_below_one_cites_pn2() {
        let err = parse_config(&format!("{MINIMAL}beta = 0.5\n")).unwrap_err();
        assert!(err.to_string().contains("pn2"), "{err}");
        assert!(err.to_string().starts_with("exponents.beta"));
    }

    #[test]
    fn excessive_alpha_cites_h2_with_witness() {
        let doc = "[density]\ncoefficient = \"inverse_linear\"\nalpha = 0.9\n[mesh]\ncells = 100\n";
        let err = parse_config(doc).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("H2 growth") && msg.contains("cell 99"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config("[density]\nfamliy = \"weighted_norm\"\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey("density.famliy".into()));
        let err = parse_config("[extra]\n").unwrap_err();
        assert_eq!(err, ConfigError::UnknownKey("extra".into()));
    }

    #[test]
    fn non_level_convex_density_cites_h1() {
        let doc = "[density]\nfamily = \"custom\"\nrule = \"distance_to_sphere\"\nalpha = 0.01\nlevel_convex = true\n";
        let err = parse_config(doc).unwrap_err();
        assert!(err.to_string().contains("H1 level convexity"), "{err}");
    }

    #[test]
    fn shifted_norm_with_shift_fails_growth() {
        let doc = "[density]\nfamily = \"shifted_norm\"\nshift = [0.5]\n";
        let err = parse_config(doc).unwrap_err();
        assert!(err.to_string().contains("H2 growth"), "{err}");
    }

    #[test]
    fn two_dimensional_mesh() {
        let doc = "[mesh]\ncells = [8, 6]\nextent = [1.0, 2.0]\ng_x = 0.0\ng_y = 1.0\n[density]\nfamily = \"anisotropic\"\nweights = [1.0, 2.0]\n";
        let cfg = parse_config(doc).unwrap();
        assert_eq!(cfg.study.mesh.dimension(), 2);
        assert!((cfg.study.density.alpha - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn schedule_must_increase() {
        let err = parse_config("[exponents]\nschedule = [8, 4]\n").unwrap_err();
        assert!(err.to_string().contains("pn1"), "{err}");
    }
}
