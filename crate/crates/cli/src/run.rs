//! Subcommand dispatch: parse the document, run the study, emit CSVs.

use std::fs;
use std::path::Path;

use suplab::gamma_lab::{
    run_integral_dichotomy_study, run_minimizer_convergence, run_norm_gamma_study, run_norm_limit_study,
    StudyKind, StudyResult,
};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, RunConfig};
use crate::output::{num, opt, sha256_hex, write_tables, RunManifest, Table};
use crate::verify::run_suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Verify,
    Norms,
    GammaStudy,
    Dichotomy,
    Minimizers,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Norms => "norms",
            Command::GammaStudy => "gamma-study",
            Command::Dichotomy => "dichotomy",
            Command::Minimizers => "minimizers",
        }
    }

    /// Study kinds the subcommand accepts; the first is the default.
    fn kinds(self) -> &'static [StudyKind] {
        match self {
            Command::Verify => &[],
            Command::Norms => &[StudyKind::NormLimit],
            Command::GammaStudy => &[StudyKind::NormGamma, StudyKind::ConstantExponent],
            Command::Dichotomy => &[StudyKind::IntegralDichotomy],
            Command::Minimizers => &[StudyKind::ConstantExponent],
        }
    }

    fn stem(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Norms => "norms",
            Command::GammaStudy => "gamma_study",
            Command::Dichotomy => "dichotomy",
            Command::Minimizers => "minimizers",
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("study rejected: {0}")]
    Rejected(suplab::Error),
    #[error("study failed: {0}")]
    Study(suplab::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for anything the document could fix, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Rejected(_) => 2,
            RunError::Study(_) | RunError::Io(_) => 1,
        }
    }
}

fn study_error(e: suplab::Error) -> RunError {
    match e {
        suplab::Error::Solver(_) => RunError::Study(e),
        _ => RunError::Rejected(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub manifest: RunManifest,
    pub passed: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

/// Parses `text` and fixes the study kind for `cmd`.
pub fn prepare(cmd: Command, text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = parse_config(text)?;
    let kinds = cmd.kinds();
    if let Some(&default) = kinds.first() {
        if !cfg.kind_given {
            cfg.study.kind = default;
        } else if !kinds.contains(&cfg.study.kind) {
            return Err(ConfigError::Invalid {
                key: "study.kind".into(),
                message: format!("`{}` cannot run under `{}`", cfg.study.kind.as_str(), cmd.name()),
            });
        }
    }
    Ok(cfg)
}

pub fn run(cmd: Command, config: &Path, out_dir: &Path, seed: u64) -> Result<Outcome, RunError> {
    let bytes = fs::read(config)?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| ConfigError::Syntax("config is not UTF-8".into()))?;
    let cfg = prepare(cmd, &text)?;
    let (tables, passed) = tables_for(cmd, &cfg, seed)?;
    let manifest = write_tables(config, out_dir, &sha256_hex(&bytes), seed, &tables)?;
    Ok(Outcome { manifest, passed })
}

/// Runs `cmd` and renders its tables without touching the filesystem.
pub fn tables_for(cmd: Command, cfg: &RunConfig, seed: u64) -> Result<(Vec<Table>, bool), RunError> {
    if cmd == Command::Verify {
        let rows = run_suite(cfg, seed).map_err(study_error)?;
        let mut t = Table::new(
            "verify.csv",
            &["suite", "relation", "instances", "failures", "min_slack", "expect", "pass", "detail"],
        );
        let passed = rows.iter().all(|r| r.pass());
        for r in rows {
            t.push(vec![
                r.suite.clone(),
                r.relation.clone(),
                r.instances.to_string(),
                r.failures.to_string(),
                num(r.min_slack),
                r.expect.as_str().into(),
                r.pass().to_string(),
                r.detail.clone(),
            ]);
        }
        return Ok((vec![t], passed));
    }
    let study = &cfg.study;
    let result = match cmd {
        Command::Norms => run_norm_limit_study(study),
        Command::GammaStudy => run_norm_gamma_study(study),
        Command::Dichotomy => run_integral_dichotomy_study(study),
        Command::Minimizers => run_minimizer_convergence(study),
        Command::Verify => unreachable!(),
    }
    .map_err(study_error)?;
    Ok((study_tables(cmd.stem(), &result), result.passed()))
}

/// The row table, the verdict table and, for minimizing studies, the
/// per-iteration solver trace.
pub fn study_tables(stem: &str, r: &StudyResult) -> Vec<Table> {
    let mut header = vec!["n", "p_minus", "p_plus", "value", "oracle", "error"];
    header.extend(r.extra_columns.iter().copied());
    header.push("status");
    let mut rows = Table::new(format!("{stem}.csv"), &header);
    for row in &r.rows {
        let mut cells = vec![
            row.n.to_string(),
            num(row.p_minus),
            num(row.p_plus),
            num(row.value),
            num(row.oracle),
            opt(row.error),
        ];
        cells.extend(row.extra.iter().map(|x| opt(*x)));
        cells.push(row.status.into());
        rows.push(cells);
    }
    let mut verdicts = Table::new(format!("{stem}_verdicts.csv"), &["verdict", "pass", "detail"]);
    for v in &r.verdicts {
        verdicts.push(vec![v.name.into(), v.pass.to_string(), v.detail.clone()]);
    }
    let mut out = vec![rows, verdicts];
    if !r.traces.is_empty() {
        let mut trace = Table::new(
            "solver_trace.csv",
            &["n", "stage", "epsilon", "index", "log_objective", "residual", "status"],
        );
        for (n, stages) in &r.traces {
            for (k, s) in stages.iter().enumerate() {
                for (i, v) in s.trace.iter().enumerate() {
                    trace.push(vec![
                        n.to_string(),
                        k.to_string(),
                        num(s.epsilon),
                        i.to_string(),
                        num(*v),
                        num(s.residual),
                        s.status.as_str().into(),
                    ]);
                }
            }
        }
        out.push(trace);
    }
    out
}
