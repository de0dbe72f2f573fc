use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::external::run_external_solver;
use super::report::SolverReport;
use super::smtlib::parse_smtlib;
use super::templates::parse_templates;
use super::IoError;
use crate::encoder::{encode_source, EncodeError, EncodingOptions, Mode};
use crate::engines::lia::DEFAULT_BUDGET;
use crate::engines::{solve, ExternalAnswer, SolveConfig, Strategy};
use crate::horn::HornSystem;
use crate::transforms::{self, TransformError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Config(String),
}

/// One named transform. Textual form, with `:`-separated arguments:
/// `merge:FROM:INTO`, `inline`, `tautologies`, `redundant`, `resolve:CTOR`,
/// `unused-args`, `reverse`, `abstract:K[:P…]`, `instantiate:FILE`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransformStep {
    Merge { from: String, into: String },
    Inline,
    Tautologies,
    Redundant,
    Resolve(String),
    UnusedArgs,
    Reverse,
    Abstract { k: usize, targets: Vec<String> },
    Instantiate(PathBuf),
}

impl FromStr for TransformStep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        Ok(match parts.as_slice() {
            ["merge", from, into] => TransformStep::Merge { from: from.to_string(), into: into.to_string() },
            ["inline"] => TransformStep::Inline,
            ["tautologies"] => TransformStep::Tautologies,
            ["redundant"] => TransformStep::Redundant,
            ["resolve", c] => TransformStep::Resolve(c.to_string()),
            ["unused-args"] => TransformStep::UnusedArgs,
            ["reverse"] => TransformStep::Reverse,
            ["abstract", k, targets @ ..] => TransformStep::Abstract {
                k: k.parse().map_err(|_| format!("bad arity {k:?}"))?,
                targets: targets.iter().map(|t| t.to_string()).collect(),
            },
            ["instantiate", path] => TransformStep::Instantiate(PathBuf::from(path)),
            _ => return Err(format!("unknown transform step {s:?}")),
        })
    }
}

/// Comma-separated steps.
pub fn parse_steps(spec: &str) -> Result<Vec<TransformStep>, String> {
    spec.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse()).collect()
}

fn read(path: &Path) -> Result<String, PipelineError> {
    std::fs::read_to_string(path).map_err(|source| PipelineError::File { path: path.to_path_buf(), source })
}

/// Recursive predicates, the default targets of quantified abstraction.
fn recursive_targets(s: &HornSystem) -> Vec<String> {
    s.recursive_preds().into_iter().collect()
}

pub fn apply_step(s: &HornSystem, step: &TransformStep) -> Result<HornSystem, PipelineError> {
    Ok(match step {
        TransformStep::Merge { from, into } => transforms::inline_predicate(s, from, into)?,
        TransformStep::Inline => transforms::inline_single_definitions(s, &[]),
        TransformStep::Tautologies => transforms::remove_tautologies(s),
        TransformStep::Redundant => transforms::remove_redundant(s),
        TransformStep::Resolve(c) => transforms::eliminate_by_resolution(s, c)?,
        TransformStep::UnusedArgs => transforms::remove_unused_args(s),
        TransformStep::Reverse => transforms::reverse_rules(s)?,
        TransformStep::Abstract { k, targets } => {
            let ts = if targets.is_empty() { recursive_targets(s) } else { targets.clone() };
            let refs: Vec<&str> = ts.iter().map(String::as_str).collect();
            transforms::quantified_abstraction(s, *k, &refs)?
        }
        TransformStep::Instantiate(path) => transforms::instantiate(s, &parse_templates(&read(path)?)?)?,
    })
}

/// Configuration of one CLI run: how to obtain the system, which
/// transforms to apply, and how to solve it.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub mode: Mode,
    pub steps: Vec<TransformStep>,
    pub strategy: Strategy,
    pub k: usize,
    pub templates: Option<PathBuf>,
    pub depth: usize,
    pub lia_budget: usize,
    pub external: Option<String>,
    pub timeout: Duration,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            output: None,
            mode: Mode::Specialized,
            steps: Vec::new(),
            strategy: Strategy::default(),
            k: 2,
            templates: None,
            depth: 8,
            lia_budget: DEFAULT_BUDGET,
            external: None,
            timeout: Duration::from_secs(60),
        }
    }

    pub fn encoding_options(&self) -> EncodingOptions {
        match self.mode {
            Mode::Canonical => EncodingOptions::canonical(),
            Mode::Specialized => EncodingOptions::default(),
        }
    }
}

/// Reads a `.hof` program (encoded per `opts`) or an `.smt2` script.
pub fn load_system(path: &Path, opts: &EncodingOptions) -> Result<HornSystem, PipelineError> {
    let text = read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("smt2") => Ok(parse_smtlib(&text)?),
        _ => Ok(encode_source(&text, opts)?),
    }
}

/// Loads, transforms and solves per `cfg`. Returns the system that was
/// solved together with the report.
pub fn run_solve(cfg: &PipelineConfig) -> Result<(HornSystem, SolverReport), PipelineError> {
    let mut timings = BTreeMap::new();
    let t0 = Instant::now();
    let mut sys = load_system(&cfg.input, &cfg.encoding_options())?;
    timings.insert("load".to_string(), t0.elapsed().as_millis());
    let mut steps = cfg.steps.clone();
    if let Some(t) = &cfg.templates {
        steps.push(TransformStep::Abstract { k: cfg.k, targets: Vec::new() });
        steps.push(TransformStep::Instantiate(t.clone()));
    }
    for (i, step) in steps.iter().enumerate() {
        let t = Instant::now();
        sys = apply_step(&sys, step)?;
        timings.insert(format!("transform{i}"), t.elapsed().as_millis());
    }
    let runner = |s: &HornSystem| -> ExternalAnswer {
        match run_external_solver(s, cfg.external.as_deref().unwrap_or(""), cfg.timeout) {
            Ok(a) => a,
            Err(e) => ExternalAnswer::Unknown(e.to_string()),
        }
    };
    let solve_cfg = SolveConfig {
        strategy: cfg.strategy.clone(),
        depth: cfg.depth,
        lia_budget: cfg.lia_budget,
        external: cfg.external.as_ref().map(|_| &runner as &dyn Fn(&HornSystem) -> ExternalAnswer),
        ..SolveConfig::default()
    };
    let t = Instant::now();
    let outcome = solve(&sys, &solve_cfg);
    timings.insert("solve".to_string(), t.elapsed().as_millis());
    let report = SolverReport::new(&sys, &outcome, timings);
    Ok((sys, report))
}
