//! Portfolio driver: runs engines in order and returns the first verdict
//! whose certificate checks against the input system.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use super::check::{check_model_with_budget, CheckResult};
use super::karr::{karr_affine, karr_model};
use super::lia::DEFAULT_BUDGET;
use super::nonrec::solve_nonrecursive;
use super::refute::{bounded_refutation_with, replay, Derivation, Refutation, SearchLimits};
use crate::horn::{default_params, Formula, HornSystem, Interp, Model};
use crate::transforms::{remove_redundant_indexed, reverse_rules};

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Sat(Model),
    Unsat(Derivation),
    Unknown(String),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat(_) => "unsat",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Simplify,
    Nonrecursive,
    Refute,
    Karr,
    ReverseKarr,
    External,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Simplify => "simplify",
            Engine::Nonrecursive => "nonrec",
            Engine::Refute => "refute",
            Engine::Karr => "karr",
            Engine::ReverseKarr => "reverse-karr",
            Engine::External => "external",
        })
    }
}

/// Ordered engine list. Parsed from `portfolio` (everything) or names joined
/// by `+`: simplify, nonrec, refute, karr, reverse, external.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy(pub Vec<Engine>);

impl Default for Strategy {
    fn default() -> Self {
        use Engine::*;
        Strategy(vec![Simplify, Nonrecursive, Refute, Karr, ReverseKarr, External])
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "portfolio" || s == "default" {
            return Ok(Strategy::default());
        }
        let mut out = Vec::new();
        for tok in s.split('+') {
            let e = match tok.trim() {
                "simplify" => Engine::Simplify,
                "nonrec" | "nonrecursive" => Engine::Nonrecursive,
                "refute" => Engine::Refute,
                "karr" => Engine::Karr,
                "reverse" | "reverse-karr" => Engine::ReverseKarr,
                "external" => Engine::External,
                other => return Err(format!("unknown engine {other:?}")),
            };
            if !out.contains(&e) {
                out.push(e);
            }
        }
        Ok(Strategy(out))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", names.join("+"))
    }
}

/// Answer of an external solver; never carries a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExternalAnswer {
    Sat,
    Unsat,
    Unknown(String),
}

pub struct SolveConfig<'a> {
    pub strategy: Strategy,
    pub depth: usize,
    pub lia_budget: usize,
    pub max_steps: usize,
    pub external: Option<&'a dyn Fn(&HornSystem) -> ExternalAnswer>,
}

impl Default for SolveConfig<'_> {
    fn default() -> Self {
        SolveConfig {
            strategy: Strategy::default(),
            depth: 8,
            lia_budget: DEFAULT_BUDGET,
            max_steps: 20_000,
            external: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Attempt {
    pub engine: Engine,
    pub outcome: String,
    pub millis: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub verdict: Verdict,
    pub trail: Vec<Attempt>,
    pub external: Option<ExternalAnswer>,
}

fn remap(d: &Derivation, idx: &[usize]) -> Derivation {
    Derivation {
        clause: idx[d.clause],
        assignment: d.assignment.clone(),
        children: d.children.iter().map(|c| remap(c, idx)).collect(),
    }
}

/// Candidate from the reversed system: a forward fact can only be useful
/// to a refutation if it lies in the reversed reachable set, so the
/// complement of that set's affine hull is tried as a forward model.
fn reverse_candidates(s: &HornSystem) -> Result<Vec<Model>, String> {
    let r = reverse_rules(s).map_err(|e| e.to_string())?;
    let back = karr_affine(&r);
    let fwd = karr_affine(s);
    let mut neg = Model::new();
    let mut both = Model::new();
    for p in &s.preds {
        let params = default_params(&p.sorts);
        let names: Vec<String> = back[&p.name].positions.iter().map(|&i| params[i].0.clone()).collect();
        let not_back = back[&p.name].space.to_formula(&names).negate();
        let f_names: Vec<String> = fwd[&p.name].positions.iter().map(|&i| params[i].0.clone()).collect();
        let f = fwd[&p.name].space.to_formula(&f_names);
        neg.insert(p.name.clone(), Interp::single(params.clone(), not_back.clone()));
        both.insert(p.name.clone(), Interp::single(params, Formula::and([f, not_back])));
    }
    Ok(vec![neg, both])
}

pub fn solve(s: &HornSystem, cfg: &SolveConfig) -> SolveOutcome {
    let mut trail = Vec::new();
    let mut external = None;
    let certify = |v: Verdict, idx: &[usize]| -> Result<Verdict, String> {
        match v {
            Verdict::Sat(m) => match check_model_with_budget(s, &m, cfg.lia_budget) {
                Ok(CheckResult::Valid) => Ok(Verdict::Sat(m)),
                Ok(other) => Err(format!("model rejected: {other}")),
                Err(e) => Err(format!("model rejected: {e}")),
            },
            Verdict::Unsat(d) => {
                let d = remap(&d, idx);
                match replay(s, &d) {
                    Ok(()) => Ok(Verdict::Unsat(d)),
                    Err(e) => Err(format!("derivation rejected: {e}")),
                }
            }
            u => Err(match u {
                Verdict::Unknown(r) => r,
                _ => unreachable!(),
            }),
        }
    };
    if s.has_quantified_atoms() {
        return SolveOutcome {
            verdict: Verdict::Unknown("system has quantified atoms; instantiate them first".into()),
            trail,
            external,
        };
    }
    let mut work = s.clone();
    let mut idx: Vec<usize> = (0..s.clauses.len()).collect();
    let limits = SearchLimits { lia_budget: cfg.lia_budget, max_steps: cfg.max_steps };
    for &engine in &cfg.strategy.0 {
        let t0 = Instant::now();
        let result: Result<Verdict, String> = match engine {
            Engine::Simplify => {
                let (w, keep) = remove_redundant_indexed(&work);
                let removed = work.clauses.len() - w.clauses.len();
                idx = keep.iter().map(|&k| idx[k]).collect();
                work = w;
                Err(format!("{removed} redundant clauses removed"))
            }
            Engine::Nonrecursive => match solve_nonrecursive(&work) {
                Ok(v) => certify(v, &idx),
                Err(e) => Err(e.to_string()),
            },
            Engine::Refute => match bounded_refutation_with(&work, cfg.depth, limits) {
                Refutation::Unsat(d) => certify(Verdict::Unsat(d), &idx),
                Refutation::NoneFound { exhausted: false } => {
                    Err(format!("no counterexample up to depth {}", cfg.depth))
                }
                Refutation::NoneFound { exhausted: true } => Err("search budget exhausted".into()),
            },
            Engine::Karr => {
                let m = karr_model(&work, &karr_affine(&work));
                certify(Verdict::Sat(m), &idx)
            }
            Engine::ReverseKarr => match reverse_candidates(&work) {
                Ok(cands) => {
                    let mut last = String::new();
                    let mut found = None;
                    for m in cands {
                        match certify(Verdict::Sat(m), &idx) {
                            Ok(v) => {
                                found = Some(v);
                                break;
                            }
                            Err(e) => last = e,
                        }
                    }
                    found.ok_or(last)
                }
                Err(e) => Err(e),
            },
            Engine::External => match cfg.external {
                None => Err("no external solver configured".into()),
                Some(run) => {
                    let a = run(&work);
                    let msg = match &a {
                        ExternalAnswer::Sat => "sat (external, uncertified)".to_string(),
                        ExternalAnswer::Unsat => "unsat (external, uncertified)".to_string(),
                        ExternalAnswer::Unknown(why) => format!("unknown: {why}"),
                    };
                    external = Some(a);
                    Err(msg)
                }
            },
        };
        let millis = t0.elapsed().as_millis();
        match result {
            Ok(v) => {
                trail.push(Attempt { engine, outcome: v.name().to_string(), millis });
                return SolveOutcome { verdict: v, trail, external };
            }
            Err(why) => trail.push(Attempt { engine, outcome: why, millis }),
        }
    }
    let summary: Vec<String> = trail.iter().map(|a| format!("{}: {}", a.engine, a.outcome)).collect();
    SolveOutcome { verdict: Verdict::Unknown(summary.join("; ")), trail, external }
}
