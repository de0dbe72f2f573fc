use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::model_file::write_model;
use crate::engines::{Attempt, Derivation, ExternalAnswer, SolveOutcome, Verdict};
use crate::horn::{HornSystem, Model};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    /// Interpretations in display form, plus the same model in `.model` syntax.
    Model {
        interpretations: BTreeMap<String, String>,
        text: String,
    },
    Derivation {
        tree: Derivation,
        text: String,
    },
}

/// Everything a `solve` run reports. `certificate` is present exactly when
/// the verdict came from an internal engine; external answers are marked
/// `certified: false`.
#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    pub verdict: String,
    pub certified: bool,
    pub certificate: Option<Certificate>,
    pub reason: Option<String>,
    pub external: Option<ExternalAnswer>,
    pub provenance: Vec<String>,
    pub attempts: Vec<Attempt>,
    pub timings_ms: BTreeMap<String, u128>,
    pub tool_version: String,
}

pub fn tool_version() -> String {
    format!("hornclaw {}", env!("CARGO_PKG_VERSION"))
}

fn model_cert(m: &Model) -> Certificate {
    Certificate::Model {
        interpretations: m.interps.iter().map(|(p, i)| (p.clone(), format!("{p}{i}"))).collect(),
        text: write_model(m),
    }
}

impl SolverReport {
    pub fn new(sys: &HornSystem, out: &SolveOutcome, timings_ms: BTreeMap<String, u128>) -> Self {
        let (verdict, certified, certificate, reason) = match (&out.verdict, &out.external) {
            (Verdict::Sat(m), _) => ("sat", true, Some(model_cert(m)), None),
            (Verdict::Unsat(d), _) => (
                "unsat",
                true,
                Some(Certificate::Derivation { tree: d.clone(), text: d.display(sys).to_string() }),
                None,
            ),
            (Verdict::Unknown(why), Some(ExternalAnswer::Sat)) => {
                ("sat", false, None, Some(format!("external, uncertified; {why}")))
            }
            (Verdict::Unknown(why), Some(ExternalAnswer::Unsat)) => {
                ("unsat", false, None, Some(format!("external, uncertified; {why}")))
            }
            (Verdict::Unknown(why), _) => ("unknown", false, None, Some(why.clone())),
        };
        SolverReport {
            verdict: verdict.into(),
            certified,
            certificate,
            reason,
            external: out.external.clone(),
            provenance: sys.provenance.iter().map(|s| s.to_string()).collect(),
            attempts: out.trail.clone(),
            timings_ms,
            tool_version: tool_version(),
        }
    }

    /// 0 sat, 1 unsat, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self.verdict.as_str() {
            "sat" => 0,
            "unsat" => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for SolverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let how = if self.certified {
            "certified"
        } else if self.verdict == "unknown" {
            "no certificate"
        } else {
            "external, uncertified"
        };
        writeln!(f, "verdict: {} ({how})", self.verdict)?;
        match &self.certificate {
            Some(Certificate::Model { interpretations, .. }) => {
                writeln!(f, "model:")?;
                for i in interpretations.values() {
                    writeln!(f, "  {i}")?;
                }
            }
            Some(Certificate::Derivation { text, .. }) => {
                writeln!(f, "counterexample derivation:")?;
                for line in text.lines() {
                    writeln!(f, "  {line}")?;
                }
            }
            None => {}
        }
        if let Some(r) = &self.reason {
            writeln!(f, "reason: {r}")?;
        }
        writeln!(f, "attempts:")?;
        for a in &self.attempts {
            writeln!(f, "  {:<12} {} ({} ms)", a.engine.to_string(), a.outcome, a.millis)?;
        }
        if !self.provenance.is_empty() {
            writeln!(f, "provenance:")?;
            for p in &self.provenance {
                writeln!(f, "  {p}")?;
            }
        }
        Ok(())
    }
}
