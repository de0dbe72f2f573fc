use std::collections::BTreeMap;
use std::fmt;

use super::formula::Formula;
use super::model::{default_params, Interp, Model, ModelError, PatternElem};
use super::term::{Sort, Term};

/// One entry of a system's transformation log. Entries other than `Note`
/// carry enough data to translate a model of the transformed system back
/// into a model of the system before the step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Step {
    /// A transform without model back-translation (inlining, resolution, …).
    Note { transform: String, detail: String },
    /// Predicate `from` was renamed to `to`.
    Rename { from: String, to: String },
    /// Predicate removed; its interpretation is the constant `value`.
    Removed { pred: String, sorts: Vec<Sort>, value: bool },
    /// Success flag split: `pred(args, ok)` became `ok_pred(args)` / `err_pred(args)`.
    OkSplit { pred: String, sorts: Vec<Sort>, ok_pred: String, err_pred: String },
    /// Singleton constructor `ctor` of `datatype` unfolded into its fields in
    /// every listed predicate (old signatures).
    ClosureUnfold { datatype: String, ctor: String, fields: Vec<Sort>, preds: Vec<(String, Vec<Sort>)> },
    /// `pred(x₀…xₙ)` was an alias of `target(x_perm[0] …)`.
    Alias { pred: String, sorts: Vec<Sort>, target: String, perm: Vec<usize> },
    /// Position `pos` of `pred` always held `value` and was removed.
    ConstPosition { pred: String, sorts: Vec<Sort>, pos: usize, value: Term },
    /// Positions dropped from `pred` (old signature `sorts`).
    DropArgs { pred: String, sorts: Vec<Sort>, positions: Vec<usize> },
}

impl Step {
    pub fn note(transform: impl Into<String>, detail: impl Into<String>) -> Step {
        Step::Note { transform: transform.into(), detail: detail.into() }
    }

    pub fn name(&self) -> &str {
        match self {
            Step::Note { transform, .. } => transform,
            Step::Rename { .. } => "rename",
            Step::Removed { .. } => "remove-predicate",
            Step::OkSplit { .. } => "ok-split",
            Step::ClosureUnfold { .. } => "closure-unfold",
            Step::Alias { .. } => "alias",
            Step::ConstPosition { .. } => "constant-position",
            Step::DropArgs { .. } => "drop-args",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::Note { transform, detail } => write!(f, "{transform}: {detail}"),
            Step::Rename { from, to } => write!(f, "rename {from} → {to}"),
            Step::Removed { pred, value, .. } => write!(f, "remove {pred} (≡ {value})"),
            Step::OkSplit { pred, ok_pred, err_pred, .. } => {
                write!(f, "split ok flag of {pred} into {ok_pred}/{err_pred}")
            }
            Step::ClosureUnfold { datatype, ctor, .. } => {
                write!(f, "unfold singleton closure {ctor} of {datatype}")
            }
            Step::Alias { pred, target, .. } => write!(f, "alias {pred} := {target}"),
            Step::ConstPosition { pred, pos, value, .. } => {
                write!(f, "drop constant position {pos} (= {value}) of {pred}")
            }
            Step::DropArgs { pred, positions, .. } => {
                write!(f, "drop unused positions {positions:?} of {pred}")
            }
        }
    }
}

fn lookup<'a>(m: &'a Model, pred: &str) -> Result<&'a Interp, ModelError> {
    m.get(pred).ok_or_else(|| ModelError::MissingPredicate(pred.to_string()))
}

fn equality(param: &Term, value: &Term) -> Formula {
    match (param, value) {
        (Term::Int(a), Term::Int(b)) => Formula::cmp(a, super::formula::CmpOp::Eq, b),
        (p, Term::Bool(b)) => Formula::iff(Formula::of_bool_term(p), Formula::from_bool(*b)),
        (_, Term::Unit) => Formula::True,
        (p, v) => Formula::term_eq(p.clone(), v.clone(), true),
    }
}

/// Translates a model of the system after `steps` into a model of the system
/// before them.
pub fn back_translate(steps: &[Step], model: &Model) -> Result<Model, ModelError> {
    let mut m = model.clone();
    for step in steps.iter().rev() {
        match step {
            Step::Note { transform, .. } => {
                return Err(ModelError::Unsupported(format!("step {transform} has no model back-translation")))
            }
            Step::Rename { from, to } => {
                let i = lookup(&m, to)?.clone();
                m.insert(from.clone(), i);
            }
            Step::Removed { pred, sorts, value } => {
                m.insert(pred.clone(), Interp::constant(default_params(sorts), *value));
            }
            Step::OkSplit { pred, sorts, ok_pred, err_pred } => {
                let params = default_params(sorts);
                let inner = &params[..params.len() - 1];
                let args: Vec<Term> = inner.iter().map(|(n, s)| Term::var_of(n.clone(), s)).collect();
                let ok = Interp::pullback(inner.to_vec(), Vec::new(), lookup(&m, ok_pred)?, &args, Formula::True)?;
                let err = Interp::pullback(inner.to_vec(), Vec::new(), lookup(&m, err_pred)?, &args, Formula::True)?;
                let flag = params.last().unwrap().0.clone();
                let mut combined = Interp::combine(&ok, &err, |a, b| {
                    Formula::or([
                        Formula::and([Formula::bool_var(flag.clone(), true), a]),
                        Formula::and([Formula::bool_var(flag.clone(), false), b]),
                    ])
                });
                combined.params = params;
                m.insert(pred.clone(), combined);
            }
            Step::ClosureUnfold { ctor, fields, preds, datatype } => {
                for (pred, old_sorts) in preds {
                    let params = default_params(old_sorts);
                    let mut extra = Vec::new();
                    let mut args = Vec::new();
                    for (i, (name, sort)) in params.iter().enumerate() {
                        if *sort == Sort::Adt(datatype.clone()) {
                            let binders: Vec<String> = (0..fields.len()).map(|k| format!("{name}_{k}")).collect();
                            for (b, s) in binders.iter().zip(fields) {
                                args.push(Term::var_of(b.clone(), s));
                            }
                            extra.push(PatternElem { param: i, ctor: ctor.clone(), binders });
                        } else {
                            args.push(Term::var_of(name.clone(), sort));
                        }
                    }
                    let target = lookup(&m, pred)?.clone();
                    let i = Interp::pullback(params, extra, &target, &args, Formula::True)?;
                    m.insert(pred.clone(), i);
                }
            }
            Step::Alias { pred, sorts, target, perm } => {
                let params = default_params(sorts);
                let args: Vec<Term> = perm.iter().map(|&j| Term::var_of(params[j].0.clone(), &params[j].1)).collect();
                let i = Interp::pullback(params, Vec::new(), lookup(&m, target)?, &args, Formula::True)?;
                m.insert(pred.clone(), i);
            }
            Step::ConstPosition { pred, sorts, pos, value } => {
                let params = default_params(sorts);
                let args: Vec<Term> = params
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i != pos)
                    .map(|(_, (n, s))| Term::var_of(n.clone(), s))
                    .collect();
                let p = Term::var_of(params[*pos].0.clone(), &params[*pos].1);
                let i = Interp::pullback(params, Vec::new(), lookup(&m, pred)?, &args, equality(&p, value))?;
                m.insert(pred.clone(), i);
            }
            Step::DropArgs { pred, sorts, positions } => {
                let params = default_params(sorts);
                let args: Vec<Term> = params
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !positions.contains(i))
                    .map(|(_, (n, s))| Term::var_of(n.clone(), s))
                    .collect();
                let i = Interp::pullback(params, Vec::new(), lookup(&m, pred)?, &args, Formula::True)?;
                m.insert(pred.clone(), i);
            }
        }
    }
    Ok(m)
}

/// Predicate renaming implied by a log, for reports.
pub fn renamings(steps: &[Step]) -> BTreeMap<String, String> {
    steps
        .iter()
        .filter_map(|s| match s {
            Step::Rename { from, to } => Some((from.clone(), to.clone())),
            _ => None,
        })
        .collect()
}
