use std::collections::{BTreeMap, BTreeSet};

use super::closures::{collect_closures, ClosureInfo};
use super::EncodeError;
use crate::frontend::{BinOp, Binding, BindingKind, Expr, ExprKind, Type, TypedProgram};
use crate::horn::{
    Clause, CmpOp, Constructor, Datatype, Formula, Head, HornSystem, LinExpr, PredApp, PredDecl, Sort, Step, Term,
};

/// Value of a compiled expression: booleans stay formulas until they must be
/// stored in an argument position.
#[derive(Debug, Clone)]
enum Val {
    Term(Term),
    Form(Formula),
}

/// One control path through an expression.
#[derive(Debug, Clone, Default)]
struct Path {
    atoms: Vec<PredApp>,
    constraint: Vec<Formula>,
    oks: Vec<Formula>,
}

impl Path {
    fn join(&self, other: &Path) -> Path {
        let mut p = self.clone();
        p.atoms.extend(other.atoms.iter().cloned());
        p.constraint.extend(other.constraint.iter().cloned());
        p.oks.extend(other.oks.iter().cloned());
        p
    }
}

struct Ctx<'a> {
    prog: &'a TypedProgram,
    info: &'a ClosureInfo,
    locals: Vec<String>,
    sorts: BTreeMap<String, Sort>,
    taken: BTreeSet<String>,
    next_r: usize,
    next_ok: usize,
    next_b: usize,
}

impl<'a> Ctx<'a> {
    fn new(prog: &'a TypedProgram, info: &'a ClosureInfo, b: &Binding, param_types: &[Type]) -> Self {
        let mut cx = Ctx {
            prog,
            info,
            locals: b.params.clone(),
            sorts: BTreeMap::new(),
            taken: b.params.iter().cloned().collect(),
            next_r: 1,
            next_ok: 1,
            next_b: 1,
        };
        for (p, t) in b.params.iter().zip(param_types) {
            cx.sorts.insert(p.clone(), info.sort_of(t));
        }
        b.body.walk(&mut |e| {
            if let ExprKind::Oracle(n) = &e.kind {
                cx.taken.insert(n.clone());
                cx.sorts.insert(n.clone(), Sort::Bool);
            }
        });
        cx
    }

    fn fresh(&mut self, base: &str, sort: Sort) -> String {
        let counter = match base {
            "r" => &mut self.next_r,
            "ok" => &mut self.next_ok,
            _ => &mut self.next_b,
        };
        loop {
            let name = format!("{base}{counter}");
            *counter += 1;
            if self.taken.insert(name.clone()) {
                self.sorts.insert(name.clone(), sort);
                return name;
            }
        }
    }

    /// A fresh name without a counter suffix when possible (`r`, `ok`).
    fn fresh_plain(&mut self, base: &str, sort: Sort) -> String {
        if self.taken.insert(base.to_string()) {
            self.sorts.insert(base.to_string(), sort);
            return base.to_string();
        }
        self.fresh(base, sort)
    }

    fn sort_of(&self, t: &Type) -> Sort {
        self.info.sort_of(t)
    }

    fn is_global(&self, name: &str) -> bool {
        !self.locals.iter().any(|l| l == name) && self.prog.program.binding(name).is_some()
    }

    fn term_of(&mut self, v: Val, path: &mut Path) -> Term {
        match v {
            Val::Term(t) => t,
            Val::Form(Formula::True) => Term::Bool(true),
            Val::Form(Formula::False) => Term::Bool(false),
            Val::Form(Formula::Bool(x, true)) => Term::Var(x),
            Val::Form(f) => {
                let b = self.fresh("b", Sort::Bool);
                path.constraint.push(Formula::iff(Formula::bool_var(b.clone(), true), f));
                Term::Var(b)
            }
        }
    }

    fn to_form(v: Val) -> Formula {
        match v {
            Val::Form(f) => f,
            Val::Term(t) => Formula::of_bool_term(&t),
        }
    }

    fn to_lin(v: Val) -> Result<LinExpr, EncodeError> {
        match v {
            Val::Term(Term::Int(e)) => Ok(e),
            other => Err(EncodeError::Unsupported(format!("expected an integer value, got {other:?}"))),
        }
    }

    fn result_val(&self, name: &str, ty: &Type) -> Val {
        match ty {
            Type::Bool => Val::Form(Formula::bool_var(name, true)),
            t => Val::Term(Term::var_of(name, &self.sort_of(t))),
        }
    }

    /// Compiles a list of expressions left to right; each result path carries
    /// one value per expression.
    fn seq(&mut self, es: &[&Expr]) -> Result<Vec<(Path, Vec<Val>)>, EncodeError> {
        let mut acc = vec![(Path::default(), Vec::new())];
        for e in es {
            let parts = self.compile(e)?;
            let mut next = Vec::new();
            for (p, vs) in &acc {
                for (q, v) in &parts {
                    let mut vs = vs.clone();
                    vs.push(v.clone());
                    next.push((p.join(q), vs));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Emits a call atom `pred(args…, r, ok)` on `path` and returns the result.
    fn call(&mut self, pred: String, mut args: Vec<Term>, result_ty: &Type, path: &mut Path) -> Val {
        let r = self.fresh("r", self.sort_of(result_ty));
        let ok = self.fresh("ok", Sort::Bool);
        args.push(Term::var_of(r.clone(), &self.sort_of(result_ty)));
        args.push(Term::Var(ok.clone()));
        path.atoms.push(PredApp::new(pred, args));
        path.oks.push(Formula::bool_var(ok, true));
        self.result_val(&r, result_ty)
    }

    /// Applies a closure value of type `ty` to `args` through the evaluator.
    fn apply_closure(
        &mut self,
        mut clo: Term,
        mut ty: Type,
        args: Vec<Val>,
        path: &mut Path,
    ) -> Result<Val, EncodeError> {
        let mut out = Val::Term(clo.clone());
        for a in args {
            let adt = self.info.adt_for(&ty).ok_or_else(|| EncodeError::UninhabitedClosureType(ty.clone()))?.clone();
            let a = self.term_of(a, path);
            let ev = self.info.evaluator(&adt);
            out = self.call(ev, vec![clo.clone(), a], adt.codomain(), path);
            ty = adt.codomain().clone();
            if let Val::Term(t) = &out {
                clo = t.clone();
            }
        }
        Ok(out)
    }

    fn compile(&mut self, e: &Expr) -> Result<Vec<(Path, Val)>, EncodeError> {
        let one = |v: Val| Ok(vec![(Path::default(), v)]);
        match &e.kind {
            ExprKind::Int(n) => one(Val::Term(Term::int(*n))),
            ExprKind::Bool(b) => one(Val::Form(Formula::from_bool(*b))),
            ExprKind::Unit => one(Val::Term(Term::Unit)),
            ExprKind::Oracle(n) => one(Val::Form(Formula::bool_var(n.clone(), true))),
            ExprKind::Nondet => Err(EncodeError::Unsupported("`*` before normalization".into())),
            ExprKind::Var(v) if self.is_global(v) => self.apply_global(v, &[]),
            ExprKind::Var(v) => {
                let ty = self.prog.type_of(e).clone();
                one(self.result_val(v, &ty))
            }
            ExprKind::Neg(a) => self
                .compile(a)?
                .into_iter()
                .map(|(p, v)| Ok((p, Val::Term(Term::Int(Self::to_lin(v)?.scale(-1))))))
                .collect(),
            ExprKind::Not(a) => {
                Ok(self.compile(a)?.into_iter().map(|(p, v)| (p, Val::Form(Self::to_form(v).negate()))).collect())
            }
            ExprKind::Assert(a) => Ok(self
                .compile(a)?
                .into_iter()
                .map(|(mut p, v)| {
                    p.oks.push(Self::to_form(v));
                    (p, Val::Term(Term::Unit))
                })
                .collect()),
            ExprKind::Bin(op, a, b) => {
                let operand_ty = self.prog.type_of(a).clone();
                let mut out = Vec::new();
                for (p, vs) in self.seq(&[a, b])? {
                    let mut it = vs.into_iter();
                    let (x, y) = (it.next().unwrap(), it.next().unwrap());
                    out.push((p, self.binop(*op, &operand_ty, x, y)?));
                }
                Ok(out)
            }
            ExprKind::If(c, t, f) => {
                let mut out = Vec::new();
                for (p, v) in self.compile(c)? {
                    let cond = Self::to_form(v);
                    for (branch, guard) in [(t, cond.clone()), (f, cond.negate())] {
                        if guard == Formula::False {
                            continue;
                        }
                        for (q, bv) in self.compile(branch)? {
                            let mut path = p.clone();
                            path.constraint.push(guard.clone());
                            out.push((path.join(&q), bv));
                        }
                    }
                }
                Ok(out)
            }
            ExprKind::App(head, args) => match &head.kind {
                ExprKind::Var(g) if self.is_global(g) => self.apply_global(g, args),
                _ => {
                    let head_ty = self.prog.type_of(head).clone();
                    let mut exprs: Vec<&Expr> = vec![head];
                    exprs.extend(args.iter());
                    let mut out = Vec::new();
                    for (mut p, mut vs) in self.seq(&exprs)? {
                        let clo = self.term_of(vs.remove(0), &mut p);
                        let v = self.apply_closure(clo, head_ty.clone(), vs, &mut p)?;
                        out.push((p, v));
                    }
                    Ok(out)
                }
            },
        }
    }

    /// `g a₁ … aₖ` for a top-level function `g`: a closure constructor when
    /// partial, a call otherwise (with any surplus arguments applied to the
    /// returned closure).
    fn apply_global(&mut self, g: &str, args: &[Expr]) -> Result<Vec<(Path, Val)>, EncodeError> {
        let (params, result) = self.prog.signature(g).unwrap().clone();
        let n = params.len();
        let exprs: Vec<&Expr> = args.iter().collect();
        let mut out = Vec::new();
        for (mut p, vs) in self.seq(&exprs)? {
            let mut terms = Vec::new();
            let mut rest = Vec::new();
            for (i, v) in vs.into_iter().enumerate() {
                if i < n {
                    terms.push(self.term_of(v, &mut p));
                } else {
                    rest.push(v);
                }
            }
            if terms.len() < n {
                let (_, ctor) = self
                    .info
                    .ctor_for(g, terms.len())
                    .ok_or_else(|| EncodeError::Unsupported(format!("no closure for {g}/{}", terms.len())))?;
                out.push((p, Val::Term(Term::Ctor(ctor.name.clone(), terms))));
            } else {
                let v = self.call(g.to_string(), terms, &result, &mut p);
                let v = if rest.is_empty() {
                    v
                } else {
                    let clo = self.term_of(v, &mut p);
                    self.apply_closure(clo, result.clone(), rest, &mut p)?
                };
                out.push((p, v));
            }
        }
        Ok(out)
    }

    fn binop(&mut self, op: BinOp, operand_ty: &Type, x: Val, y: Val) -> Result<Val, EncodeError> {
        let cmp = |op| -> Result<Val, EncodeError> {
            Ok(Val::Form(Formula::cmp(&Self::to_lin(x.clone())?, op, &Self::to_lin(y.clone())?)))
        };
        match op {
            BinOp::Add => Ok(Val::Term(Term::Int(Self::to_lin(x)?.add(&Self::to_lin(y)?)))),
            BinOp::Sub => Ok(Val::Term(Term::Int(Self::to_lin(x)?.sub(&Self::to_lin(y)?)))),
            BinOp::Lt => cmp(CmpOp::Lt),
            BinOp::Le => cmp(CmpOp::Le),
            BinOp::Gt => cmp(CmpOp::Gt),
            BinOp::Ge => cmp(CmpOp::Ge),
            BinOp::Eq | BinOp::Ne => {
                let positive = op == BinOp::Eq;
                let f = match operand_ty {
                    Type::Int => {
                        let c = if positive { CmpOp::Eq } else { CmpOp::Ne };
                        Formula::cmp(&Self::to_lin(x)?, c, &Self::to_lin(y)?)
                    }
                    Type::Bool => {
                        let f = Formula::iff(Self::to_form(x), Self::to_form(y));
                        if positive {
                            f
                        } else {
                            f.negate()
                        }
                    }
                    Type::Unit => Formula::from_bool(positive),
                    Type::Arrow(..) => return Err(EncodeError::Unsupported("equality on closures".into())),
                };
                Ok(Val::Form(f))
            }
            BinOp::And => Ok(Val::Form(Formula::and([Self::to_form(x), Self::to_form(y)]))),
            BinOp::Or => Ok(Val::Form(Formula::or([Self::to_form(x), Self::to_form(y)]))),
            BinOp::Implies => Ok(Val::Form(Formula::implies(Self::to_form(x), Self::to_form(y)))),
        }
    }
}

/// Removes Bool variables that occur exactly once, as a top-level literal of
/// the constraint (a nondeterministic choice that was already branched on).
fn drop_lone_bool_literals(c: &Clause) -> Clause {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut all = Vec::new();
    for a in c.atoms() {
        let mut vs = Vec::new();
        a.collect_vars(&mut vs);
        all.extend(vs);
    }
    fn count_formula(f: &Formula, out: &mut BTreeMap<String, usize>) {
        match f {
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| count_formula(p, out)),
            other => other.vars().into_iter().for_each(|v| *out.entry(v).or_default() += 1),
        }
    }
    for v in all {
        *counts.entry(v).or_default() += 1;
    }
    count_formula(&c.constraint, &mut counts);
    let kept: Vec<Formula> = c
        .constraint
        .conjuncts()
        .into_iter()
        .filter(|f| !matches!(f, Formula::Bool(v, _) if counts.get(v) == Some(&1)))
        .collect();
    let mut out = c.clone();
    out.constraint = Formula::and(kept);
    out.refresh_vars(&BTreeMap::new());
    out
}

fn function_clauses(
    prog: &TypedProgram,
    info: &ClosureInfo,
    b: &Binding,
    sig: &(Vec<Type>, Type),
) -> Result<Vec<Clause>, EncodeError> {
    let mut cx = Ctx::new(prog, info, b, &sig.0);
    let paths = cx.compile(&b.body)?;
    let mut clauses = Vec::new();
    for (mut p, v) in paths {
        let body_atoms = std::mem::take(&mut p.atoms);
        let constraint = Formula::and(p.constraint.clone());
        if constraint == Formula::False {
            continue;
        }
        let head = match b.kind {
            BindingKind::Function => {
                let mut args: Vec<Term> = b.params.iter().map(|x| Term::var_of(x.clone(), &cx.sorts[x])).collect();
                args.push(cx.term_of(v, &mut p));
                let ok = Formula::and(p.oks.clone());
                let ok_term = match ok {
                    Formula::True => Term::Bool(true),
                    Formula::Bool(x, true) => Term::Var(x),
                    f => {
                        let o = cx.fresh_plain("ok", Sort::Bool);
                        p.constraint.push(Formula::iff(Formula::bool_var(o.clone(), true), f));
                        Term::Var(o)
                    }
                };
                args.push(ok_term);
                Head::Pred(PredApp::new(b.name.clone(), args))
            }
            BindingKind::Assertion => {
                let mut good = p.oks.clone();
                good.push(Ctx::to_form(v));
                p.constraint.push(Formula::and(good).negate());
                Head::False
            }
        };
        let c = Clause::build(&cx.sorts, body_atoms, Formula::and(p.constraint), head);
        if c.constraint != Formula::False {
            clauses.push(drop_lone_bool_literals(&c));
        }
    }
    Ok(clauses)
}

/// Canonical encoding: every function `f` becomes `f(args…, result, ok)`,
/// every closure datatype gets an evaluator with one clause per constructor,
/// entry points (functions no other binding refers to) get the goal
/// `f(args…, r, false) → false`, and top-level assertions become goals.
pub fn encode_canonical(prog: &TypedProgram) -> Result<HornSystem, EncodeError> {
    let info = collect_closures(prog)?;
    let mut sys = HornSystem::new();
    for adt in &info.adts {
        sys.datatypes.push(Datatype {
            name: adt.name.clone(),
            ctors: adt.ctors.iter().map(|c| Constructor { name: c.name.clone(), fields: c.fields.clone() }).collect(),
        });
    }
    let functions: Vec<(&Binding, &(Vec<Type>, Type))> =
        prog.program.bindings.iter().zip(&prog.signatures).filter(|(b, _)| b.kind == BindingKind::Function).collect();
    for (b, (params, result)) in &functions {
        let mut sorts: Vec<Sort> = params.iter().map(|t| info.sort_of(t)).collect();
        sorts.push(info.sort_of(result));
        sorts.push(Sort::Bool);
        sys.preds.push(PredDecl { name: b.name.clone(), sorts, ok_flag: true });
    }
    for adt in &info.adts {
        sys.preds.push(PredDecl {
            name: info.evaluator(adt),
            sorts: vec![
                Sort::Adt(adt.name.clone()),
                info.sort_of(adt.domain()),
                info.sort_of(adt.codomain()),
                Sort::Bool,
            ],
            ok_flag: true,
        });
    }

    for (b, sig) in prog.program.bindings.iter().zip(&prog.signatures) {
        sys.clauses.extend(function_clauses(prog, &info, b, sig)?);
    }
    for adt in &info.adts {
        for ctor in &adt.ctors {
            sys.clauses.push(evaluator_clause(prog, &info, adt, ctor));
        }
    }

    let mut referenced: BTreeSet<&str> = BTreeSet::new();
    for b in &prog.program.bindings {
        b.body.walk(&mut |e| {
            if let ExprKind::Var(v) = &e.kind {
                if v != &b.name && !b.params.contains(v) {
                    referenced.insert(v.as_str());
                }
            }
        });
    }
    for (b, (params, result)) in &functions {
        if referenced.contains(b.name.as_str()) {
            continue;
        }
        let mut sorts = BTreeMap::new();
        let mut args = Vec::new();
        for (x, t) in b.params.iter().zip(params) {
            sorts.insert(x.clone(), info.sort_of(t));
            args.push(Term::var_of(x.clone(), &info.sort_of(t)));
        }
        let mut r = "r".to_string();
        while sorts.contains_key(&r) {
            r.push('_');
        }
        sorts.insert(r.clone(), info.sort_of(result));
        args.push(Term::var_of(r, &info.sort_of(result)));
        args.push(Term::Bool(false));
        sys.clauses.push(Clause::build(&sorts, vec![PredApp::new(b.name.clone(), args)], Formula::True, Head::False));
    }
    sys.record(Step::note("encode", "canonical encoding"));
    Ok(sys)
}

fn evaluator_clause(
    prog: &TypedProgram,
    info: &ClosureInfo,
    adt: &super::closures::ClosureAdt,
    ctor: &super::closures::ClosureCtor,
) -> Clause {
    let b = prog.program.binding(&ctor.function).unwrap();
    let (params, result) = prog.signature(&ctor.function).unwrap();
    let m = ctor.captured;
    let mut sorts = BTreeMap::new();
    let mut caps = Vec::new();
    for (x, t) in b.params[..m].iter().zip(params) {
        sorts.insert(x.clone(), info.sort_of(t));
        caps.push(Term::var_of(x.clone(), &info.sort_of(t)));
    }
    let fresh = |base: &str, sorts: &BTreeMap<String, Sort>| {
        let mut n = base.to_string();
        while sorts.contains_key(&n) {
            n.push('\'');
        }
        n
    };
    let dom = info.sort_of(adt.domain());
    let arg = if dom == Sort::Unit {
        Term::Unit
    } else {
        let a = fresh(&b.params[m], &sorts);
        sorts.insert(a.clone(), dom.clone());
        Term::var_of(a, &dom)
    };
    let clo = Term::Ctor(ctor.name.clone(), caps.clone());
    let ev = info.evaluator(adt);
    if m + 1 == b.params.len() {
        let r = fresh("r", &sorts);
        sorts.insert(r.clone(), info.sort_of(result));
        let ok = fresh("ok", &sorts);
        sorts.insert(ok.clone(), Sort::Bool);
        let rt = Term::var_of(r, &info.sort_of(result));
        let mut fargs = caps;
        fargs.push(arg.clone());
        fargs.push(rt.clone());
        fargs.push(Term::Var(ok.clone()));
        Clause::build(
            &sorts,
            vec![PredApp::new(ctor.function.clone(), fargs)],
            Formula::True,
            Head::Pred(PredApp::new(ev, vec![clo, arg, rt, Term::Var(ok)])),
        )
    } else {
        let (_, next) = info.ctor_for(&ctor.function, m + 1).unwrap();
        let mut next_args = caps;
        next_args.push(arg.clone());
        let next_clo = Term::Ctor(next.name.clone(), next_args);
        Clause::build(
            &sorts,
            vec![],
            Formula::True,
            Head::Pred(PredApp::new(ev, vec![clo, arg, next_clo, Term::Bool(true)])),
        )
    }
}
