use std::collections::BTreeMap;

use super::{BinOp, BindingKind, Expr, ExprKind, FrontendError, Pos, SurfaceProgram, Type, TypedProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Ty {
    Var(usize),
    Int,
    Bool,
    Unit,
    Arrow(Box<Ty>, Box<Ty>),
}

fn arrow(a: Ty, b: Ty) -> Ty {
    Ty::Arrow(Box::new(a), Box::new(b))
}

enum UnifyError {
    Mismatch,
    Occurs(usize, Ty),
}

#[derive(Default)]
struct Infer {
    vars: Vec<Option<Ty>>,
    expr_tys: Vec<Option<Ty>>,
    equalities: Vec<(Pos, Ty)>,
}

impl Infer {
    fn fresh(&mut self) -> Ty {
        self.vars.push(None);
        Ty::Var(self.vars.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.vars[*v] {
                Some(t) => self.resolve(t),
                None => t.clone(),
            },
            Ty::Arrow(a, b) => arrow(self.resolve(a), self.resolve(b)),
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => v == w,
            Ty::Arrow(a, b) => self.occurs(v, &a) || self.occurs(v, &b),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), UnifyError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(UnifyError::Occurs(*x, t.clone()));
                }
                self.vars[*x] = Some(t.clone());
                Ok(())
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ if a == b => Ok(()),
            _ => Err(UnifyError::Mismatch),
        }
    }

    fn show(&self, t: &Ty) -> String {
        fn go(t: &Ty, out: &mut String) {
            match t {
                Ty::Var(v) => out.push_str(&format!("'t{v}")),
                Ty::Int => out.push_str("Int"),
                Ty::Bool => out.push_str("Bool"),
                Ty::Unit => out.push_str("Unit"),
                Ty::Arrow(a, b) => {
                    if matches!(**a, Ty::Arrow(..)) {
                        out.push('(');
                        go(a, out);
                        out.push(')');
                    } else {
                        go(a, out);
                    }
                    out.push_str(" → ");
                    go(b, out);
                }
            }
        }
        let mut s = String::new();
        go(&self.resolve(t), &mut s);
        s
    }

    fn unify_at(&mut self, pos: Pos, expected: &Ty, found: &Ty) -> Result<(), FrontendError> {
        match self.unify(expected, found) {
            Ok(()) => Ok(()),
            Err(UnifyError::Mismatch) => {
                Err(FrontendError::Mismatch { pos, expected: self.show(expected), found: self.show(found) })
            }
            Err(UnifyError::Occurs(v, t)) => {
                Err(FrontendError::Occurs { pos, var: format!("'t{v}"), ty: self.show(&t) })
            }
        }
    }

    fn infer(
        &mut self,
        e: &Expr,
        locals: &BTreeMap<String, Ty>,
        globals: &BTreeMap<String, Ty>,
    ) -> Result<Ty, FrontendError> {
        let t = match &e.kind {
            ExprKind::Int(_) => Ty::Int,
            ExprKind::Bool(_) | ExprKind::Nondet | ExprKind::Oracle(_) => Ty::Bool,
            ExprKind::Unit => Ty::Unit,
            ExprKind::Var(v) => locals
                .get(v)
                .or_else(|| globals.get(v))
                .cloned()
                .ok_or_else(|| FrontendError::Unbound { pos: e.pos, name: v.clone() })?,
            ExprKind::Neg(a) => {
                let ta = self.infer(a, locals, globals)?;
                self.unify_at(a.pos, &Ty::Int, &ta)?;
                Ty::Int
            }
            ExprKind::Not(a) => {
                let ta = self.infer(a, locals, globals)?;
                self.unify_at(a.pos, &Ty::Bool, &ta)?;
                Ty::Bool
            }
            ExprKind::Assert(a) => {
                let ta = self.infer(a, locals, globals)?;
                self.unify_at(a.pos, &Ty::Bool, &ta)?;
                Ty::Unit
            }
            ExprKind::Bin(op, a, b) => {
                let ta = self.infer(a, locals, globals)?;
                let tb = self.infer(b, locals, globals)?;
                match op {
                    BinOp::Add | BinOp::Sub => {
                        self.unify_at(a.pos, &Ty::Int, &ta)?;
                        self.unify_at(b.pos, &Ty::Int, &tb)?;
                        Ty::Int
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        self.unify_at(a.pos, &Ty::Int, &ta)?;
                        self.unify_at(b.pos, &Ty::Int, &tb)?;
                        Ty::Bool
                    }
                    BinOp::Eq | BinOp::Ne => {
                        self.unify_at(b.pos, &ta, &tb)?;
                        self.equalities.push((e.pos, ta));
                        Ty::Bool
                    }
                    BinOp::And | BinOp::Or | BinOp::Implies => {
                        self.unify_at(a.pos, &Ty::Bool, &ta)?;
                        self.unify_at(b.pos, &Ty::Bool, &tb)?;
                        Ty::Bool
                    }
                }
            }
            ExprKind::If(c, t, f) => {
                let tc = self.infer(c, locals, globals)?;
                self.unify_at(c.pos, &Ty::Bool, &tc)?;
                let tt = self.infer(t, locals, globals)?;
                let tf = self.infer(f, locals, globals)?;
                self.unify_at(f.pos, &tt, &tf)?;
                tt
            }
            ExprKind::App(head, args) => {
                let th = self.infer(head, locals, globals)?;
                let mut targs = Vec::new();
                for a in args {
                    targs.push(self.infer(a, locals, globals)?);
                }
                let result = self.fresh();
                let want = targs.iter().rev().fold(result.clone(), |acc, t| arrow(t.clone(), acc));
                let global_name = match &head.kind {
                    ExprKind::Var(v) if !locals.contains_key(v) => Some(v.clone()),
                    _ => None,
                };
                match self.unify(&th, &want) {
                    Ok(()) => {}
                    Err(UnifyError::Mismatch)
                        if global_name.is_some() && matches!(self.resolve(&th), Ty::Arrow(..)) =>
                    {
                        return Err(FrontendError::Polymorphic {
                            pos: e.pos,
                            name: global_name.unwrap(),
                            first: self.show(&th),
                            second: self.show(&want),
                        });
                    }
                    Err(_) => self.unify_at(e.pos, &th, &want)?,
                }
                result
            }
        };
        self.expr_tys[e.id] = Some(t.clone());
        Ok(t)
    }
}

fn finish(t: &Ty) -> Type {
    match t {
        Ty::Var(_) | Ty::Int => Type::Int,
        Ty::Bool => Type::Bool,
        Ty::Unit => Type::Unit,
        Ty::Arrow(a, b) => Type::arrow(finish(a), finish(b)),
    }
}

/// Monomorphic type inference over the whole program. Top-level functions may
/// be mutually recursive; type variables left unconstrained default to `Int`.
pub fn infer_types(program: &SurfaceProgram) -> Result<TypedProgram, FrontendError> {
    let mut inf = Infer { expr_tys: vec![None; program.next_id], ..Default::default() };
    let mut sigs = Vec::new();
    let mut globals = BTreeMap::new();
    for b in &program.bindings {
        let params: Vec<Ty> = b.params.iter().map(|_| inf.fresh()).collect();
        let result = if b.kind == BindingKind::Assertion { Ty::Bool } else { inf.fresh() };
        if b.kind == BindingKind::Function {
            let full = params.iter().rev().fold(result.clone(), |acc, t| arrow(t.clone(), acc));
            globals.insert(b.name.clone(), full);
        }
        sigs.push((params, result));
    }
    for (b, (params, result)) in program.bindings.iter().zip(&sigs) {
        let locals: BTreeMap<String, Ty> = b.params.iter().cloned().zip(params.iter().cloned()).collect();
        let t = inf.infer(&b.body, &locals, &globals)?;
        inf.unify_at(b.body.pos, result, &t)?;
    }
    for (pos, t) in &inf.equalities {
        if matches!(inf.resolve(t), Ty::Arrow(..)) {
            return Err(FrontendError::FunctionEquality { pos: *pos });
        }
    }
    let expr_types =
        inf.expr_tys.iter().map(|t| t.as_ref().map(|t| finish(&inf.resolve(t))).unwrap_or(Type::Int)).collect();
    let signatures = sigs
        .iter()
        .map(|(ps, r)| (ps.iter().map(|p| finish(&inf.resolve(p))).collect(), finish(&inf.resolve(r))))
        .collect();
    let mut assertion_sites = Vec::new();
    for b in &program.bindings {
        b.body.walk(&mut |e| {
            if matches!(e.kind, ExprKind::Assert(_)) {
                assertion_sites.push(e.id);
            }
        });
    }
    Ok(TypedProgram { program: program.clone(), expr_types, signatures, assertion_sites })
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn types(src: &str) -> TypedProgram {
        infer_types(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn higher_order_example() {
        let t = types("let h x u = x\nlet f a b = assert (a () <= b ())\nlet main n = f (h n) (h (n + 1))");
        assert_eq!(t.function_type("h").unwrap().to_string(), "Int → Unit → Int");
        assert_eq!(t.function_type("f").unwrap().to_string(), "(Unit → Int) → (Unit → Int) → Unit");
        assert_eq!(t.function_type("main").unwrap().to_string(), "Int → Unit");
    }

    #[test]
    fn unconstrained_defaults_to_int() {
        let t = types("let id x = x");
        assert_eq!(t.function_type("id").unwrap().to_string(), "Int → Int");
    }

    #[test]
    fn polymorphic_use_rejected() {
        let r = infer_types(&parse("let id x = x\nlet g y = if id true then id 1 else 0").unwrap());
        match r {
            Err(FrontendError::Polymorphic { name, .. }) => assert_eq!(name, "id"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn occurs_check() {
        let r = infer_types(&parse("let f x = x x").unwrap());
        assert!(matches!(r, Err(FrontendError::Occurs { .. })), "{r:?}");
    }

    #[test]
    fn function_equality_rejected() {
        let r = infer_types(&parse("let f x = x\nlet g y = f = f").unwrap());
        assert!(matches!(r, Err(FrontendError::FunctionEquality { .. })), "{r:?}");
    }

    #[test]
    fn assertion_sites_enumerated() {
        let t = types("let f x = assert (x > 0)\nlet g y = if y > 0 then assert (y > 1) else f y");
        assert_eq!(t.assertion_sites.len(), 2);
    }
}
