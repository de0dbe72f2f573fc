use std::collections::{BTreeMap, BTreeSet};

use super::EncodeError;
use crate::frontend::{BindingKind, Expr, ExprKind, Type, TypedProgram};
use crate::horn::Sort;

/// One partial-application shape: `function` applied to `captured` arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosureCtor {
    pub name: String,
    pub function: String,
    pub captured: usize,
    pub fields: Vec<Sort>,
}

/// Closure datatype for one arrow type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClosureAdt {
    pub name: String,
    pub ty: Type,
    pub ctors: Vec<ClosureCtor>,
}

impl ClosureAdt {
    pub fn domain(&self) -> &Type {
        match &self.ty {
            Type::Arrow(a, _) => a,
            _ => unreachable!("closure type is an arrow"),
        }
    }

    pub fn codomain(&self) -> &Type {
        match &self.ty {
            Type::Arrow(_, b) => b,
            _ => unreachable!("closure type is an arrow"),
        }
    }

    /// Name of the evaluator relation for this datatype.
    pub fn evaluator(&self, single: bool) -> String {
        if single {
            "Ev".to_string()
        } else {
            format!("Ev_{}", self.name)
        }
    }
}

/// All closure datatypes of a program, with lookups by type and shape.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosureInfo {
    pub adts: Vec<ClosureAdt>,
}

impl ClosureInfo {
    pub fn adt_for(&self, ty: &Type) -> Option<&ClosureAdt> {
        self.adts.iter().find(|a| a.ty == *ty)
    }

    pub fn ctor_for(&self, function: &str, captured: usize) -> Option<(&ClosureAdt, &ClosureCtor)> {
        self.adts
            .iter()
            .find_map(|a| a.ctors.iter().find(|c| c.function == function && c.captured == captured).map(|c| (a, c)))
    }

    pub fn evaluator(&self, adt: &ClosureAdt) -> String {
        adt.evaluator(self.adts.len() == 1)
    }

    pub fn sort_of(&self, ty: &Type) -> Sort {
        match ty {
            Type::Int => Sort::Int,
            Type::Bool => Sort::Bool,
            Type::Unit => Sort::Unit,
            Type::Arrow(..) => Sort::Adt(self.adt_for(ty).map(|a| a.name.clone()).unwrap_or_else(|| format!("<{ty}>"))),
        }
    }
}

fn arity(p: &TypedProgram, name: &str) -> Option<usize> {
    p.program.binding(name).map(|b| b.params.len())
}

fn is_global(p: &TypedProgram, locals: &[String], name: &str) -> bool {
    !locals.iter().any(|l| l == name) && p.program.binding(name).is_some()
}

fn shapes_in(p: &TypedProgram, e: &Expr, locals: &[String], out: &mut BTreeSet<(String, usize)>) {
    match &e.kind {
        ExprKind::Var(v) if is_global(p, locals, v) => {
            if arity(p, v).unwrap() > 0 {
                out.insert((v.clone(), 0));
            }
        }
        ExprKind::App(head, args) => {
            match &head.kind {
                ExprKind::Var(v) if is_global(p, locals, v) => {
                    let n = arity(p, v).unwrap();
                    if args.len() < n {
                        out.insert((v.clone(), args.len()));
                    }
                }
                _ => shapes_in(p, head, locals, out),
            }
            for a in args {
                shapes_in(p, a, locals, out);
            }
        }
        ExprKind::Neg(a) | ExprKind::Not(a) | ExprKind::Assert(a) => shapes_in(p, a, locals, out),
        ExprKind::Bin(_, a, b) => {
            shapes_in(p, a, locals, out);
            shapes_in(p, b, locals, out);
        }
        ExprKind::If(c, t, f) => {
            shapes_in(p, c, locals, out);
            shapes_in(p, t, locals, out);
            shapes_in(p, f, locals, out);
        }
        _ => {}
    }
}

fn arrows_in(t: &Type, out: &mut BTreeSet<Type>) {
    if let Type::Arrow(a, b) = t {
        out.insert(t.clone());
        arrows_in(a, out);
        arrows_in(b, out);
    }
}

/// One datatype per arrow type that occurs as a value, with a constructor per
/// partial-application shape of that type. Datatypes are named `clo` when
/// there is only one, otherwise `clo1…` ordered by their first constructor.
pub fn collect_closures(p: &TypedProgram) -> Result<ClosureInfo, EncodeError> {
    let mut shapes = BTreeSet::new();
    for b in &p.program.bindings {
        shapes_in(p, &b.body, &b.params, &mut shapes);
    }
    // Applying a closure to one more argument yields the next shape.
    let mut work: Vec<(String, usize)> = shapes.iter().cloned().collect();
    while let Some((g, m)) = work.pop() {
        if m + 1 < arity(p, &g).unwrap() && shapes.insert((g.clone(), m + 1)) {
            work.push((g, m + 1));
        }
    }

    let mut needed = BTreeSet::new();
    for (b, (params, result)) in p.program.bindings.iter().zip(&p.signatures) {
        if b.kind == BindingKind::Function {
            params.iter().chain([result]).for_each(|t| arrows_in(t, &mut needed));
        }
    }
    let mut by_type: BTreeMap<Type, Vec<(String, usize)>> = BTreeMap::new();
    for (g, m) in &shapes {
        let (params, _) = p.signature(g).unwrap();
        let ty = p.function_type(g).unwrap().uncurry(*m).unwrap().1;
        arrows_in(&ty, &mut needed);
        params[..*m].iter().for_each(|t| arrows_in(t, &mut needed));
        by_type.entry(ty).or_default().push((g.clone(), *m));
    }
    if let Some(t) = needed.iter().find(|t| !by_type.contains_key(*t)) {
        return Err(EncodeError::UninhabitedClosureType(t.clone()));
    }

    let mut per_function: BTreeMap<&str, usize> = BTreeMap::new();
    for (g, _) in &shapes {
        *per_function.entry(g.as_str()).or_default() += 1;
    }
    let ctor_name = |g: &str, m: usize| if per_function[g] == 1 { g.to_string() } else { format!("{g}_{m}") };

    let mut groups: Vec<(Type, Vec<(String, usize)>)> = by_type.into_iter().collect();
    for (_, cs) in &mut groups {
        cs.sort_by_key(|(g, m)| ctor_name(g, *m));
    }
    groups.sort_by_key(|(_, cs)| ctor_name(&cs[0].0, cs[0].1));
    let single = groups.len() == 1;
    let names: BTreeMap<Type, String> = groups
        .iter()
        .enumerate()
        .map(|(i, (t, _))| (t.clone(), if single { "clo".to_string() } else { format!("clo{}", i + 1) }))
        .collect();
    let sort_of = |t: &Type| match t {
        Type::Int => Sort::Int,
        Type::Bool => Sort::Bool,
        Type::Unit => Sort::Unit,
        Type::Arrow(..) => Sort::Adt(names[t].clone()),
    };
    let adts = groups
        .iter()
        .map(|(ty, cs)| ClosureAdt {
            name: names[ty].clone(),
            ty: ty.clone(),
            ctors: cs
                .iter()
                .map(|(g, m)| ClosureCtor {
                    name: ctor_name(g, *m),
                    function: g.clone(),
                    captured: *m,
                    fields: p.signature(g).unwrap().0[..*m].iter().map(sort_of).collect(),
                })
                .collect(),
        })
        .collect();
    Ok(ClosureInfo { adts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{infer_types, normalize, parse};

    fn info(src: &str) -> ClosureInfo {
        collect_closures(&normalize(&infer_types(&parse(src).unwrap()).unwrap())).unwrap()
    }

    fn show(i: &ClosureInfo) -> Vec<String> {
        i.adts
            .iter()
            .map(|a| {
                let cs: Vec<String> = a
                    .ctors
                    .iter()
                    .map(|c| {
                        let fs: Vec<String> = c.fields.iter().map(|s| s.to_string()).collect();
                        format!("{}({})", c.name, fs.join(","))
                    })
                    .collect();
                format!("{} ::= {}", a.name, cs.join(" | "))
            })
            .collect()
    }

    #[test]
    fn first_order_has_none() {
        assert!(info("let mc x = if x > 100 then x - 10 else mc (mc (x + 11))").adts.is_empty());
    }

    #[test]
    fn curried_shapes_chain() {
        let i = info("let add3 a b c = a + b + c\nlet use k = k 3\nlet main x = use (add3 x 1)");
        assert_eq!(show(&i), vec!["clo ::= add3(Int,Int)"]);
        let j = info("let add a b = a + b\nlet twice f x = f (f x)\nlet main n = twice (add n) 0");
        assert_eq!(show(&j), vec!["clo ::= add(Int)"]);
    }

    #[test]
    fn uninhabited_type_rejected() {
        let p = normalize(&infer_types(&parse("let apply f x = f x + 1").unwrap()).unwrap());
        assert!(matches!(collect_closures(&p), Err(EncodeError::UninhabitedClosureType(_))));
    }
}
