use super::{Expr, ExprKind, TypedProgram};

fn rewrite(e: &Expr, params: &[String], counter: &mut usize) -> Expr {
    let kind = match &e.kind {
        ExprKind::Nondet => {
            let mut name = format!("nd{}", *counter);
            *counter += 1;
            while params.contains(&name) {
                name.push('_');
            }
            ExprKind::Oracle(name)
        }
        ExprKind::Neg(a) => ExprKind::Neg(Box::new(rewrite(a, params, counter))),
        ExprKind::Not(a) => ExprKind::Not(Box::new(rewrite(a, params, counter))),
        ExprKind::Assert(a) => ExprKind::Assert(Box::new(rewrite(a, params, counter))),
        ExprKind::Bin(op, a, b) => {
            ExprKind::Bin(*op, Box::new(rewrite(a, params, counter)), Box::new(rewrite(b, params, counter)))
        }
        ExprKind::If(c, t, f) => ExprKind::If(
            Box::new(rewrite(c, params, counter)),
            Box::new(rewrite(t, params, counter)),
            Box::new(rewrite(f, params, counter)),
        ),
        ExprKind::App(head, args) => {
            let head = rewrite(head, params, counter);
            let mut args: Vec<Expr> = args.iter().map(|a| rewrite(a, params, counter)).collect();
            // (f a) b  ==>  f a b
            match head.kind {
                ExprKind::App(inner, mut first) => {
                    first.append(&mut args);
                    ExprKind::App(inner, first)
                }
                _ => ExprKind::App(Box::new(head), args),
            }
        }
        k => k.clone(),
    };
    Expr { id: e.id, pos: e.pos, kind }
}

/// Flattens nested applications so each call site names its head and full
/// argument list, replaces every `*` by a fresh named boolean oracle scoped to
/// its binding, and re-enumerates assertion sites. Idempotent.
pub fn normalize(program: &TypedProgram) -> TypedProgram {
    let mut out = program.clone();
    for b in &mut out.program.bindings {
        let mut used = Vec::new();
        b.body.walk(&mut |e| {
            if let ExprKind::Oracle(n) = &e.kind {
                used.push(n.clone());
            }
        });
        let mut counter = used.len();
        let mut taken = b.params.clone();
        taken.extend(used);
        b.body = rewrite(&b.body, &taken, &mut counter);
    }
    out.assertion_sites.clear();
    for b in &out.program.bindings {
        b.body.walk(&mut |e| {
            if matches!(e.kind, ExprKind::Assert(_)) {
                out.assertion_sites.push(e.id);
            }
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{infer_types, parse};
    use super::*;

    #[test]
    fn flattens_and_names_oracles() {
        let t = infer_types(&parse("let f x y = x + y\nlet g z = if * then (f z) 1 else 0").unwrap()).unwrap();
        let n = normalize(&t);
        let mut oracles = 0;
        let mut apps = Vec::new();
        n.program.bindings[1].body.walk(&mut |e| match &e.kind {
            ExprKind::Oracle(_) => oracles += 1,
            ExprKind::Nondet => panic!("nondet left"),
            ExprKind::App(h, args) => apps.push((h.kind.clone(), args.len())),
            _ => {}
        });
        assert_eq!(oracles, 1);
        assert_eq!(apps, vec![(ExprKind::Var("f".into()), 2)]);
    }

    #[test]
    fn idempotent() {
        let t = infer_types(&parse("let g z = if * then (if * then z else 1) else 0").unwrap()).unwrap();
        let once = normalize(&t);
        assert_eq!(normalize(&once), once);
    }
}
