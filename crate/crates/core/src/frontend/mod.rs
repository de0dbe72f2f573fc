//! Parser, type inference and normalization for the `.hof` language: an
//! OCaml-like, simply typed language of top-level curried functions over
//! integers, booleans and unit, with `assert`, `if` and the nondeterministic
//! boolean `*`.

mod normalize;
mod parse;
mod typeck;

use std::fmt;

use thiserror::Error;

pub use normalize::normalize;
pub use parse::parse;
pub use typeck::infer_types;

/// Line/column position (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub type ExprId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "=",
            BinOp::Ne => "<>",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "=>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Int(i128),
    Bool(bool),
    Unit,
    Var(String),
    /// The nondeterministic boolean `*`.
    Nondet,
    /// A named nondeterministic choice introduced by normalization.
    Oracle(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Application of a function to one or more arguments.
    App(Box<Expr>, Vec<Expr>),
    Assert(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    pub id: ExprId,
    pub pos: Pos,
    pub kind: ExprKind,
}

impl Expr {
    /// Visits the expression and its subexpressions in pre-order.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Neg(e) | ExprKind::Not(e) | ExprKind::Assert(e) => e.walk(f),
            ExprKind::Bin(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            ExprKind::If(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
            ExprKind::App(head, args) => {
                head.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BindingKind {
    /// `let name params = body`
    Function,
    /// Top-level `assert e`; `params` are the free variables of `e`.
    Assertion,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub name: String,
    pub kind: BindingKind,
    pub params: Vec<String>,
    pub body: Expr,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurfaceProgram {
    pub bindings: Vec<Binding>,
    /// Number of expression ids handed out.
    pub next_id: usize,
}

impl SurfaceProgram {
    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().find(|b| b.name == name && b.kind == BindingKind::Function)
    }

    pub fn functions(&self) -> impl Iterator<Item = &Binding> {
        self.bindings.iter().filter(|b| b.kind == BindingKind::Function)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Int,
    Bool,
    Unit,
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn arrow(from: Type, to: Type) -> Type {
        Type::Arrow(Box::new(from), Box::new(to))
    }

    /// `a₁ → … → aₙ → r` from parameter types and result.
    pub fn curried(params: &[Type], result: Type) -> Type {
        params.iter().rev().fold(result, |acc, p| Type::arrow(p.clone(), acc))
    }

    /// Splits off the first `n` argument types.
    pub fn uncurry(&self, n: usize) -> Option<(Vec<Type>, Type)> {
        let mut args = Vec::new();
        let mut t = self;
        for _ in 0..n {
            match t {
                Type::Arrow(a, b) => {
                    args.push((**a).clone());
                    t = b;
                }
                _ => return None,
            }
        }
        Some((args, t.clone()))
    }

    pub fn is_arrow(&self) -> bool {
        matches!(self, Type::Arrow(..))
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => write!(f, "Int"),
            Type::Bool => write!(f, "Bool"),
            Type::Unit => write!(f, "Unit"),
            Type::Arrow(a, b) if a.is_arrow() => write!(f, "({a}) → {b}"),
            Type::Arrow(a, b) => write!(f, "{a} → {b}"),
        }
    }
}

/// A program with a type on every binder and subexpression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedProgram {
    pub program: SurfaceProgram,
    /// Indexed by `ExprId`.
    pub expr_types: Vec<Type>,
    /// Per binding: parameter types and result type.
    pub signatures: Vec<(Vec<Type>, Type)>,
    /// Ids of `assert` expressions, in source order.
    pub assertion_sites: Vec<ExprId>,
}

impl TypedProgram {
    pub fn type_of(&self, e: &Expr) -> &Type {
        &self.expr_types[e.id]
    }

    pub fn signature(&self, name: &str) -> Option<&(Vec<Type>, Type)> {
        let i = self.program.bindings.iter().position(|b| b.name == name && b.kind == BindingKind::Function)?;
        Some(&self.signatures[i])
    }

    /// Full curried type of a top-level function.
    pub fn function_type(&self, name: &str) -> Option<Type> {
        self.signature(name).map(|(ps, r)| Type::curried(ps, r.clone()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrontendError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: duplicate top-level name {name}")]
    DuplicateName { pos: Pos, name: String },
    #[error("{pos}: duplicate parameter {name}")]
    DuplicateParam { pos: Pos, name: String },
    #[error("{pos}: unbound variable {name}")]
    Unbound { pos: Pos, name: String },
    #[error("{pos}: type mismatch: expected {expected}, found {found}")]
    Mismatch { pos: Pos, expected: String, found: String },
    #[error("{pos}: occurs check failed: {var} occurs in {ty}")]
    Occurs { pos: Pos, var: String, ty: String },
    #[error("{pos}: {name} is used at {first} and at {second}; polymorphism is not supported")]
    Polymorphic { pos: Pos, name: String, first: String, second: String },
    #[error("{pos}: equality on function values is not supported")]
    FunctionEquality { pos: Pos },
}
