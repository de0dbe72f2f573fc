use std::collections::BTreeSet;

use super::{BinOp, Binding, BindingKind, Expr, ExprKind, FrontendError, Pos, SurfaceProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i128),
    Ident(String),
    Let,
    Assert,
    If,
    Then,
    Else,
    Not,
    True,
    False,
    LParen,
    RParen,
    Star,
    Plus,
    Minus,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    AndAnd,
    OrOr,
    Implies,
    Eof,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => n.to_string(),
        Tok::Ident(s) => s.clone(),
        Tok::Eof => "end of input".into(),
        other => format!("{other:?}").to_lowercase(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, chars: &[char]| {
        if chars[*i] == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
        *i += 1;
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, &chars);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            continue;
        }
        // (* nested comments *)
        if c == '(' && chars.get(i + 1) == Some(&'*') && chars.get(i + 2) != Some(&')') {
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(FrontendError::Syntax { pos, msg: "unterminated comment".into() });
                }
                if chars[i] == '(' && chars.get(i + 1) == Some(&'*') {
                    depth += 1;
                    advance(&mut i, &mut line, &mut col, &chars);
                } else if chars[i] == '*' && chars.get(i + 1) == Some(&')') {
                    depth -= 1;
                    advance(&mut i, &mut line, &mut col, &chars);
                    if depth == 0 {
                        advance(&mut i, &mut line, &mut col, &chars);
                        break;
                    }
                }
                advance(&mut i, &mut line, &mut col, &chars);
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i128>()
                .map_err(|_| FrontendError::Syntax { pos, msg: format!("integer literal {text} out of range") })?;
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                advance(&mut i, &mut line, &mut col, &chars);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "let" => Tok::Let,
                "assert" => Tok::Assert,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "not" => Tok::Not,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word),
            };
            out.push((tok, pos));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok2 = match two.as_str() {
            "<=" => Some(Tok::Le),
            ">=" => Some(Tok::Ge),
            "<>" => Some(Tok::Ne),
            "&&" => Some(Tok::AndAnd),
            "||" => Some(Tok::OrOr),
            "=>" => Some(Tok::Implies),
            _ => None,
        };
        if let Some(t) = tok2 {
            advance(&mut i, &mut line, &mut col, &chars);
            advance(&mut i, &mut line, &mut col, &chars);
            out.push((t, pos));
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '=' => Tok::Eq,
            _ => return Err(FrontendError::Syntax { pos, msg: format!("unexpected character {c:?}") }),
        };
        advance(&mut i, &mut line, &mut col, &chars);
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    next_id: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<Pos, FrontendError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            Err(self.error(format!("expected {}, found {}", describe(&t), describe(self.peek()))))
        }
    }

    fn error(&self, msg: String) -> FrontendError {
        FrontendError::Syntax { pos: self.pos(), msg }
    }

    fn mk(&mut self, pos: Pos, kind: ExprKind) -> Expr {
        let id = self.next_id;
        self.next_id += 1;
        Expr { id, pos, kind }
    }

    fn ident(&mut self) -> Result<(String, Pos), FrontendError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => {
                Err(FrontendError::Syntax { pos: p, msg: format!("expected identifier, found {}", describe(&t)) })
            }
        }
    }

    // expr := 'if' expr 'then' expr 'else' expr | 'assert' expr | implies
    fn expr(&mut self) -> Result<Expr, FrontendError> {
        match self.peek() {
            Tok::If => {
                let p = self.bump().1;
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                Ok(self.mk(p, ExprKind::If(Box::new(c), Box::new(t), Box::new(e))))
            }
            Tok::Assert => {
                let p = self.bump().1;
                let e = self.expr()?;
                Ok(self.mk(p, ExprKind::Assert(Box::new(e))))
            }
            _ => self.implies(),
        }
    }

    fn tail_or(&mut self, f: fn(&mut Self) -> Result<Expr, FrontendError>) -> Result<Expr, FrontendError> {
        // `a && if c then x else y` and friends: prefix forms may end an operator chain.
        if matches!(self.peek(), Tok::If | Tok::Assert) {
            self.expr()
        } else {
            f(self)
        }
    }

    fn implies(&mut self) -> Result<Expr, FrontendError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            let p = self.bump().1;
            let rhs = self.tail_or(Self::implies)?;
            return Ok(self.mk(p, ExprKind::Bin(BinOp::Implies, Box::new(lhs), Box::new(rhs))));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            let p = self.bump().1;
            let rhs = self.tail_or(Self::and)?;
            lhs = self.mk(p, ExprKind::Bin(BinOp::Or, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::AndAnd {
            let p = self.bump().1;
            let rhs = self.tail_or(Self::not)?;
            lhs = self.mk(p, ExprKind::Bin(BinOp::And, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, FrontendError> {
        if *self.peek() == Tok::Not {
            let p = self.bump().1;
            let e = self.not()?;
            return Ok(self.mk(p, ExprKind::Not(Box::new(e))));
        }
        self.compare()
    }

    fn compare(&mut self) -> Result<Expr, FrontendError> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Eq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            _ => return Ok(lhs),
        };
        let p = self.bump().1;
        let rhs = self.additive()?;
        if matches!(self.peek(), Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::Eq | Tok::Ne) {
            return Err(self.error("comparisons do not chain; add parentheses".into()));
        }
        Ok(self.mk(p, ExprKind::Bin(op, Box::new(lhs), Box::new(rhs))))
    }

    fn additive(&mut self) -> Result<Expr, FrontendError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let p = self.bump().1;
            let rhs = self.unary()?;
            lhs = self.mk(p, ExprKind::Bin(op, Box::new(lhs), Box::new(rhs)));
        }
    }

    fn unary(&mut self) -> Result<Expr, FrontendError> {
        if *self.peek() == Tok::Minus {
            let p = self.bump().1;
            if let Tok::Int(n) = *self.peek() {
                self.bump();
                return Ok(self.mk(p, ExprKind::Int(-n)));
            }
            let e = self.unary()?;
            return Ok(self.mk(p, ExprKind::Neg(Box::new(e))));
        }
        self.application()
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Int(_) | Tok::Ident(_) | Tok::True | Tok::False | Tok::LParen | Tok::Star)
    }

    fn application(&mut self) -> Result<Expr, FrontendError> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            let p = head.pos;
            Ok(self.mk(p, ExprKind::App(Box::new(head), args)))
        }
    }

    fn atom(&mut self) -> Result<Expr, FrontendError> {
        let (t, p) = self.bump();
        let kind = match t {
            Tok::Int(n) => ExprKind::Int(n),
            Tok::Ident(s) => ExprKind::Var(s),
            Tok::True => ExprKind::Bool(true),
            Tok::False => ExprKind::Bool(false),
            Tok::Star => ExprKind::Nondet,
            Tok::LParen => {
                if *self.peek() == Tok::RParen {
                    self.bump();
                    ExprKind::Unit
                } else {
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(e);
                }
            }
            other => return Err(FrontendError::Syntax { pos: p, msg: format!("unexpected {}", describe(&other)) }),
        };
        Ok(self.mk(p, kind))
    }
}

/// Collects variables of `e` not bound by `bound`, in order of first occurrence.
fn free_vars(e: &Expr, bound: &BTreeSet<String>, out: &mut Vec<String>) {
    e.walk(&mut |x| {
        if let ExprKind::Var(v) = &x.kind {
            if !bound.contains(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
    });
}

/// Parses a program. Checks that names are unique and every variable is bound;
/// the free variables of a top-level `assert` become its parameters.
pub fn parse(src: &str) -> Result<SurfaceProgram, FrontendError> {
    let mut p = Parser { toks: lex(src)?, at: 0, next_id: 0 };
    let mut bindings = Vec::new();
    let mut n_asserts = 0;
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Let => {
                let pos = p.bump().1;
                let (name, _) = p.ident()?;
                let mut params: Vec<String> = Vec::new();
                loop {
                    match p.peek().clone() {
                        Tok::Ident(_) => {
                            let (x, xp) = p.ident()?;
                            if params.contains(&x) {
                                return Err(FrontendError::DuplicateParam { pos: xp, name: x });
                            }
                            params.push(x);
                        }
                        Tok::LParen if p.toks[p.at + 1].0 == Tok::RParen => {
                            return Err(p.error("unit parameters are not supported; name the parameter".into()));
                        }
                        _ => break,
                    }
                }
                p.expect(Tok::Eq)?;
                let body = p.expr()?;
                bindings.push(Binding { name, kind: BindingKind::Function, params, body, pos });
            }
            Tok::Assert => {
                let pos = p.bump().1;
                let body = p.expr()?;
                n_asserts += 1;
                bindings.push(Binding {
                    name: format!("assert{n_asserts}"),
                    kind: BindingKind::Assertion,
                    params: Vec::new(),
                    body,
                    pos,
                });
            }
            other => return Err(p.error(format!("expected `let` or `assert`, found {}", describe(&other)))),
        }
    }

    let mut globals = BTreeSet::new();
    for b in bindings.iter().filter(|b| b.kind == BindingKind::Function) {
        if !globals.insert(b.name.clone()) {
            return Err(FrontendError::DuplicateName { pos: b.pos, name: b.name.clone() });
        }
    }
    // Assertion names must not clash with user functions.
    for b in bindings.iter_mut().filter(|b| b.kind == BindingKind::Assertion) {
        while globals.contains(&b.name) {
            b.name.push('_');
        }
        globals.insert(b.name.clone());
        let mut fv = Vec::new();
        free_vars(&b.body, &globals, &mut fv);
        b.params = fv;
    }
    for b in bindings.iter().filter(|b| b.kind == BindingKind::Function) {
        let mut scope = globals.clone();
        scope.extend(b.params.iter().cloned());
        let mut err = None;
        b.body.walk(&mut |x| {
            if let ExprKind::Var(v) = &x.kind {
                if !scope.contains(v) && err.is_none() {
                    err = Some(FrontendError::Unbound { pos: x.pos, name: v.clone() });
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(SurfaceProgram { bindings, next_id: p.next_id })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mccarthy() {
        let src = "let mc n = if n > 100 then n - 10 else mc (mc (n + 11))\nassert x <= 101 => mc x = 91\n";
        let p = parse(src).unwrap();
        assert_eq!(p.bindings.len(), 2);
        assert_eq!(p.bindings[1].params, vec!["x".to_string()]);
        assert!(matches!(p.bindings[1].body.kind, ExprKind::Bin(BinOp::Implies, ..)));
    }

    #[test]
    fn application_binds_tighter_than_operators() {
        let p = parse("let f x = x\nlet g y = f y + 1").unwrap();
        match &p.bindings[1].body.kind {
            ExprKind::Bin(BinOp::Add, lhs, _) => assert!(matches!(lhs.kind, ExprKind::App(..))),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn unit_application() {
        let p = parse("let f x = x ()").unwrap();
        match &p.bindings[0].body.kind {
            ExprKind::App(_, args) => assert_eq!(args[0].kind, ExprKind::Unit),
            k => panic!("{k:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        match parse("let f x =\n  x +") {
            Err(FrontendError::Syntax { pos, .. }) => assert_eq!(pos.line, 2),
            r => panic!("{r:?}"),
        }
        assert!(matches!(parse("let f x = y"), Err(FrontendError::Unbound { .. })));
        assert!(matches!(parse("let f x = x\nlet f y = y"), Err(FrontendError::DuplicateName { .. })));
        assert!(matches!(parse("let f x x = x"), Err(FrontendError::DuplicateParam { .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse("(* header (* nested *) *)\n# line\nlet f x = if * then x else 0").unwrap();
        assert_eq!(p.bindings.len(), 1);
    }
}
