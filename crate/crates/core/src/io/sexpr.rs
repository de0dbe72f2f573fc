use std::fmt;

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Loc),
    List(Vec<SExpr>, Loc),
}

impl SExpr {
    pub fn loc(&self) -> Loc {
        match self {
            SExpr::Atom(_, l) | SExpr::List(_, l) => *l,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(l, _) => Some(l),
            _ => None,
        }
    }

    /// `(head rest…)` with an atom head.
    pub fn call(&self) -> Option<(&str, &[SExpr])> {
        let l = self.list()?;
        let h = l.first()?.atom()?;
        Some((h, &l[1..]))
    }

    pub fn error(&self, msg: impl Into<String>) -> IoError {
        IoError::Syntax { loc: self.loc(), msg: msg.into() }
    }

    /// Well-formed input outside the supported fragment.
    pub fn fragment(&self, msg: impl Into<String>) -> IoError {
        IoError::Fragment { loc: self.loc(), msg: msg.into() }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(a, _) => write!(f, "{a}"),
            SExpr::List(items, _) => {
                write!(f, "(")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Reads all top-level s-expressions. `;` starts a line comment; `|…|`
/// quotes a symbol (the bars are dropped).
pub fn parse_all(text: &str) -> Result<Vec<SExpr>, IoError> {
    let mut stack: Vec<(Vec<SExpr>, Loc)> = Vec::new();
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    let push = |e: SExpr, stack: &mut Vec<(Vec<SExpr>, Loc)>, out: &mut Vec<SExpr>| match stack.last_mut() {
        Some((items, _)) => items.push(e),
        None => out.push(e),
    };
    while let Some(&c) = chars.peek() {
        let here = Loc { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
            }
            ';' => {
                while let Some(c) = bump(&mut chars) {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' => {
                bump(&mut chars);
                stack.push((Vec::new(), here));
            }
            ')' => {
                bump(&mut chars);
                let (items, start) = stack.pop().ok_or(IoError::Syntax { loc: here, msg: "unbalanced ')'".into() })?;
                push(SExpr::List(items, start), &mut stack, &mut out);
            }
            '|' => {
                bump(&mut chars);
                let mut s = String::new();
                loop {
                    match bump(&mut chars) {
                        Some('|') => break,
                        Some(c) => s.push(c),
                        None => return Err(IoError::Syntax { loc: here, msg: "unterminated |symbol|".into() }),
                    }
                }
                push(SExpr::Atom(s, here), &mut stack, &mut out);
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '|') {
                        break;
                    }
                    s.push(c);
                    bump(&mut chars);
                }
                push(SExpr::Atom(s, here), &mut stack, &mut out);
            }
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(IoError::Syntax { loc: start, msg: "unclosed '('".into() });
    }
    Ok(out)
}

/// Symbol as written in SMT-LIB: bare when it is a simple symbol, else `|…|`.
pub fn symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c));
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_locations() {
        let es = parse_all("(a (b c)) ; note\n |x y| (d)").unwrap();
        assert_eq!(es.len(), 3);
        assert_eq!(es[0].to_string(), "(a (b c))");
        assert_eq!(es[1].atom(), Some("x y"));
        assert_eq!(es[2].loc(), Loc { line: 2, col: 8 });
    }

    #[test]
    fn unbalanced() {
        assert!(parse_all("(a").is_err());
        assert!(parse_all("a)").is_err());
    }

    #[test]
    fn quoting() {
        assert_eq!(symbol("x"), "x");
        assert_eq!(symbol("x#1"), "|x#1|");
        assert_eq!(symbol("1x"), "|1x|");
    }
}
