use std::collections::BTreeSet;

use super::InterpolationError;

/// Side of a literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Zero,
    One,
    Const(String),
    Apply(String, Vec<RawTerm>),
    Meet(Vec<RawTerm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    NotLe,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawLiteral {
    pub line: usize,
    pub side: Side,
    pub rel: Rel,
    pub lhs: RawTerm,
    pub rhs: RawTerm,
}

#[derive(Clone, Debug, Default)]
pub struct RawProblem {
    /// `decl` and `role` lines, passed to the CBox parser.
    pub cbox_text: String,
    pub literals: Vec<RawLiteral>,
}

impl RawTerm {
    pub fn ops(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            RawTerm::Apply(f, args) => {
                out.insert((f.clone(), args.len()));
                args.iter().for_each(|a| a.ops(out));
            }
            RawTerm::Meet(args) => args.iter().for_each(|a| a.ops(out)),
            _ => {}
        }
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
    line: usize,
}

fn ident_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b == b'-' || b == b'\''
}

impl Cursor<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, InterpolationError> {
        Err(InterpolationError::Parse { line: self.line, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.i..].starts_with(tok.as_bytes()) {
            self.i += tok.len();
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<RawTerm, InterpolationError> {
        let mut parts = vec![self.atom()?];
        while self.eat("&") {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RawTerm::Meet(parts) })
    }

    fn atom(&mut self) -> Result<RawTerm, InterpolationError> {
        self.skip_ws();
        if self.eat("(") {
            let t = self.term()?;
            if !self.eat(")") {
                return self.err("expected `)`");
            }
            return Ok(t);
        }
        let start = self.i;
        while self.i < self.s.len() && ident_byte(self.s[self.i]) {
            self.i += 1;
        }
        let word = std::str::from_utf8(&self.s[start..self.i]).unwrap();
        match word {
            "" => self.err(format!("expected a term at column {}", start + 1)),
            "0" => Ok(RawTerm::Zero),
            "1" => Ok(RawTerm::One),
            _ => {
                if self.i < self.s.len() && self.s[self.i] == b'(' {
                    self.i += 1;
                    let mut args = vec![self.term()?];
                    while self.eat(",") {
                        args.push(self.term()?);
                    }
                    if !self.eat(")") {
                        return self.err("expected `)` after arguments");
                    }
                    Ok(RawTerm::Apply(word.to_string(), args))
                } else {
                    Ok(RawTerm::Const(word.to_string()))
                }
            }
        }
    }
}

/// Reads `A: s <= t`, `B: s !<= t`, `A: s = t` literals; every other
/// non-comment line is CBox syntax (role inclusions and declarations).
pub fn parse_problem(text: &str) -> Result<RawProblem, InterpolationError> {
    let mut p = RawProblem::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap().trim();
        if l.is_empty() {
            p.cbox_text.push('\n');
            continue;
        }
        let (side, rest) = if let Some(r) = l.strip_prefix("A:") {
            (Side::A, r)
        } else if let Some(r) = l.strip_prefix("B:") {
            (Side::B, r)
        } else {
            p.cbox_text.push_str(l);
            p.cbox_text.push('\n');
            continue;
        };
        p.cbox_text.push('\n');
        let mut c = Cursor { s: rest.as_bytes(), i: 0, line };
        let lhs = c.term()?;
        let rel = if c.eat("!<=") {
            Rel::NotLe
        } else if c.eat("<=") {
            Rel::Le
        } else if c.eat("=") {
            Rel::Eq
        } else {
            return c.err("expected `<=`, `!<=` or `=`");
        };
        let rhs = c.term()?;
        c.skip_ws();
        if c.i != c.s.len() {
            return c.err("trailing input");
        }
        p.literals.push(RawLiteral { line, side, rel, lhs, rhs });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let p = parse_problem("role f o g sub id\nA: d <= g(a)\nB: f(b) !<= c & e\n").unwrap();
        assert_eq!(p.literals.len(), 2);
        assert_eq!(p.literals[0].rhs, RawTerm::Apply("g".into(), vec![RawTerm::Const("a".into())]));
        assert_eq!(p.literals[1].rel, Rel::NotLe);
        assert!(matches!(p.literals[1].rhs, RawTerm::Meet(ref v) if v.len() == 2));
        assert!(p.cbox_text.starts_with("role f o g sub id"));
    }

    #[test]
    fn error_line() {
        let err = parse_problem("A: a <= b\nB: a < b").unwrap_err();
        assert_eq!(err, InterpolationError::Parse { line: 2, msg: "expected `<=`, `!<=` or `=`".into() });
    }
}
