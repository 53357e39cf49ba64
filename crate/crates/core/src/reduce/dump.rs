use std::collections::HashMap;
use std::fmt::Write;

use crate::hornsat::{Atom, ConstId, HornClause, HornProblem, Mode, Origin};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct DumpError {
    pub line: usize,
    pub msg: String,
}

/// Text form: `mode m`, `fact a <= b`, `clause a <= b, c <= d -> e <= f`
/// (or `-> false`) and `goal x <= y`.
pub fn render_dump(p: &HornProblem) -> String {
    let mut out = String::new();
    writeln!(out, "mode {}", p.mode).unwrap();
    for (a, _) in &p.facts {
        writeln!(out, "fact {}", p.render_atom(*a)).unwrap();
    }
    for c in &p.clauses {
        let prem: Vec<String> = c.premises.iter().map(|a| p.render_atom(*a)).collect();
        let concl = c.conclusion.map_or_else(|| "false".to_string(), |a| p.render_atom(a));
        writeln!(out, "clause {} -> {}", prem.join(", "), concl).unwrap();
    }
    if let Some(g) = p.goal {
        writeln!(out, "goal {}", p.render_atom(g)).unwrap();
    }
    out
}

struct Names {
    index: HashMap<String, ConstId>,
    names: Vec<String>,
}

impl Names {
    fn get(&mut self, s: &str) -> ConstId {
        if let Some(c) = self.index.get(s) {
            return *c;
        }
        let c = self.names.len() as ConstId;
        self.names.push(s.to_string());
        self.index.insert(s.to_string(), c);
        c
    }
}

/// Splits at top-level occurrences of `sep`, ignoring separators nested in
/// brackets of any kind.
fn split_top<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' | b'[' | b'{' => depth += 1,
            b')' | b']' | b'}' => depth -= 1,
            _ => {}
        }
        if depth == 0 && s[i..].starts_with(sep) {
            parts.push(&s[start..i]);
            i += sep.len();
            start = i;
            continue;
        }
        i += 1;
    }
    parts.push(&s[start..]);
    parts
}

fn atom(s: &str, names: &mut Names, line: usize) -> Result<Atom, DumpError> {
    let parts = split_top(s, "<=");
    let [l, r] = parts.as_slice() else {
        return Err(DumpError { line, msg: format!("expected `a <= b`, found `{}`", s.trim()) });
    };
    let (l, r) = (l.trim(), r.trim());
    if l.is_empty() || r.is_empty() {
        return Err(DumpError { line, msg: format!("empty side in `{}`", s.trim()) });
    }
    Ok(Atom::new(names.get(l), names.get(r)))
}

pub fn parse_dump(text: &str) -> Result<HornProblem, DumpError> {
    let mut names = Names { index: HashMap::new(), names: Vec::new() };
    let mut p = HornProblem::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let (kw, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match kw {
            "mode" => {
                p.mode = rest.trim().parse::<Mode>().map_err(|msg| DumpError { line, msg })?;
            }
            "fact" => p.facts.push((atom(rest, &mut names, line)?, Origin::Input)),
            "goal" => p.goal = Some(atom(rest, &mut names, line)?),
            "clause" => {
                let parts = split_top(rest, "->");
                let [prem, concl] = parts.as_slice() else {
                    return Err(DumpError { line, msg: "expected exactly one `->`".into() });
                };
                let premises = if prem.trim().is_empty() {
                    Vec::new()
                } else {
                    split_top(prem, ",").into_iter().map(|a| atom(a, &mut names, line)).collect::<Result<_, _>>()?
                };
                let conclusion =
                    if concl.trim() == "false" { None } else { Some(atom(concl, &mut names, line)?) };
                p.clauses.push(HornClause { premises, conclusion, origin: Origin::Input });
            }
            other => return Err(DumpError { line, msg: format!("unknown directive `{other}`") }),
        }
    }
    p.names = names.names;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hornsat::solve;

    #[test]
    fn round_trip_with_bracketed_names() {
        let text = "mode instantiate\nfact a <= c{f_r(a,b&c)}\nclause a <= b, c{f_r(a,b&c)} <= d -> e <= f\nclause e <= f -> false\ngoal a <= d\n";
        let p = parse_dump(text).unwrap();
        assert_eq!(p.mode, Mode::Instantiate);
        assert_eq!(p.clauses[0].premises.len(), 2);
        assert_eq!(p.name(p.clauses[0].premises[1].lhs), "c{f_r(a,b&c)}");
        assert_eq!(render_dump(&p), text);
        assert!(!solve(&p).is_unsat());
    }

    #[test]
    fn errors_carry_line() {
        let err = parse_dump("mode chase\nfact a b\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
