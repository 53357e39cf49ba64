use super::{ParseError, Rational, Span};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Rat(Rational),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Eq,
    Question,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Rat(q) => format!("`{q}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Question => "`?`".into(),
        }
    }
}

/// Tokenizes one line; `#` starts a comment.
pub(crate) fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, Span)>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line: line_no, col: i + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '=' => Some(Tok::Eq),
            '?' => Some(Tok::Question),
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => Some(Tok::Dot),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, span));
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || matches!(chars[i], '_' | '-' | '\''))
            {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), span));
            continue;
        }
        if c.is_ascii_digit() || c == '.' || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == '.')) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || matches!(chars[i], '.' | '/')) {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            out.push((parse_number(&text, span)?, span));
            continue;
        }
        return Err(ParseError::syntax(span, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

fn parse_number(text: &str, span: Span) -> Result<Tok, ParseError> {
    let bad = || ParseError::syntax(span, format!("malformed number `{text}`"));
    if let Some((p, q)) = text.split_once('/') {
        let p: i64 = p.parse().map_err(|_| bad())?;
        let q: i64 = q.parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(ParseError::syntax(span, "zero denominator"));
        }
        return Ok(Tok::Rat(Rational::new(p, q)));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.contains('.') || frac.len() > 15 {
            return Err(bad());
        }
        let neg = whole.starts_with('-');
        let whole = whole.trim_start_matches('-');
        let w: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| bad())? };
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let den = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let num = w.checked_mul(den).and_then(|x| x.checked_add(f)).ok_or_else(bad)?;
        let q = Rational::new(if neg { -num } else { num }, den);
        return Ok(Tok::Rat(q));
    }
    text.parse::<i64>().map(Tok::Int).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_punctuation() {
        let toks: Vec<Tok> = tokenize("num [ -3/2, 0.25 ] . x", 1).unwrap().into_iter().map(|t| t.0).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("num".into()),
                Tok::LBracket,
                Tok::Rat(Rational::new(-3, 2)),
                Tok::Comma,
                Tok::Rat(Rational::new(1, 4)),
                Tok::RBracket,
                Tok::Dot,
                Tok::Ident("x".into()),
            ]
        );
    }

    #[test]
    fn hyphenated_identifiers_and_comments() {
        let toks = tokenize("exists cont-in . r' # trailing", 3).unwrap();
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[1].0, Tok::Ident("cont-in".into()));
        assert_eq!(toks[3].0, Tok::Ident("r'".into()));
        assert_eq!(toks[3].1, Span { line: 3, col: 18 });
    }

    #[test]
    fn bad_character_reports_column() {
        let err = tokenize("A sub $B", 7).unwrap_err();
        assert_eq!(err.span, Span { line: 7, col: 7 });
    }
}
