use std::collections::{BTreeMap, HashMap};

use super::lexer::{tokenize, Tok};
use super::{
    Axiom, CBox, ConceptExpr, Endpoint, IntervalConcept, ParseError, Query, Rational, RoleChain,
    RoleSig, RoleTarget, Sort, Span, KEYWORDS,
};

#[derive(Clone, Debug)]
struct Raw {
    span: Span,
    kind: RawKind,
}

#[derive(Clone, Debug)]
enum RawKind {
    Bottom,
    Top,
    Name(String),
    Conj(Box<Raw>, Box<Raw>),
    Exists(String, Vec<Raw>),
    Interval(IntervalConcept),
}

#[derive(Clone, Debug)]
enum Stmt {
    Decl { name: String, sig: RoleSig },
    Gci { lhs: Raw, rhs: Raw, equiv: bool },
    RoleIncl { lhs: RoleChain, rhs: RoleTarget, guard: Option<Raw> },
    Restriction { role: String, base: String, position: usize, filler: Raw },
    Query { sub: Raw, sup: Raw },
}

struct Cursor {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    eol: Span,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.eol, |t| t.1)
    }

    fn next(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::syntax(self.span(), format!("expected {wanted}, found {}", t.describe())),
            None => ParseError::syntax(self.span(), format!("expected {wanted}, found end of line")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected("end of line")),
        }
    }
}

/// Parses a CBox file. Roles that are never declared get an all-`concept`
/// signature whose arity is fixed by their first use; concept names take the
/// sort demanded by their context and default to `concept`.
pub fn parse_cbox(text: &str) -> Result<CBox, ParseError> {
    let mut stmts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let eol = Span { line: line_no, col: line.chars().count() + 1 };
        let mut cur = Cursor { toks, pos: 0, eol };
        let span = cur.span();
        let stmt = statement(&mut cur)?;
        cur.finish()?;
        stmts.push((span, stmt));
    }
    Resolver::default().run(stmts)
}

fn statement(cur: &mut Cursor) -> Result<Stmt, ParseError> {
    if cur.eat_keyword("decl") {
        cur.expect_keyword("role")?;
        let name = cur.ident("role name")?;
        cur.expect(Tok::Colon)?;
        let sig = match cur.next() {
            Some((Tok::Int(n), sp)) => {
                if n < 2 {
                    return Err(ParseError::arity(sp, "roles have at least two positions"));
                }
                RoleSig::concept(n as usize)
            }
            Some((Tok::LParen, _)) => {
                let mut positions = vec![sort_name(cur)?];
                while cur.eat(&Tok::Comma) {
                    positions.push(sort_name(cur)?);
                }
                cur.expect(Tok::RParen)?;
                if positions.len() < 2 {
                    return Err(ParseError::arity(cur.span(), "roles have at least two positions"));
                }
                if positions[0] != Sort::Concept {
                    return Err(ParseError::sort(cur.span(), "the subject position of a role must be `concept`"));
                }
                RoleSig { positions }
            }
            _ => {
                cur.pos -= 1;
                return Err(cur.unexpected("an arity or a sort list"));
            }
        };
        return Ok(Stmt::Decl { name, sig });
    }
    if cur.eat_keyword("role") {
        return role_statement(cur);
    }
    if cur.eat(&Tok::Question) {
        let sub = concept(cur)?;
        cur.expect_keyword("sub")?;
        let sup = concept(cur)?;
        return Ok(Stmt::Query { sub, sup });
    }
    let lhs = concept(cur)?;
    let equiv = if cur.eat_keyword("sub") {
        false
    } else if cur.eat_keyword("equiv") {
        true
    } else {
        return Err(cur.unexpected("`sub` or `equiv`"));
    };
    let rhs = concept(cur)?;
    Ok(Stmt::Gci { lhs, rhs, equiv })
}

fn sort_name(cur: &mut Cursor) -> Result<Sort, ParseError> {
    if cur.eat_keyword("num") {
        return Ok(Sort::Num);
    }
    match cur.peek() {
        Some(Tok::Ident(s)) if s == "concept" => {
            cur.pos += 1;
            Ok(Sort::Concept)
        }
        _ => Err(cur.unexpected("`concept` or `num`")),
    }
}

fn role_statement(cur: &mut Cursor) -> Result<Stmt, ParseError> {
    let first = cur.ident("role name")?;
    if cur.eat(&Tok::Eq) {
        cur.expect_keyword("restrict")?;
        let base = cur.ident("role name")?;
        cur.expect_keyword("at")?;
        let position = match cur.next() {
            Some((Tok::Int(n), _)) if n >= 1 => n as usize,
            _ => {
                cur.pos -= 1;
                return Err(cur.unexpected("a positive position"));
            }
        };
        cur.expect_keyword("to")?;
        let filler = concept(cur)?;
        return Ok(Stmt::Restriction { role: first, base, position, filler });
    }
    let lhs = if cur.eat_keyword("o") {
        if cur.eat(&Tok::LParen) {
            let mut inner = vec![cur.ident("role name")?];
            while cur.eat(&Tok::Comma) {
                inner.push(cur.ident("role name")?);
            }
            cur.expect(Tok::RParen)?;
            RoleChain::Tuple(first, inner)
        } else {
            let mut chain = vec![first, cur.ident("role name")?];
            while cur.eat_keyword("o") {
                chain.push(cur.ident("role name")?);
            }
            RoleChain::Compose(chain)
        }
    } else {
        RoleChain::Role(first)
    };
    cur.expect_keyword("sub")?;
    let rhs = if cur.eat_keyword("id") { RoleTarget::Id } else { RoleTarget::Role(cur.ident("role name or `id`")?) };
    let guard = if cur.eat_keyword("guard") { Some(concept(cur)?) } else { None };
    Ok(Stmt::RoleIncl { lhs, rhs, guard })
}

fn concept(cur: &mut Cursor) -> Result<Raw, ParseError> {
    let mut left = unary(cur)?;
    while cur.at_keyword("and") {
        let span = cur.span();
        cur.pos += 1;
        let right = unary(cur)?;
        left = Raw { span, kind: RawKind::Conj(Box::new(left), Box::new(right)) };
    }
    Ok(left)
}

fn unary(cur: &mut Cursor) -> Result<Raw, ParseError> {
    let span = cur.span();
    let kind = match cur.peek() {
        Some(Tok::LParen) => {
            cur.pos += 1;
            let inner = concept(cur)?;
            cur.expect(Tok::RParen)?;
            return Ok(inner);
        }
        Some(Tok::Ident(s)) => match s.as_str() {
            "bot" => {
                cur.pos += 1;
                RawKind::Bottom
            }
            "top" => {
                cur.pos += 1;
                RawKind::Top
            }
            "exists" => {
                cur.pos += 1;
                let role = cur.ident("role name")?;
                cur.expect(Tok::Dot)?;
                let args = if cur.eat(&Tok::LParen) {
                    let mut args = vec![concept(cur)?];
                    while cur.eat(&Tok::Comma) {
                        args.push(concept(cur)?);
                    }
                    cur.expect(Tok::RParen)?;
                    args
                } else {
                    vec![unary(cur)?]
                };
                RawKind::Exists(role, args)
            }
            "num" => {
                cur.pos += 1;
                RawKind::Interval(interval(cur)?)
            }
            kw if KEYWORDS.contains(&kw) => return Err(cur.unexpected("a concept")),
            _ => {
                let name = s.clone();
                cur.pos += 1;
                RawKind::Name(name)
            }
        },
        _ => return Err(cur.unexpected("a concept")),
    };
    Ok(Raw { span, kind })
}

fn interval(cur: &mut Cursor) -> Result<IntervalConcept, ParseError> {
    if cur.eat_keyword("up") {
        return Ok(IntervalConcept::Up(endpoint(cur)?));
    }
    if cur.eat_keyword("down") {
        return Ok(IntervalConcept::Down(endpoint(cur)?));
    }
    let span = cur.span();
    cur.expect(Tok::LBracket)?;
    let lo = endpoint(cur)?;
    cur.expect(Tok::Comma)?;
    let hi = endpoint(cur)?;
    cur.expect(Tok::RBracket)?;
    if let (Endpoint::Lit(a), Endpoint::Lit(b)) = (&lo, &hi) {
        if a > b {
            return Err(ParseError::syntax(span, format!("empty interval [{a}, {b}]")));
        }
    }
    Ok(IntervalConcept::Closed(lo, hi))
}

fn endpoint(cur: &mut Cursor) -> Result<Endpoint, ParseError> {
    match cur.peek() {
        Some(Tok::Int(i)) => {
            let q = Rational::from_integer(*i);
            cur.pos += 1;
            Ok(Endpoint::Lit(q))
        }
        Some(Tok::Rat(q)) => {
            let q = *q;
            cur.pos += 1;
            Ok(Endpoint::Lit(q))
        }
        _ => Ok(Endpoint::Param(cur.ident("a rational or a numeric parameter")?)),
    }
}

#[derive(Default)]
struct Resolver {
    roles: BTreeMap<String, RoleSig>,
    explicit: HashMap<String, Span>,
    names: HashMap<String, Sort>,
}

impl Resolver {
    fn run(mut self, stmts: Vec<(Span, Stmt)>) -> Result<CBox, ParseError> {
        for (span, st) in &stmts {
            if let Stmt::Decl { name, sig } = st {
                if let Some(prev) = self.roles.get(name) {
                    if prev != sig {
                        return Err(ParseError::arity(*span, format!("conflicting declarations of role `{name}`")));
                    }
                }
                self.roles.insert(name.clone(), sig.clone());
                self.explicit.insert(name.clone(), *span);
            }
        }
        // Role signatures: uses in `exists` fix arities of undeclared roles,
        // restrictions derive new signatures, inclusions propagate.
        for (_, st) in &stmts {
            match st {
                Stmt::Gci { lhs, rhs, .. } | Stmt::Query { sub: lhs, sup: rhs } => {
                    self.scan_exists(lhs)?;
                    self.scan_exists(rhs)?;
                }
                Stmt::RoleIncl { guard: Some(g), .. } => self.scan_exists(g)?,
                Stmt::Restriction { filler, .. } => self.scan_exists(filler)?,
                _ => {}
            }
        }
        for (span, st) in &stmts {
            if let Stmt::Restriction { role, base, position, .. } = st {
                let base_sig = self.roles.entry(base.clone()).or_insert_with(|| RoleSig::concept(2)).clone();
                if *position < 2 || *position > base_sig.arity() {
                    return Err(ParseError::arity(
                        *span,
                        format!("position {position} is not a filler position of `{base}` (arity {})", base_sig.arity()),
                    ));
                }
                if base_sig.arity() < 3 {
                    return Err(ParseError::arity(*span, format!("restricting binary role `{base}` leaves no filler")));
                }
                let mut positions = base_sig.positions.clone();
                positions.remove(position - 1);
                let sig = RoleSig { positions };
                if let Some(prev) = self.roles.get(role) {
                    if *prev != sig {
                        return Err(ParseError::arity(*span, format!("role `{role}` conflicts with its restriction signature")));
                    }
                }
                self.roles.insert(role.clone(), sig);
            }
        }
        self.infer_inclusion_roles(&stmts)?;
        for (span, st) in &stmts {
            if let Stmt::RoleIncl { lhs, rhs, .. } = st {
                self.check_inclusion(*span, lhs, rhs)?;
            }
        }

        self.infer_name_sorts(&stmts)?;

        let mut cbox = CBox::default();
        for (span, st) in stmts {
            match st {
                Stmt::Decl { .. } => {}
                Stmt::Gci { lhs, rhs, equiv } => {
                    let (l, r) = (self.lower(&lhs), self.lower(&rhs));
                    self.check_same_sort(span, &l, &r)?;
                    if equiv {
                        cbox.axioms.push(Axiom::Gci { lhs: l.clone(), rhs: r.clone() });
                        cbox.axioms.push(Axiom::Gci { lhs: r, rhs: l });
                    } else {
                        cbox.axioms.push(Axiom::Gci { lhs: l, rhs: r });
                    }
                }
                Stmt::Query { sub, sup } => {
                    let (l, r) = (self.lower(&sub), self.lower(&sup));
                    self.check_same_sort(span, &l, &r)?;
                    cbox.queries.push(Query { sub: l, sup: r });
                }
                Stmt::RoleIncl { lhs, rhs, guard } => {
                    let guard = guard.map(|g| self.lower(&g));
                    if let Some(g) = &guard {
                        let target_sorts = self.chain_filler_sorts(&lhs);
                        if let Some(s) = g.sort() {
                            if !target_sorts.contains(&s) {
                                return Err(ParseError::sort(span, format!("guard of sort {s} matches no filler position")));
                            }
                        }
                    }
                    cbox.axioms.push(Axiom::RoleIncl { lhs, rhs, guard });
                }
                Stmt::Restriction { role, base, position, filler } => {
                    let filler = self.lower(&filler);
                    cbox.axioms.push(Axiom::Restriction { role, base, position, filler });
                }
            }
        }
        cbox.roles = self.roles;
        Ok(cbox)
    }

    fn scan_exists(&mut self, raw: &Raw) -> Result<(), ParseError> {
        match &raw.kind {
            RawKind::Conj(l, r) => {
                self.scan_exists(l)?;
                self.scan_exists(r)
            }
            RawKind::Exists(role, args) => {
                let arity = args.len() + 1;
                match self.roles.get(role) {
                    Some(sig) if sig.arity() != arity => {
                        return Err(ParseError::arity(
                            raw.span,
                            format!("role `{role}` has arity {} but is applied to {} argument(s)", sig.arity(), args.len()),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        self.roles.insert(role.clone(), RoleSig::concept(arity));
                    }
                }
                args.iter().try_for_each(|a| self.scan_exists(a))
            }
            _ => Ok(()),
        }
    }

    fn infer_inclusion_roles(&mut self, stmts: &[(Span, Stmt)]) -> Result<(), ParseError> {
        loop {
            let mut changed = false;
            for (_, st) in stmts {
                let Stmt::RoleIncl { lhs, rhs, .. } = st else { continue };
                match lhs {
                    RoleChain::Role(r) => {
                        if let RoleTarget::Role(s) = rhs {
                            match (self.roles.get(r).cloned(), self.roles.get(s).cloned()) {
                                (Some(sig), None) => {
                                    self.roles.insert(s.clone(), sig);
                                    changed = true;
                                }
                                (None, Some(sig)) => {
                                    self.roles.insert(r.clone(), sig);
                                    changed = true;
                                }
                                _ => {}
                            }
                        }
                    }
                    RoleChain::Compose(rs) => {
                        for r in rs {
                            if !self.roles.contains_key(r) {
                                self.roles.insert(r.clone(), RoleSig::concept(2));
                                changed = true;
                            }
                        }
                        if let RoleTarget::Role(s) = rhs {
                            if !self.roles.contains_key(s) {
                                let last = self.roles[rs.last().unwrap()].clone();
                                self.roles.insert(s.clone(), last);
                                changed = true;
                            }
                        }
                    }
                    RoleChain::Tuple(r, ss) => {
                        if !self.roles.contains_key(r) {
                            self.roles.insert(r.clone(), RoleSig::concept(ss.len() + 1));
                            changed = true;
                        }
                        let known = ss.iter().all(|s| self.roles.contains_key(s));
                        if let (RoleTarget::Role(t), true) = (rhs, known) {
                            if !self.roles.contains_key(t) {
                                let mut positions = vec![Sort::Concept];
                                for s in ss {
                                    positions.extend_from_slice(self.roles[s].fillers());
                                }
                                self.roles.insert(t.clone(), RoleSig { positions });
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        // Whatever is still unknown defaults to a binary concept role.
        for (_, st) in stmts {
            if let Stmt::RoleIncl { lhs, rhs, .. } = st {
                let mut names: Vec<&String> = match lhs {
                    RoleChain::Role(r) => vec![r],
                    RoleChain::Compose(rs) => rs.iter().collect(),
                    RoleChain::Tuple(r, ss) => std::iter::once(r).chain(ss.iter()).collect(),
                };
                if let RoleTarget::Role(s) = rhs {
                    names.push(s);
                }
                for n in names {
                    self.roles.entry(n.clone()).or_insert_with(|| RoleSig::concept(2));
                }
            }
        }
        Ok(())
    }

    fn check_inclusion(&self, span: Span, lhs: &RoleChain, rhs: &RoleTarget) -> Result<(), ParseError> {
        let sig = |r: &str| self.roles[r].clone();
        let target: Vec<Sort> = match lhs {
            RoleChain::Role(r) => sig(r).positions,
            RoleChain::Compose(rs) => {
                for r in &rs[..rs.len() - 1] {
                    if !sig(r).is_binary_concept() {
                        return Err(ParseError::arity(span, format!("role `{r}` in a composition chain must be binary")));
                    }
                }
                sig(rs.last().unwrap()).positions
            }
            RoleChain::Tuple(r, ss) => {
                let rs = sig(r);
                if rs.arity() != ss.len() + 1 {
                    return Err(ParseError::arity(
                        span,
                        format!("role `{r}` has arity {} but is composed with {} role(s)", rs.arity(), ss.len()),
                    ));
                }
                let mut positions = vec![Sort::Concept];
                for (i, s) in ss.iter().enumerate() {
                    if rs.positions[i + 1] != Sort::Concept {
                        return Err(ParseError::sort(span, format!("position {} of `{r}` is numeric and cannot be composed", i + 2)));
                    }
                    positions.extend_from_slice(sig(s).fillers());
                }
                positions
            }
        };
        match rhs {
            RoleTarget::Role(s) => {
                let ss = sig(s);
                if ss.positions != target {
                    return Err(ParseError::arity(span, format!("signature of `{s}` does not match the left-hand side")));
                }
            }
            RoleTarget::Id => {
                let inner: Vec<&String> = match lhs {
                    RoleChain::Role(_) => {
                        return Err(ParseError::arity(span, "`id` needs a composition on the left"));
                    }
                    RoleChain::Compose(rs) => {
                        if rs.len() != 2 {
                            return Err(ParseError::arity(span, "`id` inclusions compose exactly two roles"));
                        }
                        vec![&rs[1]]
                    }
                    RoleChain::Tuple(_, ss) => ss.iter().collect(),
                };
                for s in inner {
                    if !sig(s).is_binary_concept() {
                        return Err(ParseError::arity(span, format!("role `{s}` composed into `id` must be binary")));
                    }
                }
            }
        }
        Ok(())
    }

    fn chain_filler_sorts(&self, lhs: &RoleChain) -> Vec<Sort> {
        match lhs {
            RoleChain::Role(r) => self.roles[r].fillers().to_vec(),
            RoleChain::Compose(rs) => self.roles[rs.last().unwrap()].fillers().to_vec(),
            RoleChain::Tuple(_, ss) => ss.iter().flat_map(|s| self.roles[s].fillers().to_vec()).collect(),
        }
    }

    fn infer(&self, raw: &Raw) -> Option<Sort> {
        match &raw.kind {
            RawKind::Bottom | RawKind::Top => None,
            RawKind::Name(n) => self.names.get(n).copied(),
            RawKind::Conj(l, r) => self.infer(l).or_else(|| self.infer(r)),
            RawKind::Exists(..) => Some(Sort::Concept),
            RawKind::Interval(_) => Some(Sort::Num),
        }
    }

    /// Checks `raw` against `sort`, assigning sorts to unresolved names.
    fn expect(&mut self, raw: &Raw, sort: Sort, changed: &mut bool) -> Result<(), ParseError> {
        match &raw.kind {
            RawKind::Bottom | RawKind::Top => Ok(()),
            RawKind::Name(n) => match self.names.get(n) {
                Some(s) if *s != sort => {
                    Err(ParseError::sort(raw.span, format!("`{n}` is used with sort {s} and {sort}")))
                }
                Some(_) => Ok(()),
                None => {
                    self.names.insert(n.clone(), sort);
                    *changed = true;
                    Ok(())
                }
            },
            RawKind::Conj(l, r) => {
                self.expect(l, sort, changed)?;
                self.expect(r, sort, changed)
            }
            RawKind::Exists(role, args) => {
                if sort != Sort::Concept {
                    return Err(ParseError::sort(raw.span, format!("`exists {role}` has sort concept, expected {sort}")));
                }
                let sig = self.roles[role].clone();
                for (a, s) in args.iter().zip(sig.fillers()) {
                    self.expect(a, *s, changed)?;
                }
                Ok(())
            }
            RawKind::Interval(_) => {
                if sort != Sort::Num {
                    return Err(ParseError::sort(raw.span, format!("interval concept has sort num, expected {sort}")));
                }
                Ok(())
            }
        }
    }

    fn infer_name_sorts(&mut self, stmts: &[(Span, Stmt)]) -> Result<(), ParseError> {
        let mut pending: Vec<(&Raw, &Raw)> = Vec::new();
        let mut singles: Vec<(&Raw, Option<Sort>)> = Vec::new();
        for (_, st) in stmts {
            match st {
                Stmt::Gci { lhs, rhs, .. } => pending.push((lhs, rhs)),
                Stmt::Query { sub, sup } => pending.push((sub, sup)),
                Stmt::Restriction { base, position, filler, .. } => {
                    singles.push((filler, Some(self.roles[base].positions[position - 1])))
                }
                Stmt::RoleIncl { guard: Some(g), .. } => singles.push((g, None)),
                _ => {}
            }
        }
        let mut dummy = false;
        // exists-arguments and restriction fillers are determinate
        for (_, st) in stmts {
            let roots: Vec<&Raw> = match st {
                Stmt::Gci { lhs, rhs, .. } => vec![lhs, rhs],
                Stmt::Query { sub, sup } => vec![sub, sup],
                Stmt::RoleIncl { guard: Some(g), .. } => vec![g],
                Stmt::Restriction { filler, .. } => vec![filler],
                _ => vec![],
            };
            for r in roots {
                self.expect_exists_args(r, &mut dummy)?;
            }
        }
        for (raw, sort) in &singles {
            if let Some(s) = sort {
                self.expect(raw, *s, &mut dummy)?;
            }
        }
        loop {
            let mut changed = false;
            for (l, r) in &pending {
                let inner = [*l, *r];
                let sort = inner.iter().find_map(|x| self.infer(x));
                if let Some(s) = sort {
                    self.expect(l, s, &mut changed)?;
                    self.expect(r, s, &mut changed)?;
                }
            }
            for (raw, _) in &singles {
                if let Some(s) = self.infer(raw) {
                    self.expect(raw, s, &mut changed)?;
                }
            }
            if !changed {
                break;
            }
        }
        for (l, r) in &pending {
            let s = self.infer(l).or_else(|| self.infer(r)).unwrap_or(Sort::Concept);
            self.expect(l, s, &mut dummy)?;
            self.expect(r, s, &mut dummy)?;
        }
        for (raw, _) in &singles {
            let s = self.infer(raw).unwrap_or(Sort::Concept);
            self.expect(raw, s, &mut dummy)?;
        }
        Ok(())
    }

    fn expect_exists_args(&mut self, raw: &Raw, changed: &mut bool) -> Result<(), ParseError> {
        match &raw.kind {
            RawKind::Conj(l, r) => {
                self.expect_exists_args(l, changed)?;
                self.expect_exists_args(r, changed)
            }
            RawKind::Exists(..) => self.expect(raw, Sort::Concept, changed).and_then(|_| {
                if let RawKind::Exists(_, args) = &raw.kind {
                    for a in args {
                        self.expect_exists_args(a, changed)?;
                    }
                }
                Ok(())
            }),
            _ => Ok(()),
        }
    }

    fn check_same_sort(&self, span: Span, l: &ConceptExpr, r: &ConceptExpr) -> Result<(), ParseError> {
        match (l.sort(), r.sort()) {
            (Some(a), Some(b)) if a != b => Err(ParseError::sort(span, format!("sides have sorts {a} and {b}"))),
            _ => Ok(()),
        }
    }

    fn lower(&self, raw: &Raw) -> ConceptExpr {
        match &raw.kind {
            RawKind::Bottom => ConceptExpr::Bottom,
            RawKind::Top => ConceptExpr::Top,
            RawKind::Name(n) => ConceptExpr::Name(n.clone(), self.names.get(n).copied().unwrap_or(Sort::Concept)),
            RawKind::Conj(l, r) => ConceptExpr::Conj(Box::new(self.lower(l)), Box::new(self.lower(r))),
            RawKind::Exists(role, args) => {
                ConceptExpr::Exists { role: role.clone(), args: args.iter().map(|a| self.lower(a)).collect() }
            }
            RawKind::Interval(i) => ConceptExpr::Interval(i.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::ParseErrorKind;

    #[test]
    fn gci_with_conjunction_and_existential() {
        let cb = parse_cbox("Endocard sub Tissue and exists cont-in . HeartWall").unwrap();
        assert_eq!(
            cb.axioms,
            vec![Axiom::Gci {
                lhs: ConceptExpr::name("Endocard"),
                rhs: ConceptExpr::name("Tissue").and(ConceptExpr::exists("cont-in", ConceptExpr::name("HeartWall"))),
            }]
        );
    }

    #[test]
    fn role_composition() {
        let cb = parse_cbox("role part-of o part-of sub part-of").unwrap();
        assert_eq!(
            cb.axioms,
            vec![Axiom::RoleIncl {
                lhs: RoleChain::Compose(vec!["part-of".into(), "part-of".into()]),
                rhs: RoleTarget::Role("part-of".into()),
                guard: None,
            }]
        );
        assert!(cb.roles["part-of"].is_binary_concept());
    }

    #[test]
    fn ternary_exists_has_two_arguments() {
        let cb = parse_cbox("decl role r : 3\nexists r . (A, B) sub C").unwrap();
        match &cb.axioms[0] {
            Axiom::Gci { lhs: ConceptExpr::Exists { role, args }, .. } => {
                assert_eq!(role, "r");
                assert_eq!(args.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn equiv_is_two_inclusions() {
        let cb = parse_cbox("A equiv B and C").unwrap();
        assert_eq!(cb.axioms.len(), 2);
    }

    #[test]
    fn arity_mismatch_is_located() {
        let err = parse_cbox("decl role r : 3\nA sub exists r . B").unwrap_err();
        assert_eq!(err.span.line, 2);
        assert!(matches!(err.kind, ParseErrorKind::Arity(_)));
    }

    #[test]
    fn sort_mismatch_is_located() {
        let err = parse_cbox("decl role price : (concept, num)\nA sub exists price . P\nP sub Q\nQ sub exists r . Q").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Sort(_)), "{err}");
        assert!(err.span.line >= 2);
    }

    #[test]
    fn num_names_are_inferred_through_inclusions() {
        let cb = parse_cbox("decl role price : (concept, num)\nA sub exists price . P\nP sub num up 3").unwrap();
        let mut sorts = vec![];
        for (l, _) in cb.gcis() {
            l.visit_names(&mut |n, s| sorts.push((n.to_string(), s)));
        }
        assert!(sorts.contains(&("P".to_string(), Sort::Num)));
    }

    #[test]
    fn syntax_error_span_is_inside_input() {
        let text = "A sub B\nA sub and";
        let err = parse_cbox(text).unwrap_err();
        assert_eq!(err.span.line, 2);
        assert!(err.span.col <= "A sub and".len() + 1);
    }

    #[test]
    fn restriction_signature() {
        let cb = parse_cbox("decl role interm : 3\nrole r' = restrict interm at 3 to C3\nrole r' sub route").unwrap();
        assert_eq!(cb.roles["r'"], RoleSig::concept(2));
        assert_eq!(cb.roles["route"], RoleSig::concept(2));
        assert!(parse_cbox("decl role interm : 3\nrole r' = restrict interm at 4 to C").is_err());
        assert!(parse_cbox("decl role interm : 3\nrole r' = restrict interm at 1 to C").is_err());
    }

    #[test]
    fn intervals_and_queries() {
        let cb = parse_cbox("? num [0, 10] sub num up -1/2").unwrap();
        assert_eq!(cb.queries.len(), 1);
        assert_eq!(
            cb.queries[0].sup,
            ConceptExpr::Interval(IntervalConcept::Up(Endpoint::Lit(Rational::new(-1, 2))))
        );
        assert!(parse_cbox("? num [3, 1] sub top").is_err());
    }

    #[test]
    fn id_requires_binary_inner_roles() {
        assert!(parse_cbox("role f o g sub id").is_ok());
        assert!(parse_cbox("decl role g : 3\nrole f o g sub id").is_err());
        assert!(parse_cbox("role f sub id").is_err());
    }
}
