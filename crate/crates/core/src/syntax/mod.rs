//! Abstract syntax for constraint boxes, the line-based surface language and
//! its printer.
//!
//! A CBox file holds one statement per line:
//!
//! ```text
//! decl role price : (concept, num)
//! Endocard sub Tissue and exists cont-in . HeartWall
//! role part-of o part-of sub part-of
//! role r2 = restrict r at 3 to C3
//! ? Endocarditis sub Heartdisease
//! ```

mod lexer;
mod parser;
mod render;

use std::collections::BTreeMap;
use std::fmt;

pub use num_rational::Rational64 as Rational;
pub use parser::parse_cbox;
pub use render::{concept as render_concept, render};

/// The two sorts of the language: abstract individuals and the rational line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Concept,
    Num,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Concept => f.write_str("concept"),
            Sort::Num => f.write_str("num"),
        }
    }
}

/// Sorted signature of a role; `positions[0]` is the subject and is always
/// of sort `concept`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RoleSig {
    pub positions: Vec<Sort>,
}

impl RoleSig {
    pub fn concept(arity: usize) -> Self {
        RoleSig { positions: vec![Sort::Concept; arity] }
    }

    pub fn arity(&self) -> usize {
        self.positions.len()
    }

    /// Sorts of the filler positions (everything after the subject).
    pub fn fillers(&self) -> &[Sort] {
        &self.positions[1..]
    }

    pub fn is_binary_concept(&self) -> bool {
        self.positions == [Sort::Concept, Sort::Concept]
    }
}

/// Endpoint of an interval concept: a rational literal or a named numeric
/// parameter constrained elsewhere in the CBox.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Lit(Rational),
    Param(String),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Lit(q) => write!(f, "{q}"),
            Endpoint::Param(p) => f.write_str(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IntervalConcept {
    /// `{ x | x >= n }`
    Up(Endpoint),
    /// `{ x | x <= n }`
    Down(Endpoint),
    /// `{ x | lo <= x <= hi }`
    Closed(Endpoint, Endpoint),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConceptExpr {
    Bottom,
    Top,
    Name(String, Sort),
    Conj(Box<ConceptExpr>, Box<ConceptExpr>),
    Exists { role: String, args: Vec<ConceptExpr> },
    Interval(IntervalConcept),
}

impl ConceptExpr {
    pub fn name(n: &str) -> Self {
        ConceptExpr::Name(n.to_string(), Sort::Concept)
    }

    pub fn and(self, other: ConceptExpr) -> Self {
        ConceptExpr::Conj(Box::new(self), Box::new(other))
    }

    pub fn exists(role: &str, arg: ConceptExpr) -> Self {
        ConceptExpr::Exists { role: role.to_string(), args: vec![arg] }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, ConceptExpr::Bottom | ConceptExpr::Top | ConceptExpr::Name(..))
    }

    /// Sort of the expression, `None` for the polymorphic `bot`/`top`.
    pub fn sort(&self) -> Option<Sort> {
        match self {
            ConceptExpr::Bottom | ConceptExpr::Top => None,
            ConceptExpr::Name(_, s) => Some(*s),
            ConceptExpr::Conj(l, r) => l.sort().or_else(|| r.sort()),
            ConceptExpr::Exists { .. } => Some(Sort::Concept),
            ConceptExpr::Interval(_) => Some(Sort::Num),
        }
    }

    /// Calls `f` on every concept name occurring in the expression.
    pub fn visit_names<'a>(&'a self, f: &mut impl FnMut(&'a str, Sort)) {
        match self {
            ConceptExpr::Name(n, s) => f(n, *s),
            ConceptExpr::Conj(l, r) => {
                l.visit_names(f);
                r.visit_names(f);
            }
            ConceptExpr::Exists { args, .. } => args.iter().for_each(|a| a.visit_names(f)),
            _ => {}
        }
    }

    pub fn size(&self) -> usize {
        match self {
            ConceptExpr::Conj(l, r) => 1 + l.size() + r.size(),
            ConceptExpr::Exists { args, .. } => 1 + args.iter().map(|a| a.size()).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Left-hand side of a role inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RoleChain {
    /// `r`
    Role(String),
    /// `r1 o r2 o ... o rk`, k >= 2
    Compose(Vec<String>),
    /// `r o (s1, ..., sn)`
    Tuple(String, Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RoleTarget {
    Role(String),
    Id,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Gci { lhs: ConceptExpr, rhs: ConceptExpr },
    RoleIncl { lhs: RoleChain, rhs: RoleTarget, guard: Option<ConceptExpr> },
    /// `role <role> = restrict <base> at <position> to <filler>`; positions
    /// count every argument of `base` starting from 1 at the subject.
    Restriction { role: String, base: String, position: usize, filler: ConceptExpr },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Query {
    pub sub: ConceptExpr,
    pub sup: ConceptExpr,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CBox {
    /// Signature of every role in use, including roles introduced by
    /// restriction and implicitly declared ones.
    pub roles: BTreeMap<String, RoleSig>,
    pub axioms: Vec<Axiom>,
    pub queries: Vec<Query>,
}

impl CBox {
    pub fn role_sig(&self, role: &str) -> Option<&RoleSig> {
        self.roles.get(role)
    }

    pub fn gcis(&self) -> impl Iterator<Item = (&ConceptExpr, &ConceptExpr)> {
        self.axioms.iter().filter_map(|a| match a {
            Axiom::Gci { lhs, rhs } => Some((lhs, rhs)),
            _ => None,
        })
    }

    /// Restriction definition of `role`, if it is a restricted role.
    pub fn restriction(&self, role: &str) -> Option<(&str, usize, &ConceptExpr)> {
        self.axioms.iter().find_map(|a| match a {
            Axiom::Restriction { role: r, base, position, filler } if r == role => {
                Some((base.as_str(), *position, filler))
            }
            _ => None,
        })
    }

    /// Concept names of sort `concept`, in first-occurrence order.
    pub fn concept_names(&self) -> Vec<String> {
        let mut seen = indexmap::IndexSet::new();
        let mut add = |n: &str, s: Sort| {
            if s == Sort::Concept {
                seen.insert(n.to_string());
            }
        };
        for ax in &self.axioms {
            match ax {
                Axiom::Gci { lhs, rhs } => {
                    lhs.visit_names(&mut add);
                    rhs.visit_names(&mut add);
                }
                Axiom::RoleIncl { guard: Some(g), .. } => g.visit_names(&mut add),
                Axiom::Restriction { filler, .. } => filler.visit_names(&mut add),
                _ => {}
            }
        }
        for q in &self.queries {
            q.sub.visit_names(&mut add);
            q.sup.visit_names(&mut add);
        }
        seen.into_iter().collect()
    }

    /// Total number of symbol occurrences, used for size bounds.
    pub fn size(&self) -> usize {
        self.axioms
            .iter()
            .map(|a| match a {
                Axiom::Gci { lhs, rhs } => lhs.size() + rhs.size(),
                Axiom::RoleIncl { lhs, guard, .. } => {
                    let chain = match lhs {
                        RoleChain::Role(_) => 1,
                        RoleChain::Compose(rs) => rs.len(),
                        RoleChain::Tuple(_, ss) => 1 + ss.len(),
                    };
                    chain + 1 + guard.as_ref().map_or(0, |g| g.size())
                }
                Axiom::Restriction { filler, .. } => 2 + filler.size(),
            })
            .sum()
    }
}

/// Source position, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("sort mismatch: {0}")]
    Sort(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: Span,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub(crate) fn syntax(span: Span, msg: impl Into<String>) -> Self {
        ParseError { span, kind: ParseErrorKind::Syntax(msg.into()) }
    }
    pub(crate) fn arity(span: Span, msg: impl Into<String>) -> Self {
        ParseError { span, kind: ParseErrorKind::Arity(msg.into()) }
    }
    pub(crate) fn sort(span: Span, msg: impl Into<String>) -> Self {
        ParseError { span, kind: ParseErrorKind::Sort(msg.into()) }
    }
}

pub(crate) const KEYWORDS: &[&str] = &[
    "decl", "role", "sub", "equiv", "and", "exists", "bot", "top", "o", "id", "guard", "restrict",
    "at", "to", "num", "up", "down",
];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '\''))
        && !KEYWORDS.contains(&s)
}
