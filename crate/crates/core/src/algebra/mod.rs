//! Ground terms over a semilattice signature with monotone operators, the
//! translation of CBoxes into that signature, and Ψ-closure.

pub(crate) mod psi;
mod translate;

use std::collections::HashMap;
use std::fmt;

use crate::syntax::{Endpoint, IntervalConcept, Rational, Sort};

pub use psi::psi_closure;
pub use translate::{translate, AlgAxiom, Goal, Guard, OpPattern, PatArg, Translation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpId(pub u32);

impl OpId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operator {
    /// Printed name, `f_<role>` for operators coming from roles.
    pub symbol: String,
    pub role: String,
    pub arg_sorts: Vec<Sort>,
}

impl Operator {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Const(String, Sort),
    Interval(IntervalConcept),
    /// Flattened, sorted, duplicate-free, at least two operands.
    Meet(Vec<TermId>),
    Apply(OpId, Vec<TermId>),
}

/// Hash-consing table for ground terms; structural equality is identity.
#[derive(Clone, Debug, Default)]
pub struct TermStore {
    terms: Vec<Term>,
    index: HashMap<Term, TermId>,
    sorts: Vec<Option<Sort>>,
    ops: Vec<Operator>,
    op_index: HashMap<String, OpId>,
}

impl TermStore {
    pub fn new() -> Self {
        let mut s = TermStore::default();
        s.intern(Term::Zero);
        s.intern(Term::One);
        s
    }

    pub fn zero(&self) -> TermId {
        TermId(0)
    }

    pub fn one(&self) -> TermId {
        TermId(1)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id.index()]
    }

    /// `None` for the polymorphic constants 0 and 1.
    pub fn sort(&self, id: TermId) -> Option<Sort> {
        self.sorts[id.index()]
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn op(&self, id: OpId) -> &Operator {
        &self.ops[id.index()]
    }

    pub fn op_by_role(&self, role: &str) -> Option<OpId> {
        self.op_index.get(role).copied()
    }

    pub fn add_op(&mut self, role: &str, symbol: String, arg_sorts: Vec<Sort>) -> OpId {
        if let Some(id) = self.op_index.get(role) {
            return *id;
        }
        let id = OpId(self.ops.len() as u32);
        self.ops.push(Operator { symbol, role: role.to_string(), arg_sorts });
        self.op_index.insert(role.to_string(), id);
        id
    }

    fn intern(&mut self, t: Term) -> TermId {
        if let Some(id) = self.index.get(&t) {
            return *id;
        }
        let sort = match &t {
            Term::Zero | Term::One => None,
            Term::Const(_, s) => Some(*s),
            Term::Interval(_) => Some(Sort::Num),
            Term::Meet(args) => args.iter().find_map(|a| self.sorts[a.index()]),
            Term::Apply(..) => Some(Sort::Concept),
        };
        let id = TermId(self.terms.len() as u32);
        self.terms.push(t.clone());
        self.sorts.push(sort);
        self.index.insert(t, id);
        id
    }

    pub fn constant(&mut self, name: &str, sort: Sort) -> TermId {
        self.intern(Term::Const(name.to_string(), sort))
    }

    /// Interval concept; meets of literal intervals are folded eagerly.
    pub fn interval(&mut self, i: IntervalConcept) -> TermId {
        self.intern(Term::Interval(i))
    }

    pub fn apply(&mut self, op: OpId, args: Vec<TermId>) -> TermId {
        debug_assert_eq!(args.len(), self.ops[op.index()].arity());
        self.intern(Term::Apply(op, args))
    }

    pub fn meet2(&mut self, a: TermId, b: TermId) -> TermId {
        self.meet(vec![a, b])
    }

    /// Canonical meet: flattens, drops 1, absorbs into 0, folds literal
    /// intervals and returns the single operand when only one is left.
    pub fn meet(&mut self, args: Vec<TermId>) -> TermId {
        let mut flat = Vec::with_capacity(args.len());
        for a in args {
            match self.term(a) {
                Term::Meet(inner) => flat.extend(inner.iter().copied()),
                Term::One => {}
                Term::Zero => return self.zero(),
                _ => flat.push(a),
            }
        }
        let mut bounds: Option<(Option<Rational>, Option<Rational>)> = None;
        let mut rest = Vec::with_capacity(flat.len());
        for a in flat {
            match self.term(a).clone() {
                Term::Interval(i) => match literal_bounds(&i) {
                    Some((lo, hi)) => {
                        let (l0, h0) = bounds.unwrap_or((None, None));
                        bounds = Some((max_opt(l0, lo), min_opt(h0, hi)));
                    }
                    None => rest.push(a),
                },
                _ => rest.push(a),
            }
        }
        if let Some((lo, hi)) = bounds {
            let i = match (lo, hi) {
                (Some(l), Some(h)) if l > h => return self.zero(),
                (Some(l), Some(h)) => IntervalConcept::Closed(Endpoint::Lit(l), Endpoint::Lit(h)),
                (Some(l), None) => IntervalConcept::Up(Endpoint::Lit(l)),
                (None, Some(h)) => IntervalConcept::Down(Endpoint::Lit(h)),
                (None, None) => unreachable!("literal intervals are bounded on one side"),
            };
            rest.push(self.interval(i));
        }
        rest.sort();
        rest.dedup();
        match rest.len() {
            0 => self.one(),
            1 => rest[0],
            _ => self.intern(Term::Meet(rest)),
        }
    }

    /// Looks a term up without interning it.
    pub fn find(&self, t: &Term) -> Option<TermId> {
        self.index.get(t).copied()
    }

    pub fn is_apply(&self, id: TermId) -> bool {
        matches!(self.term(id), Term::Apply(..))
    }

    /// Meet and Apply terms are the ones that receive proxy constants.
    pub fn is_compound(&self, id: TermId) -> bool {
        matches!(self.term(id), Term::Apply(..) | Term::Meet(..))
    }

    /// Pushes every subterm of `id` (including `id`) in post-order.
    pub fn subterms(&self, id: TermId, out: &mut Vec<TermId>) {
        match self.term(id) {
            Term::Meet(args) | Term::Apply(_, args) => {
                for a in args.clone() {
                    self.subterms(a, out);
                }
            }
            _ => {}
        }
        out.push(id);
    }

    pub fn render(&self, id: TermId) -> String {
        let mut s = String::new();
        self.render_into(id, &mut s);
        s
    }

    fn render_into(&self, id: TermId, out: &mut String) {
        use std::fmt::Write;
        match self.term(id) {
            Term::Zero => out.push('0'),
            Term::One => out.push('1'),
            Term::Const(n, _) => out.push_str(n),
            Term::Interval(i) => match i {
                IntervalConcept::Up(e) => write!(out, "up({e})").unwrap(),
                IntervalConcept::Down(e) => write!(out, "down({e})").unwrap(),
                IntervalConcept::Closed(a, b) => write!(out, "[{a},{b}]").unwrap(),
            },
            Term::Meet(args) => {
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push('&');
                    }
                    self.render_into(*a, out);
                }
            }
            Term::Apply(op, args) => {
                out.push_str(&self.ops[op.index()].symbol);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.render_into(*a, out);
                }
                out.push(')');
            }
        }
    }

    pub fn display(&self, id: TermId) -> impl fmt::Display + '_ {
        struct D<'a>(&'a TermStore, TermId);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.render(self.1))
            }
        }
        D(self, id)
    }
}

fn literal_bounds(i: &IntervalConcept) -> Option<(Option<Rational>, Option<Rational>)> {
    match i {
        IntervalConcept::Up(Endpoint::Lit(a)) => Some((Some(*a), None)),
        IntervalConcept::Down(Endpoint::Lit(b)) => Some((None, Some(*b))),
        IntervalConcept::Closed(Endpoint::Lit(a), Endpoint::Lit(b)) => Some((Some(*a), Some(*b))),
        _ => None,
    }
}

fn max_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meets_are_canonical() {
        let mut s = TermStore::new();
        let a = s.constant("a", Sort::Concept);
        let b = s.constant("b", Sort::Concept);
        let c = s.constant("c", Sort::Concept);
        let ab = s.meet2(a, b);
        let m1 = s.meet(vec![ab, c]);
        let bc = s.meet2(c, b);
        let m2 = s.meet(vec![a, bc, a]);
        assert_eq!(m1, m2);
        assert_eq!(s.meet2(a, a), a);
        let one = s.one();
        assert_eq!(s.meet2(a, one), a);
        let zero = s.zero();
        assert_eq!(s.meet2(a, zero), zero);
    }

    #[test]
    fn literal_intervals_fold() {
        let mut s = TermStore::new();
        let up = s.interval(IntervalConcept::Up(Endpoint::Lit(Rational::from_integer(1))));
        let down = s.interval(IntervalConcept::Down(Endpoint::Lit(Rational::from_integer(4))));
        let m = s.meet2(up, down);
        assert_eq!(s.render(m), "[1,4]");
        let down0 = s.interval(IntervalConcept::Down(Endpoint::Lit(Rational::from_integer(0))));
        assert_eq!(s.meet2(up, down0), s.zero());
    }

    #[test]
    fn rendering() {
        let mut s = TermStore::new();
        let f = s.add_op("cont-in", "f_cont-in".into(), vec![Sort::Concept]);
        let h = s.constant("HeartWall", Sort::Concept);
        let t = s.apply(f, vec![h]);
        assert_eq!(s.render(t), "f_cont-in(HeartWall)");
    }
}
