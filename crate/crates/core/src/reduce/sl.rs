use crate::algebra::{Term, TermStore};
use crate::hornsat::{Atom, ConstId, HornClause, Mode, Origin};
use crate::syntax::Sort;

use super::{compatible, Reduction};

/// Sizes needed to count the clauses whose number is cubic or quadratic in
/// the vocabulary: transitivity triples and meet-congruence pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlShape {
    /// Constants per sort, each including 0 and 1.
    pub groups: Vec<u64>,
    pub congruence_pairs: u64,
}

impl SlShape {
    pub fn transitivity(&self) -> u64 {
        self.groups.iter().map(|&g| if g < 3 { 0 } else { g * (g - 1) * (g - 2) }).sum()
    }

    /// Number of clauses specific to `mode`.
    pub fn count(&self, mode: Mode) -> u64 {
        match mode {
            Mode::Instantiate => self.transitivity() + self.congruence_pairs,
            Mode::Chase => 0,
        }
    }

    pub(crate) fn materialized(&self, mode: Mode) -> u64 {
        self.count(mode)
    }
}

/// Adds the semilattice axioms instantiated over the problem's constants:
/// reflexivity, `0 <= c <= 1`, the meet lower bounds and greatest-lower-bound
/// clauses for every meet proxy; in instantiate mode also all transitivity
/// triples and meet congruence.
pub fn sl_instantiate(red: &mut Reduction, store: &TermStore, mode: Mode) {
    let n = red.const_terms.len();
    let zero = red.const_of[&store.zero()];
    let one = red.const_of[&store.one()];
    let sorts: Vec<Option<Sort>> = red.const_terms.iter().map(|t| store.sort(*t)).collect();
    let p = &mut red.problem;
    p.mode = mode;
    for c in 0..n as ConstId {
        p.facts.push((Atom::new(c, c), Origin::Reflexive));
    }
    for c in 0..n as ConstId {
        if c != zero {
            p.facts.push((Atom::new(zero, c), Origin::Bounds));
        }
        if c != one {
            p.facts.push((Atom::new(c, one), Origin::Bounds));
        }
    }
    let meets: Vec<(ConstId, Vec<ConstId>)> = red
        .const_terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match store.term(*t) {
            Term::Meet(args) => Some((i as ConstId, args.iter().map(|a| red.const_of[a]).collect())),
            _ => None,
        })
        .collect();
    for (m, args) in &meets {
        for a in args {
            p.facts.push((Atom::new(*m, *a), Origin::MeetLower));
        }
    }
    for (m, args) in &meets {
        for z in 0..n as ConstId {
            if !compatible(sorts[*m as usize], sorts[z as usize]) {
                continue;
            }
            p.clauses.push(HornClause {
                premises: args.iter().map(|a| Atom::new(z, *a)).collect(),
                conclusion: Some(Atom::new(z, *m)),
                origin: Origin::MeetUpper,
            });
        }
    }

    let mut groups = Vec::new();
    for s in [Sort::Concept, Sort::Num] {
        let members: Vec<ConstId> =
            (0..n as ConstId).filter(|c| sorts[*c as usize].is_none_or(|x| x == s)).collect();
        if members.iter().any(|c| sorts[*c as usize].is_some()) {
            groups.push(members);
        }
    }
    let mut congruence = Vec::new();
    for (m1, a1) in &meets {
        for (m2, a2) in &meets {
            if m1 != m2 && a1.len() == a2.len() && compatible(sorts[*m1 as usize], sorts[*m2 as usize]) {
                congruence.push((*m1, a1, *m2, a2));
            }
        }
    }
    red.shape = SlShape {
        groups: groups.iter().map(|g| g.len() as u64).collect(),
        congruence_pairs: congruence.len() as u64,
    };
    if mode == Mode::Instantiate {
        let p = &mut red.problem;
        for g in &groups {
            for &x in g {
                for &y in g {
                    if y == x {
                        continue;
                    }
                    for &z in g {
                        if z == x || z == y {
                            continue;
                        }
                        p.clauses.push(HornClause {
                            premises: vec![Atom::new(x, y), Atom::new(y, z)],
                            conclusion: Some(Atom::new(x, z)),
                            origin: Origin::Transitivity,
                        });
                    }
                }
            }
        }
        for (m1, a1, m2, a2) in congruence {
            p.clauses.push(HornClause {
                premises: a1.iter().zip(a2.iter()).map(|(a, b)| Atom::new(*a, *b)).collect(),
                conclusion: Some(Atom::new(m1, m2)),
                origin: Origin::MeetCongruence,
            });
        }
    }
}

