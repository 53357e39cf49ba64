//! From operator axioms and a ground goal to a ground Horn problem over a
//! poset vocabulary: Ψ-instantiation, flattening/purification and the local
//! axiomatization of semilattices.

mod dump;
mod instantiate;
mod sl;

use std::collections::HashMap;

use crate::algebra::{psi_closure, AlgAxiom, OpPattern, PatArg, TermId, TermStore};
use crate::hornsat::{Atom, ConstId, HornClause, HornProblem, Mode, Origin};
use crate::syntax::Sort;

pub use dump::{parse_dump, render_dump, DumpError};
pub use instantiate::{instantiate, Instance};
pub use sl::{sl_instantiate, SlShape};

/// A ground Horn problem together with the term each constant stands for.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub problem: HornProblem,
    pub psi: Vec<TermId>,
    /// Term denoted by each constant.
    pub const_terms: Vec<TermId>,
    pub const_of: HashMap<TermId, ConstId>,
    /// Number of operator-axiom instances (Mon, role axioms, strictness).
    pub instances: usize,
    pub shape: SlShape,
}

impl Reduction {
    pub fn constant(&self, t: TermId) -> Option<ConstId> {
        self.const_of.get(&t).copied()
    }

    pub fn atom(&self, a: TermId, b: TermId) -> Option<Atom> {
        Some(Atom::new(self.constant(a)?, self.constant(b)?))
    }

    /// Proxy definitions `c{t} = t`, sorted by name.
    pub fn definitions(&self, store: &TermStore) -> Vec<(String, String)> {
        let mut defs: Vec<(String, String)> = self
            .const_terms
            .iter()
            .filter(|t| store.is_compound(**t))
            .map(|t| (proxy_name(store, *t), store.render(*t)))
            .collect();
        defs.sort();
        defs
    }

    /// Clauses the problem has in instantiate mode, computed without
    /// materializing the transitivity instances.
    pub fn clause_count(&self, mode: Mode) -> u64 {
        let base = self.problem.clauses.len() as u64 - self.shape.materialized(self.problem.mode);
        base + self.shape.count(mode)
    }
}

pub fn proxy_name(store: &TermStore, t: TermId) -> String {
    if store.is_compound(t) {
        format!("c{{{}}}", store.render(t))
    } else {
        store.render(t)
    }
}

/// Ground terms appearing in axiom patterns and guards.
fn axiom_ground_terms(axioms: &[AlgAxiom]) -> Vec<TermId> {
    let mut out = Vec::new();
    let pat = |p: &OpPattern, out: &mut Vec<TermId>| {
        for a in &p.args {
            if let PatArg::Ground(g) = a {
                out.push(*g);
            }
        }
    };
    for ax in axioms {
        match ax {
            AlgAxiom::K1 { g, h, guards } => {
                pat(g, &mut out);
                pat(h, &mut out);
                out.extend(guards.iter().map(|g| g.bound));
            }
            AlgAxiom::K2 { f, inner, h, guards } => {
                pat(f, &mut out);
                pat(h, &mut out);
                inner.iter().for_each(|g| pat(g, &mut out));
                out.extend(guards.iter().map(|g| g.bound));
            }
            AlgAxiom::K3 { f, inner, guards } => {
                pat(f, &mut out);
                inner.iter().for_each(|g| pat(g, &mut out));
                out.extend(guards.iter().map(|g| g.bound));
            }
            AlgAxiom::Mon(_) | AlgAxiom::Strict(_) => {}
        }
    }
    out
}

/// Runs Ψ-closure, instantiation, purification and SL instantiation.
/// `extra` lists terms that must receive constants even when they occur in
/// no atom (e.g. every concept name when classifying).
pub fn reduce(
    store: &mut TermStore,
    axioms: &[AlgAxiom],
    positives: &[(TermId, TermId)],
    goal: Option<(TermId, TermId)>,
    extra: &[TermId],
    mode: Mode,
) -> Reduction {
    let mut seed = Vec::new();
    for &(a, b) in positives.iter().chain(goal.iter()) {
        store.subterms(a, &mut seed);
        store.subterms(b, &mut seed);
    }
    for t in axiom_ground_terms(axioms).into_iter().chain(extra.iter().copied()) {
        store.subterms(t, &mut seed);
    }
    let psi: Vec<TermId> = psi_closure(store, axioms, seed).into_iter().collect();
    let instances = instantiate(store, axioms, &psi);
    let mut red = flatten_purify(store, positives, goal, &instances, &psi, extra);
    red.instances = instances.len();
    sl_instantiate(&mut red, store, mode);
    red
}

/// Assigns a constant to every term occurring in the atoms (and to all their
/// subterms) and rewrites the atoms over constants. Compound terms become
/// proxies named `c{t}`.
pub fn flatten_purify(
    store: &TermStore,
    positives: &[(TermId, TermId)],
    goal: Option<(TermId, TermId)>,
    instances: &[Instance],
    psi: &[TermId],
    extra: &[TermId],
) -> Reduction {
    let mut consts: Vec<TermId> = Vec::new();
    let mut const_of: HashMap<TermId, ConstId> = HashMap::new();
    let add = |t: TermId, consts: &mut Vec<TermId>, const_of: &mut HashMap<TermId, ConstId>| -> ConstId {
        let mut sub = Vec::new();
        store.subterms(t, &mut sub);
        for s in sub {
            if let std::collections::hash_map::Entry::Vacant(e) = const_of.entry(s) {
                e.insert(consts.len() as ConstId);
                consts.push(s);
            }
        }
        const_of[&t]
    };
    add(store.zero(), &mut consts, &mut const_of);
    add(store.one(), &mut consts, &mut const_of);
    let mut facts = Vec::new();
    for &(a, b) in positives {
        let x = add(a, &mut consts, &mut const_of);
        let y = add(b, &mut consts, &mut const_of);
        facts.push((Atom::new(x, y), Origin::Input));
    }
    let goal_atom = goal.map(|(a, b)| {
        let x = add(a, &mut consts, &mut const_of);
        let y = add(b, &mut consts, &mut const_of);
        Atom::new(x, y)
    });
    for &t in psi.iter().chain(extra) {
        add(t, &mut consts, &mut const_of);
    }
    let mut clauses = Vec::with_capacity(instances.len());
    for inst in instances {
        let premises = inst
            .premises
            .iter()
            .map(|&(a, b)| Atom::new(add(a, &mut consts, &mut const_of), add(b, &mut consts, &mut const_of)))
            .collect();
        let conclusion = inst
            .conclusion
            .map(|(a, b)| Atom::new(add(a, &mut consts, &mut const_of), add(b, &mut consts, &mut const_of)));
        clauses.push(HornClause { premises, conclusion, origin: inst.origin });
    }
    let names = consts.iter().map(|t| proxy_name(store, *t)).collect();
    Reduction {
        problem: HornProblem { names, facts, clauses, goal: goal_atom, mode: Mode::Chase },
        psi: psi.to_vec(),
        const_terms: consts,
        const_of,
        instances: instances.len(),
        shape: SlShape::default(),
    }
}

/// Sort of a constant's term; 0 and 1 belong to every sort.
pub(crate) fn compatible(a: Option<Sort>, b: Option<Sort>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Translation;
    use crate::hornsat::{model_check, solve, Outcome};
    use crate::syntax::parse_cbox;

    pub(crate) fn reduce_query(text: &str, mode: Mode) -> (Translation, Reduction) {
        let cb = parse_cbox(text).unwrap();
        let mut t = Translation::new(&cb);
        let goal = t.goal(&cb.queries[0]);
        let axioms = t.axioms.clone();
        let red = reduce(&mut t.store, &axioms, &goal.positives, Some(goal.negative), &[], mode);
        (t, red)
    }

    #[test]
    fn single_constant_gets_bounds_and_reflexivity() {
        let (_, red) = reduce_query("? c sub c", Mode::Chase);
        let facts: Vec<String> = red.problem.facts.iter().map(|(a, _)| red.problem.render_atom(*a)).collect();
        for want in ["0 <= c", "c <= 1", "c <= c"] {
            assert!(facts.contains(&want.to_string()), "{want} missing from {facts:?}");
        }
    }

    #[test]
    fn no_operator_survives() {
        let (_, red) = reduce_query("A sub exists r . (B and C)\n? A sub exists r . B", Mode::Chase);
        for n in &red.problem.names {
            assert!(!n.starts_with("f_"), "{n}");
        }
        assert!(solve(&red.problem).is_unsat());
    }

    #[test]
    fn modes_agree_on_small_example() {
        let text = "A sub B and exists r . C\nexists r . C sub D\n? A sub D";
        for mode in [Mode::Chase, Mode::Instantiate] {
            let (_, red) = reduce_query(text, mode);
            assert!(solve(&red.problem).is_unsat(), "{mode}");
        }
        let text = "A sub B and exists r . C\nexists r . D sub D\n? A sub D";
        for mode in [Mode::Chase, Mode::Instantiate] {
            let (_, red) = reduce_query(text, mode);
            match solve(&red.problem) {
                Outcome::Sat(m) => assert!(model_check(&m, &red.problem)),
                other => panic!("{mode}: {other:?}"),
            }
        }
    }

    #[test]
    fn instantiate_count_matches_materialized() {
        let text = "A sub B and exists r . (C and D)\nexists r . C sub D and E\nrole r o r sub r\n? A sub E";
        let (_, chase) = reduce_query(text, Mode::Chase);
        let (_, inst) = reduce_query(text, Mode::Instantiate);
        assert_eq!(chase.clause_count(Mode::Instantiate), inst.problem.clauses.len() as u64);
        assert_eq!(inst.clause_count(Mode::Chase), chase.problem.clauses.len() as u64);
    }
}
