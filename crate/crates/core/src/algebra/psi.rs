use std::collections::{HashMap, VecDeque};

use indexmap::IndexSet;

use super::{AlgAxiom, OpId, OpPattern, PatArg, Term, TermId, TermStore};

/// Matches `pat` against a ground term, extending `binding`.
pub(crate) fn match_pattern(store: &TermStore, pat: &OpPattern, t: TermId, binding: &mut Vec<Option<TermId>>) -> bool {
    let Term::Apply(op, args) = store.term(t) else { return false };
    if *op != pat.op {
        return false;
    }
    for (p, a) in pat.args.iter().zip(args) {
        match p {
            PatArg::Ground(g) => {
                if g != a {
                    return false;
                }
            }
            PatArg::Var(v) => {
                if binding.len() <= *v {
                    binding.resize(*v + 1, None);
                }
                match binding[*v] {
                    Some(b) if b != *a => return false,
                    Some(_) => {}
                    None => binding[*v] = Some(*a),
                }
            }
        }
    }
    true
}

/// Builds the ground instance of `pat`; every variable must be bound.
pub(crate) fn instantiate(store: &mut TermStore, pat: &OpPattern, binding: &[Option<TermId>]) -> TermId {
    let args = pat
        .args
        .iter()
        .map(|a| match a {
            PatArg::Ground(g) => *g,
            PatArg::Var(v) => binding[*v].expect("pattern variable bound"),
        })
        .collect();
    store.apply(pat.op, args)
}

/// Least superset of `seed` closed under the term-generating rules of the
/// K1 and K2 axioms: a match of `g` adds `h`, a tuple of matches of the
/// inner patterns adds the head. Other axioms add nothing.
pub fn psi_closure(
    store: &mut TermStore,
    axioms: &[AlgAxiom],
    seed: impl IntoIterator<Item = TermId>,
) -> IndexSet<TermId> {
    let mut by_op: HashMap<OpId, Vec<TermId>> = HashMap::new();
    let mut out: IndexSet<TermId> = IndexSet::new();
    let mut queue: VecDeque<TermId> = VecDeque::new();
    for t in seed {
        if store.is_apply(t) && out.insert(t) {
            queue.push_back(t);
        }
    }
    while let Some(t) = queue.pop_front() {
        let Term::Apply(op, _) = store.term(t) else { continue };
        let op = *op;
        by_op.entry(op).or_default().push(t);
        let mut new_terms = Vec::new();
        for ax in axioms {
            match ax {
                AlgAxiom::K1 { g, h, .. } if g.op == op => {
                    let mut b = Vec::new();
                    if match_pattern(store, g, t, &mut b) {
                        new_terms.push(instantiate(store, h, &b));
                    }
                }
                AlgAxiom::K2 { inner, h, .. } => {
                    for (i, gi) in inner.iter().enumerate() {
                        if gi.op != op {
                            continue;
                        }
                        let mut b = Vec::new();
                        if !match_pattern(store, gi, t, &mut b) {
                            continue;
                        }
                        combos(store, inner, i, 0, &mut b, &by_op, &mut |store, b| {
                            new_terms.push(instantiate(store, h, b));
                        });
                    }
                }
                _ => {}
            }
        }
        for n in new_terms {
            if out.insert(n) {
                queue.push_back(n);
            }
        }
    }
    out
}

/// Enumerates bindings of every inner pattern except `fixed` against the
/// processed terms.
fn combos(
    store: &mut TermStore,
    inner: &[OpPattern],
    fixed: usize,
    k: usize,
    b: &mut Vec<Option<TermId>>,
    by_op: &HashMap<OpId, Vec<TermId>>,
    emit: &mut dyn FnMut(&mut TermStore, &[Option<TermId>]),
) {
    if k == inner.len() {
        emit(store, b);
        return;
    }
    if k == fixed {
        return combos(store, inner, fixed, k + 1, b, by_op, emit);
    }
    let Some(cands) = by_op.get(&inner[k].op) else { return };
    for &c in cands {
        let saved = b.clone();
        if match_pattern(store, &inner[k], c, b) {
            combos(store, inner, fixed, k + 1, b, by_op, emit);
        }
        *b = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Translation;
    use crate::syntax::parse_cbox;

    const ENDO: &str = "\
Endocard sub Tissue and exists cont-in . HeartWall and exists cont-in . HeartValve
HeartWall sub exists part-of . Heart
HeartValve sub exists part-of . Heart
Endocarditis sub Inflammation and exists has-loc . Endocard
Inflammation sub Disease
Heartdisease equiv Disease and exists has-loc . Heart
role part-of o part-of sub part-of
role part-of sub cont-in
role has-loc o cont-in sub has-loc
";

    #[test]
    fn endocarditis_psi() {
        let cb = parse_cbox(ENDO).unwrap();
        let mut t = Translation::new(&cb);
        let mut seed = Vec::new();
        for &(a, b) in &t.positives {
            t.store.subterms(a, &mut seed);
            t.store.subterms(b, &mut seed);
        }
        let psi = psi_closure(&mut t.store, &t.axioms.clone(), seed);
        let mut got: Vec<String> = psi.iter().map(|x| t.store.render(*x)).collect();
        got.sort();
        assert_eq!(
            got,
            vec![
                "f_cont-in(Heart)",
                "f_cont-in(HeartValve)",
                "f_cont-in(HeartWall)",
                "f_has-loc(Endocard)",
                "f_has-loc(Heart)",
                "f_has-loc(HeartValve)",
                "f_has-loc(HeartWall)",
                "f_part-of(Heart)",
            ]
        );
    }

    #[test]
    fn no_role_axioms_means_seed() {
        let cb = parse_cbox("A sub exists r . B\nexists s . A sub C").unwrap();
        let mut t = Translation::new(&cb);
        let seed: Vec<TermId> = t.positives.iter().flat_map(|&(a, b)| [a, b]).filter(|x| t.store.is_apply(*x)).collect();
        let psi = psi_closure(&mut t.store, &t.axioms.clone(), seed.clone());
        assert_eq!(psi.len(), seed.len());
    }
}
