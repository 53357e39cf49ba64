use std::collections::{HashMap, HashSet};

use crate::algebra::psi::{instantiate as build, match_pattern};
use crate::algebra::{AlgAxiom, Guard, OpId, OpPattern, PatArg, Term, TermId, TermStore};
use crate::hornsat::Origin;

/// Ground clause over terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    pub premises: Vec<(TermId, TermId)>,
    pub conclusion: Option<(TermId, TermId)>,
    pub origin: Origin,
}

/// Instances of the operator axioms over the Ψ-closed term set `psi`:
/// monotonicity for every ordered pair of distinct terms with the same
/// operator, role axioms for every match, strictness for every position.
pub fn instantiate(store: &mut TermStore, axioms: &[AlgAxiom], psi: &[TermId]) -> Vec<Instance> {
    let mut by_op: HashMap<OpId, Vec<TermId>> = HashMap::new();
    for &t in psi {
        if let Term::Apply(op, _) = store.term(t) {
            by_op.entry(*op).or_default().push(t);
        }
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |inst: Instance, out: &mut Vec<Instance>| {
        if seen.insert(inst.clone()) {
            out.push(inst);
        }
    };
    for ax in axioms {
        match ax {
            AlgAxiom::Mon(f) => {
                let terms = by_op.get(f).cloned().unwrap_or_default();
                for &s in &terms {
                    for &t in &terms {
                        if s == t {
                            continue;
                        }
                        let (Term::Apply(_, xs), Term::Apply(_, ys)) = (store.term(s), store.term(t)) else { unreachable!() };
                        let premises = xs.iter().copied().zip(ys.iter().copied()).collect();
                        push(Instance { premises, conclusion: Some((s, t)), origin: Origin::Mon }, &mut out);
                    }
                }
            }
            AlgAxiom::Strict(f) => {
                let zero = store.zero();
                for &t in by_op.get(f).map(Vec::as_slice).unwrap_or(&[]) {
                    let Term::Apply(_, xs) = store.term(t) else { unreachable!() };
                    for &x in xs.clone().iter() {
                        push(
                            Instance { premises: vec![(x, zero)], conclusion: Some((t, zero)), origin: Origin::Strict },
                            &mut out,
                        );
                    }
                }
            }
            AlgAxiom::K1 { g, h, guards } => {
                for &t in by_op.get(&g.op).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut b = Vec::new();
                    if match_pattern(store, g, t, &mut b) {
                        let head = build(store, h, &b);
                        let premises = guard_atoms(guards, &b);
                        push(Instance { premises, conclusion: Some((t, head)), origin: Origin::Role }, &mut out);
                    }
                }
            }
            AlgAxiom::K2 { f, inner, h, guards } => {
                let mut matches = Vec::new();
                inner_matches(store, inner, 0, &mut Vec::new(), &mut Vec::new(), &by_op, &mut matches);
                for &ft in by_op.get(&f.op).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut fb = Vec::new();
                    if !match_pattern(store, f, ft, &mut fb) {
                        continue;
                    }
                    for (b, terms) in &matches {
                        let mut b = b.clone();
                        if b.len() < fb.len() {
                            b.resize(fb.len(), None);
                        }
                        for (i, v) in fb.iter().enumerate() {
                            if v.is_some() {
                                b[i] = *v;
                            }
                        }
                        let head = build(store, h, &b);
                        let mut premises: Vec<(TermId, TermId)> =
                            (0..inner.len()).map(|i| (b[i].expect("outer variable bound"), terms[i])).collect();
                        premises.extend(guard_atoms(guards, &b));
                        push(Instance { premises, conclusion: Some((ft, head)), origin: Origin::Role }, &mut out);
                    }
                }
            }
            AlgAxiom::K3 { f, inner, guards } => {
                let n = inner.len();
                let mut xs: Vec<TermId> = Vec::new();
                for &t in by_op.get(&inner[0].op).map(Vec::as_slice).unwrap_or(&[]) {
                    let mut b = Vec::new();
                    if match_pattern(store, &inner[0], t, &mut b) {
                        if let Some(Some(x)) = b.get(n) {
                            if !xs.contains(x) {
                                xs.push(*x);
                            }
                        }
                    }
                }
                for x in xs {
                    let mut b = vec![None; n + 1];
                    b[n] = Some(x);
                    let Some(gs) = inner.iter().map(|g| find(store, g, &b)).collect::<Option<Vec<TermId>>>() else {
                        continue;
                    };
                    for &ft in by_op.get(&f.op).map(Vec::as_slice).unwrap_or(&[]) {
                        let mut fb = b.clone();
                        if !match_pattern(store, f, ft, &mut fb) {
                            continue;
                        }
                        let mut premises: Vec<(TermId, TermId)> = (0..n).map(|i| (fb[i].unwrap(), gs[i])).collect();
                        premises.extend(guard_atoms(guards, &fb));
                        push(Instance { premises, conclusion: Some((ft, x)), origin: Origin::Role }, &mut out);
                    }
                }
            }
        }
    }
    out
}

fn guard_atoms(guards: &[Guard], b: &[Option<TermId>]) -> Vec<(TermId, TermId)> {
    guards.iter().map(|g| (b[g.var].expect("guarded variable bound"), g.bound)).collect()
}

/// Existing ground instance of `pat` under `b`, without interning.
fn find(store: &TermStore, pat: &OpPattern, b: &[Option<TermId>]) -> Option<TermId> {
    let args = pat
        .args
        .iter()
        .map(|a| match a {
            PatArg::Ground(g) => Some(*g),
            PatArg::Var(v) => b.get(*v).copied().flatten(),
        })
        .collect::<Option<Vec<TermId>>>()?;
    store.find(&Term::Apply(pat.op, args))
}

type Match = (Vec<Option<TermId>>, Vec<TermId>);

fn inner_matches(
    store: &TermStore,
    inner: &[OpPattern],
    k: usize,
    b: &mut Vec<Option<TermId>>,
    terms: &mut Vec<TermId>,
    by_op: &HashMap<OpId, Vec<TermId>>,
    out: &mut Vec<Match>,
) {
    if k == inner.len() {
        out.push((b.clone(), terms.clone()));
        return;
    }
    for &t in by_op.get(&inner[k].op).map(Vec::as_slice).unwrap_or(&[]) {
        let saved = b.clone();
        if match_pattern(store, &inner[k], t, b) {
            terms.push(t);
            inner_matches(store, inner, k + 1, b, terms, by_op, out);
            terms.pop();
        }
        *b = saved;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Translation;
    use crate::syntax::parse_cbox;

    #[test]
    fn mon_count_is_ordered_pairs() {
        let cb = parse_cbox("A sub exists r . B\nC sub exists r . D\nE sub exists r . A\nexists s . A sub B").unwrap();
        let mut t = Translation::new(&cb);
        let psi: Vec<TermId> = t.positives.iter().flat_map(|&(a, b)| [a, b]).filter(|x| t.store.is_apply(*x)).collect();
        let axioms = t.axioms.clone();
        let inst = instantiate(&mut t.store, &axioms, &psi);
        let mon = inst.iter().filter(|i| i.origin == Origin::Mon).count();
        // k_r = 3, k_s = 1
        assert_eq!(mon, 3 * 2);
    }

    #[test]
    fn sgc_instance() {
        let cb = parse_cbox("role f o g sub id\nd sub exists g . a\n? exists f . b sub c").unwrap();
        let mut t = Translation::new(&cb);
        let goal = t.goal(&cb.queries[0]);
        let mut psi: Vec<TermId> = vec![goal.positives[0].1, goal.negative.0];
        psi.sort();
        let axioms = t.axioms.clone();
        let inst = instantiate(&mut t.store, &axioms, &psi);
        let role: Vec<String> = inst
            .iter()
            .filter(|i| i.origin == Origin::Role)
            .map(|i| {
                let (a, b) = i.premises[0];
                let (c, d) = i.conclusion.unwrap();
                format!("{} <= {} -> {} <= {}", t.store.render(a), t.store.render(b), t.store.render(c), t.store.render(d))
            })
            .collect();
        assert_eq!(role, vec!["b <= f_g(a) -> f_f(b) <= a"]);
    }
}
