use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::syntax::{Axiom, CBox, ConceptExpr, RoleChain, RoleTarget};

use super::OracleError;

/// Subsumers of each concept name; `⊥` and `⊤` appear as `bot` and `top`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SubsumptionSet {
    pub subsumers: BTreeMap<String, BTreeSet<String>>,
}

impl SubsumptionSet {
    /// `a ⊑ b`. Names the CBox never mentions only subsume themselves.
    pub fn subsumes(&self, a: &str, b: &str) -> bool {
        if a == b || b == "top" || a == "bot" {
            return true;
        }
        match self.subsumers.get(a) {
            Some(s) => s.contains(b) || s.contains("bot"),
            None => false,
        }
    }
}

const TOP: usize = 0;
const BOT: usize = 1;

#[derive(Default)]
struct Index {
    ids: HashMap<String, usize>,
    names: Vec<String>,
}

impl Index {
    fn get(&mut self, n: &str) -> usize {
        if let Some(i) = self.ids.get(n) {
            return *i;
        }
        self.ids.insert(n.to_string(), self.names.len());
        self.names.push(n.to_string());
        self.names.len() - 1
    }

    fn atom(&mut self, c: &ConceptExpr) -> Result<usize, OracleError> {
        match c {
            ConceptExpr::Top => Ok(TOP),
            ConceptExpr::Bottom => Ok(BOT),
            ConceptExpr::Name(n, _) => Ok(self.get(n)),
            _ => Err(OracleError::NotNormalized),
        }
    }

    fn exists(&mut self, c: &ConceptExpr) -> Result<Option<(usize, usize)>, OracleError> {
        match c {
            ConceptExpr::Exists { role, args } if args.len() == 1 => {
                let r = self.get(&format!("role:{role}"));
                Ok(Some((r, self.atom(&args[0])?)))
            }
            ConceptExpr::Exists { .. } => Err(OracleError::Unsupported("n-ary role".into())),
            _ => Ok(None),
        }
    }
}

/// Classifies a normalized binary EL+ CBox with the completion rules for
/// `⊑`, `⊓`, `∃`, `⊥`, role hierarchies and role chains of length two.
pub fn completion_classify(cbox: &CBox) -> Result<SubsumptionSet, OracleError> {
    let mut ix = Index::default();
    ix.get("top");
    ix.get("bot");
    let mut nf1: Vec<(usize, usize)> = Vec::new();
    let mut nf2: Vec<(usize, usize, usize)> = Vec::new();
    let mut nf3: Vec<(usize, usize, usize)> = Vec::new();
    let mut nf4: Vec<(usize, usize, usize)> = Vec::new();
    let mut sub_role: Vec<(usize, usize)> = Vec::new();
    let mut chains: Vec<(usize, usize, usize)> = Vec::new();
    for ax in &cbox.axioms {
        match ax {
            Axiom::Gci { lhs, rhs } => {
                if let Some((r, b)) = ix.exists(rhs)? {
                    nf3.push((ix.atom(lhs)?, r, b));
                } else if let Some((r, a)) = ix.exists(lhs)? {
                    nf4.push((r, a, ix.atom(rhs)?));
                } else if let ConceptExpr::Conj(a, b) = lhs {
                    nf2.push((ix.atom(a)?, ix.atom(b)?, ix.atom(rhs)?));
                } else {
                    nf1.push((ix.atom(lhs)?, ix.atom(rhs)?));
                }
            }
            Axiom::RoleIncl { lhs, rhs: RoleTarget::Role(s), guard: None } => {
                let s = ix.get(&format!("role:{s}"));
                match lhs {
                    RoleChain::Role(r) => sub_role.push((ix.get(&format!("role:{r}")), s)),
                    RoleChain::Compose(rs) if rs.len() == 2 => {
                        let a = ix.get(&format!("role:{}", rs[0]));
                        let b = ix.get(&format!("role:{}", rs[1]));
                        chains.push((a, b, s));
                    }
                    _ => return Err(OracleError::NotNormalized),
                }
            }
            _ => return Err(OracleError::Unsupported("guards, id, tuples and restrictions".into())),
        }
    }
    for q in &cbox.queries {
        for c in [&q.sub, &q.sup] {
            c.visit_names(&mut |n, _| {
                ix.get(n);
            });
        }
    }
    let n = ix.names.len();
    let mut s: Vec<HashSet<usize>> = (0..n).map(|a| HashSet::from([a, TOP])).collect();
    // role -> set of (c, d)
    let mut rel: HashMap<usize, HashSet<(usize, usize)>> = HashMap::new();
    loop {
        let mut changed = false;
        for c in 0..n {
            let sc: Vec<usize> = s[c].iter().copied().collect();
            let mut add: Vec<usize> = Vec::new();
            for &(a, b) in &nf1 {
                if s[c].contains(&a) {
                    add.push(b);
                }
            }
            for &(a1, a2, b) in &nf2 {
                if s[c].contains(&a1) && s[c].contains(&a2) {
                    add.push(b);
                }
            }
            for b in add {
                changed |= s[c].insert(b);
            }
            for &(a, r, b) in &nf3 {
                if sc.contains(&a) {
                    changed |= rel.entry(r).or_default().insert((c, b));
                }
            }
        }
        let snapshot: Vec<(usize, usize, usize)> =
            rel.iter().flat_map(|(r, ps)| ps.iter().map(move |(c, d)| (*r, *c, *d))).collect();
        for &(r, c, d) in &snapshot {
            for &(r2, a, e) in &nf4 {
                if r2 == r && s[d].contains(&a) {
                    changed |= s[c].insert(e);
                }
            }
            if s[d].contains(&BOT) {
                changed |= s[c].insert(BOT);
            }
            for &(r1, r2) in &sub_role {
                if r1 == r {
                    changed |= rel.entry(r2).or_default().insert((c, d));
                }
            }
            for &(r1, r2, r3) in &chains {
                if r1 != r {
                    continue;
                }
                let next: Vec<usize> =
                    rel.get(&r2).map(|ps| ps.iter().filter(|(x, _)| *x == d).map(|(_, e)| *e).collect()).unwrap_or_default();
                for e in next {
                    changed |= rel.entry(r3).or_default().insert((c, e));
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = SubsumptionSet::default();
    for (i, name) in ix.names.iter().enumerate() {
        if name.starts_with("role:") {
            continue;
        }
        let set = s[i].iter().map(|j| ix.names[*j].clone()).collect();
        out.subsumers.insert(name.clone(), set);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_cbox;

    #[test]
    fn empty_cbox() {
        let s = completion_classify(&parse_cbox("? A sub B").unwrap()).unwrap();
        assert_eq!(s.subsumers["A"], BTreeSet::from(["A".to_string(), "top".to_string()]));
        assert!(!s.subsumes("A", "B"));
    }

    #[test]
    fn chains_and_bottom() {
        let text = "A sub exists r . B\nB sub exists s . C\nrole r o s sub t\nexists t . C sub D\nE sub exists r . F\nF sub bot";
        let s = completion_classify(&parse_cbox(text).unwrap()).unwrap();
        assert!(s.subsumes("A", "D"));
        assert!(!s.subsumes("B", "D"));
        assert!(s.subsumes("E", "A"));
    }
}
