//! Structural transformation of binary EL+ CBoxes into normal form:
//! `A ⊑ B`, `A1 ⊓ A2 ⊑ B`, `A ⊑ ∃r.B`, `∃r.A ⊑ B` over names, `⊤` and `⊥`,
//! and role inclusions `r ⊑ s`, `r1 ∘ r2 ⊑ s`.

use std::collections::HashSet;

use crate::syntax::{Axiom, CBox, ConceptExpr, Query, RoleChain, RoleSig, RoleTarget, Sort};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("unsupported construct: {0}")]
    UnsupportedConstruct(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedCBox {
    pub cbox: CBox,
    /// Introduced concept and role names, in creation order.
    pub fresh: Vec<String>,
}

fn atomic(c: &ConceptExpr) -> bool {
    c.is_atomic()
}

struct Normalizer {
    used: HashSet<String>,
    counter: usize,
    fresh: Vec<String>,
    out: Vec<Axiom>,
}

impl Normalizer {
    fn fresh(&mut self) -> String {
        loop {
            let n = format!("__n{}", self.counter);
            self.counter += 1;
            if self.used.insert(n.clone()) {
                self.fresh.push(n.clone());
                return n;
            }
        }
    }

    fn fresh_concept(&mut self) -> ConceptExpr {
        ConceptExpr::name(&self.fresh())
    }

    fn emit(&mut self, lhs: ConceptExpr, rhs: ConceptExpr) {
        self.out.push(Axiom::Gci { lhs, rhs });
    }

    fn gci(&mut self, lhs: ConceptExpr, rhs: ConceptExpr) {
        let mut work = vec![(lhs, rhs)];
        while let Some((l, r)) = work.pop() {
            if matches!(r, ConceptExpr::Top) || matches!(l, ConceptExpr::Bottom) {
                continue;
            }
            if let ConceptExpr::Conj(a, b) = r {
                work.push((l.clone(), *b));
                work.push((l, *a));
                continue;
            }
            match (atomic(&l), atomic(&r)) {
                (true, true) => self.emit(l, r),
                (true, false) => {
                    let ConceptExpr::Exists { role, mut args } = r else { unreachable!() };
                    let d = args.pop().unwrap();
                    if atomic(&d) {
                        self.emit(l, ConceptExpr::exists(&role, d));
                    } else {
                        let x = self.fresh_concept();
                        self.emit(l, ConceptExpr::exists(&role, x.clone()));
                        work.push((x, d));
                    }
                }
                (false, true) => match l {
                    ConceptExpr::Conj(a, b) => {
                        let a = self.name_lhs(*a, &mut work);
                        let b = self.name_lhs(*b, &mut work);
                        self.emit(a.and(b), r);
                    }
                    ConceptExpr::Exists { role, mut args } => {
                        let c = self.name_lhs(args.pop().unwrap(), &mut work);
                        self.emit(ConceptExpr::exists(&role, c), r);
                    }
                    _ => unreachable!(),
                },
                (false, false) => {
                    let x = self.fresh_concept();
                    work.push((x.clone(), r));
                    work.push((l, x));
                }
            }
        }
    }

    /// An atomic stand-in for `c` on a left-hand side.
    fn name_lhs(&mut self, c: ConceptExpr, work: &mut Vec<(ConceptExpr, ConceptExpr)>) -> ConceptExpr {
        if atomic(&c) {
            return c;
        }
        let x = self.fresh_concept();
        work.push((c, x.clone()));
        x
    }
}

fn check_concept(c: &ConceptExpr) -> Result<(), NormalizeError> {
    match c {
        ConceptExpr::Bottom | ConceptExpr::Top => Ok(()),
        ConceptExpr::Name(n, s) => match s {
            Sort::Concept => Ok(()),
            Sort::Num => Err(NormalizeError::UnsupportedConstruct(format!("numeric name `{n}`"))),
        },
        ConceptExpr::Conj(a, b) => {
            check_concept(a)?;
            check_concept(b)
        }
        ConceptExpr::Exists { role, args } => {
            if args.len() != 1 {
                return Err(NormalizeError::UnsupportedConstruct(format!("n-ary role `{role}`")));
            }
            check_concept(&args[0])
        }
        ConceptExpr::Interval(_) => Err(NormalizeError::UnsupportedConstruct("interval concept".into())),
    }
}

/// Normal form of a binary EL+ CBox. Queries `C ⊑ D` with complex sides
/// become `X ⊑ Y` for fresh `X ⊑ C` and `D ⊑ Y`.
pub fn normalize(cbox: &CBox) -> Result<NormalizedCBox, NormalizeError> {
    for (name, sig) in &cbox.roles {
        if !sig.is_binary_concept() {
            return Err(NormalizeError::UnsupportedConstruct(format!("role `{name}` is not binary over concepts")));
        }
    }
    let mut used: HashSet<String> = cbox.roles.keys().cloned().collect();
    used.extend(cbox.concept_names());
    let mut n = Normalizer { used, counter: 0, fresh: Vec::new(), out: Vec::new() };
    let mut roles = cbox.roles.clone();
    for ax in &cbox.axioms {
        match ax {
            Axiom::Gci { lhs, rhs } => {
                check_concept(lhs)?;
                check_concept(rhs)?;
                n.gci(lhs.clone(), rhs.clone());
            }
            Axiom::RoleIncl { guard: Some(_), .. } => {
                return Err(NormalizeError::UnsupportedConstruct("guarded role inclusion".into()));
            }
            Axiom::RoleIncl { rhs: RoleTarget::Id, .. } => {
                return Err(NormalizeError::UnsupportedConstruct("inclusion into id".into()));
            }
            Axiom::RoleIncl { lhs: RoleChain::Tuple(..), .. } => {
                return Err(NormalizeError::UnsupportedConstruct("tuple composition".into()));
            }
            Axiom::RoleIncl { lhs: RoleChain::Role(r), rhs, guard: None } => {
                n.out.push(Axiom::RoleIncl { lhs: RoleChain::Role(r.clone()), rhs: rhs.clone(), guard: None });
            }
            Axiom::RoleIncl { lhs: RoleChain::Compose(rs), rhs, guard: None } => {
                let mut left = rs[0].clone();
                for (i, r) in rs.iter().enumerate().skip(1) {
                    let target = if i + 1 == rs.len() {
                        rhs.clone()
                    } else {
                        let u = n.fresh();
                        roles.insert(u.clone(), RoleSig::concept(2));
                        RoleTarget::Role(u)
                    };
                    n.out.push(Axiom::RoleIncl {
                        lhs: RoleChain::Compose(vec![left.clone(), r.clone()]),
                        rhs: target.clone(),
                        guard: None,
                    });
                    if let RoleTarget::Role(u) = target {
                        left = u;
                    }
                }
            }
            Axiom::Restriction { role, .. } => {
                return Err(NormalizeError::UnsupportedConstruct(format!("role restriction `{role}`")));
            }
        }
    }
    let mut queries = Vec::with_capacity(cbox.queries.len());
    for q in &cbox.queries {
        check_concept(&q.sub)?;
        check_concept(&q.sup)?;
        let sub = if atomic(&q.sub) {
            q.sub.clone()
        } else {
            let x = n.fresh_concept();
            n.gci(x.clone(), q.sub.clone());
            x
        };
        let sup = if atomic(&q.sup) {
            q.sup.clone()
        } else {
            let y = n.fresh_concept();
            n.gci(q.sup.clone(), y.clone());
            y
        };
        queries.push(Query { sub, sup });
    }
    Ok(NormalizedCBox { cbox: CBox { roles, axioms: n.out, queries }, fresh: n.fresh })
}

/// True when every axiom has one of the normal-form shapes.
pub fn is_normal(cbox: &CBox) -> bool {
    cbox.axioms.iter().all(|ax| match ax {
        Axiom::Gci { lhs, rhs } => {
            let lhs_ok = match lhs {
                ConceptExpr::Conj(a, b) => atomic(a) && atomic(b) && atomic(rhs),
                ConceptExpr::Exists { args, .. } => args.len() == 1 && atomic(&args[0]) && atomic(rhs),
                l => atomic(l),
            };
            let rhs_ok = match rhs {
                ConceptExpr::Exists { args, .. } => atomic(lhs) && args.len() == 1 && atomic(&args[0]),
                r => atomic(r),
            };
            lhs_ok && rhs_ok
        }
        Axiom::RoleIncl { lhs, rhs: RoleTarget::Role(_), guard: None } => match lhs {
            RoleChain::Role(_) => true,
            RoleChain::Compose(rs) => rs.len() == 2,
            RoleChain::Tuple(..) => false,
        },
        _ => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_cbox;

    #[test]
    fn normal_input_is_unchanged() {
        let cb = parse_cbox("A sub B\nA and B sub C\nA sub exists r . B\nexists r . A sub B\nrole r o s sub t").unwrap();
        let n = normalize(&cb).unwrap();
        assert!(n.fresh.is_empty());
        assert_eq!(n.cbox.axioms, cb.axioms);
    }

    #[test]
    fn nested_existential_gets_fresh_name() {
        let cb = parse_cbox("A sub exists r1 . exists r2 . B and C").unwrap();
        let n = normalize(&cb).unwrap();
        assert!(is_normal(&n.cbox));
        assert_eq!(n.fresh, vec!["__n0"]);
        let text = crate::syntax::render(&n.cbox);
        assert!(text.contains("A sub exists r1 . __n0"), "{text}");
        assert!(text.contains("__n0 sub exists r2 . B"), "{text}");
        assert!(text.contains("A sub C"), "{text}");
    }

    #[test]
    fn long_chain_is_split() {
        let cb = parse_cbox("role r1 o r2 o r3 sub s").unwrap();
        let n = normalize(&cb).unwrap();
        let text = crate::syntax::render(&n.cbox);
        assert!(text.contains("role r1 o r2 sub __n0"), "{text}");
        assert!(text.contains("role __n0 o r3 sub s"), "{text}");
    }

    #[test]
    fn fresh_names_avoid_user_names() {
        let cb = parse_cbox("__n0 sub exists r . (A and B)").unwrap();
        let n = normalize(&cb).unwrap();
        assert_eq!(n.fresh, vec!["__n1"]);
    }

    #[test]
    fn rejects_guards_and_nary() {
        assert!(normalize(&parse_cbox("role r sub s guard C").unwrap()).is_err());
        assert!(normalize(&parse_cbox("decl role r : 3\nexists r . (A, B) sub C").unwrap()).is_err());
        assert!(normalize(&parse_cbox("role r o s sub id").unwrap()).is_err());
    }
}
