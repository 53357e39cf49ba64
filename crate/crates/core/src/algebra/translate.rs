use std::collections::HashMap;

use super::{OpId, TermId, TermStore};
use crate::syntax::{Axiom, CBox, ConceptExpr, Query, RoleChain, RoleTarget, Sort};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PatArg {
    Var(usize),
    /// Fixed argument, coming from a role restriction.
    Ground(TermId),
}

/// Operator applied to variables and ground terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpPattern {
    pub op: OpId,
    pub args: Vec<PatArg>,
}

impl OpPattern {
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.args.iter().filter_map(|a| match a {
            PatArg::Var(v) => Some(*v),
            PatArg::Ground(_) => None,
        })
    }
}

/// Guard atom `var <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Guard {
    pub var: usize,
    pub bound: TermId,
}

/// Flat axioms of the operator theory. Variables are numbered per axiom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgAxiom {
    /// `x1 <= y1 & ... & xn <= yn -> f(x) <= f(y)`
    Mon(OpId),
    /// `xj <= 0 -> f(x) <= 0` for every position `j`.
    Strict(OpId),
    /// `guards -> g(x) <= h(x)`
    K1 { g: OpPattern, h: OpPattern, guards: Vec<Guard> },
    /// `z_i <= g_i(y_i) for all i & guards -> f(z) <= h(y_1, ..., y_n)`;
    /// `f` binds `z_i` as variable `i`.
    K2 { f: OpPattern, inner: Vec<OpPattern>, h: OpPattern, guards: Vec<Guard> },
    /// `z_i <= g_i(x) for all i & guards -> f(z) <= x`; `x` is variable `n`.
    K3 { f: OpPattern, inner: Vec<OpPattern>, guards: Vec<Guard> },
}

/// Ground proof goal: the positive atoms and the single negated atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub positives: Vec<(TermId, TermId)>,
    pub negative: (TermId, TermId),
}

#[derive(Clone, Debug)]
enum RoleRef {
    Base(OpId),
    Restricted { base: String, position: usize, filler: ConceptExpr },
}

/// A translated CBox. Queries are added to the same store.
#[derive(Clone, Debug)]
pub struct Translation {
    pub store: TermStore,
    pub axioms: Vec<AlgAxiom>,
    /// One atom per GCI.
    pub positives: Vec<(TermId, TermId)>,
    roles: HashMap<String, RoleRef>,
    role_sigs: HashMap<String, Vec<Sort>>,
}

/// Translates `cbox` and `query` into operator axioms and a ground goal.
pub fn translate(cbox: &CBox, query: &Query) -> (Translation, Goal) {
    let mut t = Translation::new(cbox);
    let goal = t.goal(query);
    (t, goal)
}

impl Translation {
    pub fn new(cbox: &CBox) -> Self {
        let mut t = Translation {
            store: TermStore::new(),
            axioms: Vec::new(),
            positives: Vec::new(),
            roles: HashMap::new(),
            role_sigs: HashMap::new(),
        };
        for (name, sig) in &cbox.roles {
            t.role_sigs.insert(name.clone(), sig.positions.clone());
            match cbox.restriction(name) {
                Some((base, position, filler)) => {
                    t.roles.insert(
                        name.clone(),
                        RoleRef::Restricted { base: base.to_string(), position, filler: filler.clone() },
                    );
                }
                None => {
                    let op = t.store.add_op(name, format!("f_{name}"), sig.fillers().to_vec());
                    t.roles.insert(name.clone(), RoleRef::Base(op));
                }
            }
        }
        let mut fresh = 0usize;
        for ax in &cbox.axioms {
            match ax {
                Axiom::Gci { lhs, rhs } => {
                    let l = t.concept(lhs);
                    let r = t.concept(rhs);
                    t.positives.push((l, r));
                }
                Axiom::RoleIncl { lhs, rhs, guard } => {
                    let guard = guard.as_ref().map(|g| t.concept(g));
                    t.role_inclusion(lhs, rhs, guard, &mut fresh);
                }
                Axiom::Restriction { .. } => {}
            }
        }
        for i in 0..t.store.ops().len() {
            t.axioms.push(AlgAxiom::Mon(OpId(i as u32)));
            t.axioms.push(AlgAxiom::Strict(OpId(i as u32)));
        }
        t
    }

    pub fn goal(&mut self, query: &Query) -> Goal {
        let a = self.concept(&query.sub);
        let b = self.concept(&query.sup);
        Goal { positives: self.positives.clone(), negative: (a, b) }
    }

    pub fn concept(&mut self, c: &ConceptExpr) -> TermId {
        match c {
            ConceptExpr::Bottom => self.store.zero(),
            ConceptExpr::Top => self.store.one(),
            ConceptExpr::Name(n, s) => self.store.constant(n, *s),
            ConceptExpr::Conj(l, r) => {
                let a = self.concept(l);
                let b = self.concept(r);
                self.store.meet2(a, b)
            }
            ConceptExpr::Exists { role, args } => {
                let args = args.iter().map(|a| self.concept(a)).collect();
                self.apply_role(role, args)
            }
            ConceptExpr::Interval(i) => self.store.interval(i.clone()),
        }
    }

    fn apply_role(&mut self, role: &str, mut args: Vec<TermId>) -> TermId {
        match self.roles[role].clone() {
            RoleRef::Base(op) => self.store.apply(op, args),
            RoleRef::Restricted { base, position, filler } => {
                let c = self.concept(&filler);
                args.insert(position - 2, c);
                self.apply_role(&base, args)
            }
        }
    }

    fn pattern(&mut self, role: &str, mut args: Vec<PatArg>) -> OpPattern {
        match self.roles[role].clone() {
            RoleRef::Base(op) => OpPattern { op, args },
            RoleRef::Restricted { base, position, filler } => {
                let c = self.concept(&filler);
                args.insert(position - 2, PatArg::Ground(c));
                self.pattern(&base, args)
            }
        }
    }

    fn fillers(&self, role: &str) -> Vec<Sort> {
        self.role_sigs[role][1..].to_vec()
    }

    fn guards_for(&self, guard: Option<TermId>, vars: &[(usize, Sort)]) -> Vec<Guard> {
        let Some(bound) = guard else { return Vec::new() };
        let gs = self.store.sort(bound);
        vars.iter()
            .filter(|(_, s)| gs.is_none_or(|g| g == *s))
            .map(|(v, _)| Guard { var: *v, bound })
            .collect()
    }

    fn role_inclusion(&mut self, lhs: &RoleChain, rhs: &RoleTarget, guard: Option<TermId>, fresh: &mut usize) {
        match lhs {
            RoleChain::Role(r) => {
                let sorts = self.fillers(r);
                let vars: Vec<PatArg> = (0..sorts.len()).map(PatArg::Var).collect();
                let g = self.pattern(r, vars.clone());
                let RoleTarget::Role(s) = rhs else { unreachable!("`r sub id` is rejected by the parser") };
                let h = self.pattern(s, vars);
                let typed: Vec<(usize, Sort)> = sorts.into_iter().enumerate().collect();
                let guards = self.guards_for(guard, &typed);
                self.axioms.push(AlgAxiom::K1 { g, h, guards });
            }
            RoleChain::Compose(rs) if rs.len() == 2 => {
                let tuple = RoleChain::Tuple(rs[0].clone(), vec![rs[1].clone()]);
                self.role_inclusion(&tuple, rhs, guard, fresh);
            }
            RoleChain::Compose(rs) => {
                let name = loop {
                    let n = format!("__c{}", *fresh);
                    *fresh += 1;
                    if !self.roles.contains_key(&n) {
                        break n;
                    }
                };
                let sig = self.role_sigs[rs.last().unwrap()].clone();
                let op = self.store.add_op(&name, format!("f_{name}"), sig[1..].to_vec());
                self.roles.insert(name.clone(), RoleRef::Base(op));
                self.role_sigs.insert(name.clone(), sig);
                self.role_inclusion(&RoleChain::Compose(rs[1..].to_vec()), &RoleTarget::Role(name.clone()), None, fresh);
                let tuple = RoleChain::Tuple(rs[0].clone(), vec![name]);
                self.role_inclusion(&tuple, rhs, guard, fresh);
            }
            RoleChain::Tuple(r, ss) => {
                let n = ss.len();
                let f = self.pattern(r, (0..n).map(PatArg::Var).collect());
                match rhs {
                    RoleTarget::Role(t) => {
                        let mut next = n;
                        let mut inner = Vec::with_capacity(n);
                        let mut all = Vec::new();
                        let mut typed = Vec::new();
                        for s in ss {
                            let sorts = self.fillers(s);
                            let block: Vec<PatArg> = (next..next + sorts.len()).map(PatArg::Var).collect();
                            typed.extend((next..next + sorts.len()).zip(sorts.iter().copied()));
                            next += sorts.len();
                            all.extend(block.iter().cloned());
                            inner.push(self.pattern(s, block));
                        }
                        let h = self.pattern(t, all);
                        let guards = self.guards_for(guard, &typed);
                        self.axioms.push(AlgAxiom::K2 { f, inner, h, guards });
                    }
                    RoleTarget::Id => {
                        let inner = ss.iter().map(|s| self.pattern(s, vec![PatArg::Var(n)])).collect();
                        let guards = self.guards_for(guard, &[(n, Sort::Concept)]);
                        self.axioms.push(AlgAxiom::K3 { f, inner, guards });
                    }
                }
            }
        }
    }
}
