use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::syntax::{Axiom, CBox, ConceptExpr, Query, RoleChain, RoleTarget, Sort};

use super::sat::{solve, Cnf, Lit};

/// A finite interpretation in which every axiom holds and the query fails
/// at `witness`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterModel {
    pub size: usize,
    pub witness: usize,
    pub concepts: BTreeMap<String, BTreeSet<usize>>,
    /// Base roles only; restricted roles are derived.
    pub roles: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..n).map(move |e| [t.clone(), vec![e]].concat())).collect();
    }
    out
}

fn has_interval(c: &ConceptExpr) -> bool {
    match c {
        ConceptExpr::Interval(_) => true,
        ConceptExpr::Conj(a, b) => has_interval(a) || has_interval(b),
        ConceptExpr::Exists { args, .. } => args.iter().any(has_interval),
        _ => false,
    }
}

fn supported(cbox: &CBox, query: &Query) -> bool {
    if cbox.roles.values().any(|s| s.positions.contains(&Sort::Num)) {
        return false;
    }
    let mut exprs: Vec<&ConceptExpr> = vec![&query.sub, &query.sup];
    for ax in &cbox.axioms {
        match ax {
            Axiom::Gci { lhs, rhs } => exprs.extend([lhs, rhs]),
            Axiom::RoleIncl { guard: Some(g), .. } => exprs.push(g),
            Axiom::Restriction { filler, .. } => exprs.push(filler),
            _ => {}
        }
    }
    !exprs.into_iter().any(has_interval)
}

struct Encoder<'a> {
    cbox: &'a CBox,
    n: usize,
    cnf: Cnf,
    truth: Lit,
    names: HashMap<(String, usize), Lit>,
    rels: HashMap<(String, Vec<usize>), Lit>,
    memo: HashMap<(ConceptExpr, usize), Lit>,
}

impl Encoder<'_> {
    fn fresh(&mut self) -> Lit {
        Lit::pos(self.cnf.new_var())
    }

    fn and(&mut self, ls: Vec<Lit>) -> Lit {
        if ls.len() == 1 {
            return ls[0];
        }
        let v = self.fresh();
        for &l in &ls {
            self.cnf.add(vec![!v, l]);
        }
        let mut c: Vec<Lit> = ls.iter().map(|l| !*l).collect();
        c.push(v);
        self.cnf.add(c);
        v
    }

    fn or(&mut self, ls: Vec<Lit>) -> Lit {
        if ls.is_empty() {
            return !self.truth;
        }
        if ls.len() == 1 {
            return ls[0];
        }
        let v = self.fresh();
        for &l in &ls {
            self.cnf.add(vec![!l, v]);
        }
        let mut c = ls;
        c.push(!v);
        self.cnf.add(c);
        v
    }

    fn arity(&self, role: &str) -> usize {
        self.cbox.roles[role].arity()
    }

    fn role(&mut self, role: &str, t: &[usize]) -> Lit {
        let key = (role.to_string(), t.to_vec());
        if let Some(l) = self.rels.get(&key) {
            return *l;
        }
        let l = match self.cbox.restriction(role) {
            None => self.fresh(),
            Some((base, position, filler)) => {
                let (base, filler) = (base.to_string(), filler.clone());
                let mut alts = Vec::new();
                for z in 0..self.n {
                    let mut full = t.to_vec();
                    full.insert(position - 1, z);
                    let r = self.role(&base, &full);
                    let c = self.concept(&filler, z);
                    alts.push(self.and(vec![r, c]));
                }
                self.or(alts)
            }
        };
        self.rels.insert(key, l);
        l
    }

    fn concept(&mut self, c: &ConceptExpr, x: usize) -> Lit {
        if let Some(l) = self.memo.get(&(c.clone(), x)) {
            return *l;
        }
        let l = match c {
            ConceptExpr::Top => self.truth,
            ConceptExpr::Bottom => !self.truth,
            ConceptExpr::Name(name, _) => {
                let key = (name.clone(), x);
                match self.names.get(&key) {
                    Some(l) => *l,
                    None => {
                        let l = self.fresh();
                        self.names.insert(key, l);
                        l
                    }
                }
            }
            ConceptExpr::Conj(a, b) => {
                let a = self.concept(a, x);
                let b = self.concept(b, x);
                self.and(vec![a, b])
            }
            ConceptExpr::Exists { role, args } => {
                let mut alts = Vec::new();
                for ys in tuples(self.n, args.len()) {
                    let mut conj = vec![self.role(role, &[vec![x], ys.clone()].concat())];
                    for (a, y) in args.iter().zip(&ys) {
                        conj.push(self.concept(a, *y));
                    }
                    alts.push(self.and(conj));
                }
                self.or(alts)
            }
            ConceptExpr::Interval(_) => unreachable!("numeric CBoxes are rejected"),
        };
        self.memo.insert((c.clone(), x), l);
        l
    }

    fn guard_lits(&mut self, guard: Option<&ConceptExpr>, elems: &[usize]) -> Vec<Lit> {
        match guard {
            None => Vec::new(),
            Some(g) => elems.iter().map(|e| !self.concept(g, *e)).collect(),
        }
    }

    fn axiom(&mut self, ax: &Axiom) {
        let n = self.n;
        match ax {
            Axiom::Gci { lhs, rhs } => {
                for x in 0..n {
                    let l = self.concept(lhs, x);
                    let r = self.concept(rhs, x);
                    self.cnf.add(vec![!l, r]);
                }
            }
            Axiom::RoleIncl { lhs: RoleChain::Role(r), rhs, guard } => {
                let RoleTarget::Role(s) = rhs else { return };
                for t in tuples(n, self.arity(r)) {
                    let mut c = vec![!self.role(r, &t)];
                    c.extend(self.guard_lits(guard.as_ref(), &t[1..]));
                    c.push(self.role(s, &t));
                    self.cnf.add(c);
                }
            }
            Axiom::RoleIncl { lhs: RoleChain::Compose(rs), rhs, guard } => {
                for path in tuples(n, rs.len() + 1) {
                    let mut c: Vec<Lit> = rs.iter().enumerate().map(|(i, r)| !self.role(r, &path[i..i + 2])).collect();
                    let last = *path.last().unwrap();
                    c.extend(self.guard_lits(guard.as_ref(), &[last]));
                    match rhs {
                        RoleTarget::Role(s) => c.push(self.role(s, &[path[0], last])),
                        RoleTarget::Id if path[0] == last => continue,
                        RoleTarget::Id => {}
                    }
                    self.cnf.add(c);
                }
            }
            Axiom::RoleIncl { lhs: RoleChain::Tuple(r, ss), rhs, guard } => {
                let k = ss.len();
                let widths: Vec<usize> = ss.iter().map(|s| self.arity(s) - 1).collect();
                for head in tuples(n, k + 1) {
                    for rest in tuples(n, widths.iter().sum()) {
                        let mut blocks = Vec::with_capacity(k);
                        let mut off = 0;
                        for w in &widths {
                            blocks.push(&rest[off..off + w]);
                            off += w;
                        }
                        let mut c = vec![!self.role(r, &head)];
                        for (i, s) in ss.iter().enumerate() {
                            let t = [vec![head[i + 1]], blocks[i].to_vec()].concat();
                            c.push(!self.role(s, &t));
                        }
                        c.extend(self.guard_lits(guard.as_ref(), &rest));
                        match rhs {
                            RoleTarget::Role(t) => c.push(self.role(t, &[vec![head[0]], rest.clone()].concat())),
                            RoleTarget::Id if rest.contains(&head[0]) => continue,
                            RoleTarget::Id => {}
                        }
                        self.cnf.add(c);
                    }
                }
            }
            Axiom::Restriction { .. } => {}
        }
    }
}

/// Searches interpretations with 1 to `max_size` elements for one that
/// satisfies `cbox` and refutes `query`. `None` for numeric CBoxes or when
/// no such interpretation exists within the bound.
pub fn bounded_model_search(cbox: &CBox, query: &Query, max_size: usize) -> Option<CounterModel> {
    assert!(max_size <= 4, "domain bound above 4");
    if !supported(cbox, query) {
        return None;
    }
    (1..=max_size).find_map(|n| search(cbox, query, n))
}

fn search(cbox: &CBox, query: &Query, n: usize) -> Option<CounterModel> {
    let mut cnf = Cnf::default();
    let truth = Lit::pos(cnf.new_var());
    cnf.add(vec![truth]);
    let mut e = Encoder {
        cbox,
        n,
        cnf,
        truth,
        names: HashMap::new(),
        rels: HashMap::new(),
        memo: HashMap::new(),
    };
    for ax in &cbox.axioms {
        e.axiom(ax);
    }
    let mut witnesses = Vec::with_capacity(n);
    for x in 0..n {
        let sub = e.concept(&query.sub, x);
        let sup = e.concept(&query.sup, x);
        witnesses.push(e.and(vec![sub, !sup]));
    }
    e.cnf.add(witnesses.clone());
    let m = solve(&e.cnf)?;
    let val = |l: Lit| m[l.var() as usize] != l.negated();
    let witness = witnesses.iter().position(|w| val(*w)).expect("some witness holds");
    let mut concepts: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for name in cbox.concept_names() {
        concepts.entry(name).or_default();
    }
    for ((name, x), l) in &e.names {
        if val(*l) {
            concepts.entry(name.clone()).or_default().insert(*x);
        }
    }
    let mut roles: BTreeMap<String, BTreeSet<Vec<usize>>> = BTreeMap::new();
    for r in cbox.roles.keys().filter(|r| cbox.restriction(r).is_none()) {
        let set = tuples(n, cbox.roles[r].arity())
            .into_iter()
            .filter(|t| e.rels.get(&(r.clone(), t.clone())).is_some_and(|l| val(*l)))
            .collect();
        roles.insert(r.clone(), set);
    }
    Some(CounterModel { size: n, witness, concepts, roles })
}

impl CounterModel {
    fn role_holds(&self, cbox: &CBox, role: &str, t: &[usize]) -> bool {
        match cbox.restriction(role) {
            None => self.roles.get(role).is_some_and(|s| s.contains(t)),
            Some((base, position, filler)) => (0..self.size).any(|z| {
                let mut full = t.to_vec();
                full.insert(position - 1, z);
                self.role_holds(cbox, base, &full) && self.eval(cbox, filler, z)
            }),
        }
    }

    /// Direct evaluation of `c` at `x`.
    pub fn eval(&self, cbox: &CBox, c: &ConceptExpr, x: usize) -> bool {
        match c {
            ConceptExpr::Top => true,
            ConceptExpr::Bottom => false,
            ConceptExpr::Name(n, _) => self.concepts.get(n).is_some_and(|s| s.contains(&x)),
            ConceptExpr::Conj(a, b) => self.eval(cbox, a, x) && self.eval(cbox, b, x),
            ConceptExpr::Exists { role, args } => tuples(self.size, args.len()).into_iter().any(|ys| {
                self.role_holds(cbox, role, &[vec![x], ys.clone()].concat())
                    && args.iter().zip(&ys).all(|(a, y)| self.eval(cbox, a, *y))
            }),
            ConceptExpr::Interval(_) => false,
        }
    }

    fn guard_ok(&self, cbox: &CBox, guard: Option<&ConceptExpr>, elems: &[usize]) -> bool {
        guard.is_none_or(|g| elems.iter().all(|e| self.eval(cbox, g, *e)))
    }

    /// True iff every axiom of `cbox` holds and `query` fails at the witness.
    pub fn verify(&self, cbox: &CBox, query: &Query) -> bool {
        let n = self.size;
        let ok = cbox.axioms.iter().all(|ax| match ax {
            Axiom::Gci { lhs, rhs } => (0..n).all(|x| !self.eval(cbox, lhs, x) || self.eval(cbox, rhs, x)),
            Axiom::RoleIncl { lhs: RoleChain::Role(r), rhs, guard } => {
                let RoleTarget::Role(s) = rhs else { return true };
                tuples(n, cbox.roles[r].arity()).iter().all(|t| {
                    !self.role_holds(cbox, r, t)
                        || !self.guard_ok(cbox, guard.as_ref(), &t[1..])
                        || self.role_holds(cbox, s, t)
                })
            }
            Axiom::RoleIncl { lhs: RoleChain::Compose(rs), rhs, guard } => {
                tuples(n, rs.len() + 1).iter().all(|p| {
                    let last = *p.last().unwrap();
                    let fires = rs.iter().enumerate().all(|(i, r)| self.role_holds(cbox, r, &p[i..i + 2]))
                        && self.guard_ok(cbox, guard.as_ref(), &[last]);
                    !fires
                        || match rhs {
                            RoleTarget::Role(s) => self.role_holds(cbox, s, &[p[0], last]),
                            RoleTarget::Id => p[0] == last,
                        }
                })
            }
            Axiom::RoleIncl { lhs: RoleChain::Tuple(r, ss), rhs, guard } => {
                let widths: Vec<usize> = ss.iter().map(|s| cbox.roles[s].arity() - 1).collect();
                tuples(n, ss.len() + 1).iter().all(|head| {
                    tuples(n, widths.iter().sum()).iter().all(|rest| {
                        let mut off = 0;
                        let mut fires = self.role_holds(cbox, r, head);
                        for (i, s) in ss.iter().enumerate() {
                            let t = [vec![head[i + 1]], rest[off..off + widths[i]].to_vec()].concat();
                            off += widths[i];
                            fires = fires && self.role_holds(cbox, s, &t);
                        }
                        fires = fires && self.guard_ok(cbox, guard.as_ref(), rest);
                        !fires
                            || match rhs {
                                RoleTarget::Role(t) => {
                                    self.role_holds(cbox, t, &[vec![head[0]], rest.clone()].concat())
                                }
                                RoleTarget::Id => rest.contains(&head[0]),
                            }
                    })
                })
            }
            Axiom::Restriction { .. } => true,
        });
        ok && self.eval(cbox, &query.sub, self.witness) && !self.eval(cbox, &query.sup, self.witness)
    }
}
