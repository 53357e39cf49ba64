//! Interval concepts over the rationals and the combination of the concept
//! sort with the numeric sort.
//!
//! Numeric reasoning is restricted to conjunctions of `<=` / `=` between
//! endpoints (rational literals and named parameters). Inclusion between
//! interval concepts reduces to endpoint order; everything else on the
//! numeric side is ordinary poset reasoning.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::algebra::{Term, TermStore};
use crate::hornsat::{saturate, Atom, ConstId, HornClause, HornProblem, Origin};
use crate::reduce::Reduction;
use crate::syntax::{Endpoint, IntervalConcept, Sort};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NumRel {
    Le,
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NumAtom {
    pub rel: NumRel,
    pub lhs: Endpoint,
    pub rhs: Endpoint,
}

impl NumAtom {
    pub fn le(lhs: Endpoint, rhs: Endpoint) -> Self {
        NumAtom { rel: NumRel::Le, lhs, rhs }
    }
}

impl fmt::Display for NumAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            NumRel::Le => "<=",
            NumRel::Eq => "=",
            NumRel::Ne => "!=",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported numeric atom `{0}`: only <= and = are handled")]
pub struct UnsupportedAtom(pub String);

/// Order constraints between endpoints, queried by reachability. Literals
/// are chained in numeric order.
#[derive(Clone, Debug, Default)]
pub struct EndpointOrder {
    nodes: HashMap<Endpoint, usize>,
    keys: Vec<Endpoint>,
    edges: Vec<Vec<usize>>,
    literals: BTreeSet<crate::syntax::Rational>,
}

impl EndpointOrder {
    fn node(&mut self, e: &Endpoint) -> usize {
        if let Some(i) = self.nodes.get(e) {
            return *i;
        }
        let i = self.keys.len();
        self.nodes.insert(e.clone(), i);
        self.keys.push(e.clone());
        self.edges.push(Vec::new());
        if let Endpoint::Lit(q) = e {
            self.literals.insert(*q);
        }
        i
    }

    pub fn add(&mut self, atom: &NumAtom) -> Result<(), UnsupportedAtom> {
        let a = self.node(&atom.lhs);
        let b = self.node(&atom.rhs);
        match atom.rel {
            NumRel::Le => self.edges[a].push(b),
            NumRel::Eq => {
                self.edges[a].push(b);
                self.edges[b].push(a);
            }
            NumRel::Ne => return Err(UnsupportedAtom(atom.to_string())),
        }
        Ok(())
    }

    fn successors(&self, i: usize) -> Vec<usize> {
        let mut out = self.edges[i].clone();
        if let Endpoint::Lit(q) = &self.keys[i] {
            if let Some(next) = self.literals.range((std::ops::Bound::Excluded(*q), std::ops::Bound::Unbounded)).next() {
                out.push(self.nodes[&Endpoint::Lit(*next)]);
            }
        }
        out
    }

    fn reachable(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.keys.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(i) = queue.pop_front() {
            for j in self.successors(i) {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// False when some literal is forced below a smaller literal.
    pub fn consistent(&self) -> bool {
        for (i, k) in self.keys.iter().enumerate() {
            let Endpoint::Lit(p) = k else { continue };
            let seen = self.reachable(i);
            for (j, r) in self.keys.iter().enumerate() {
                if let Endpoint::Lit(q) = r {
                    if seen[j] && q < p {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn entails_le(&mut self, a: &Endpoint, b: &Endpoint) -> bool {
        if let (Endpoint::Lit(x), Endpoint::Lit(y)) = (a, b) {
            if x <= y {
                return true;
            }
        }
        if a == b || !self.consistent() {
            return true;
        }
        let i = self.node(a);
        let j = self.node(b);
        self.reachable(i)[j]
    }
}

/// True iff `constraints` entail `query` over the rationals.
pub fn num_entails(constraints: &[NumAtom], query: &NumAtom) -> Result<bool, UnsupportedAtom> {
    let mut order = EndpointOrder::default();
    for c in constraints {
        order.add(c)?;
    }
    match query.rel {
        NumRel::Le => Ok(order.entails_le(&query.lhs, &query.rhs)),
        NumRel::Eq => Ok(order.entails_le(&query.lhs, &query.rhs) && order.entails_le(&query.rhs, &query.lhs)),
        NumRel::Ne => Err(UnsupportedAtom(query.to_string())),
    }
}

/// Endpoint conditions equivalent to `i ⊆ j`; `None` when the inclusion
/// can never hold between non-empty intervals.
pub fn inclusion_condition(i: &IntervalConcept, j: &IntervalConcept) -> Option<Vec<NumAtom>> {
    use IntervalConcept::*;
    let le = |a: &Endpoint, b: &Endpoint| NumAtom::le(a.clone(), b.clone());
    match (i, j) {
        (Down(a), Down(b)) => Some(vec![le(a, b)]),
        (Up(a), Up(b)) => Some(vec![le(b, a)]),
        (Closed(a, _), Up(c)) => Some(vec![le(c, a)]),
        (Closed(_, b), Down(d)) => Some(vec![le(b, d)]),
        (Closed(a, b), Closed(c, d)) => Some(vec![le(c, a), le(b, d)]),
        (Up(_), Down(_)) | (Down(_), Up(_)) | (Up(_), Closed(..)) | (Down(_), Closed(..)) => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unsat,
    Sat,
}

#[derive(Clone, Debug, Default)]
pub struct CombineLog {
    /// Conclusions moved into their sort's facts, rendered.
    pub moved: Vec<String>,
    /// Endpoint facts derived from interval inclusions.
    pub endpoint_facts: Vec<String>,
    pub iterations: usize,
    pub mixed_clauses: usize,
    pub reason: Option<String>,
}

/// Decides a reduction containing numeric constants by alternating between
/// the concept poset, the numeric poset with interval semantics, and the
/// clauses whose premises mix both sorts.
pub fn combine_solve(red: &Reduction, store: &TermStore) -> (Verdict, CombineLog) {
    let sorts: Vec<Option<Sort>> = red.const_terms.iter().map(|t| store.sort(*t)).collect();
    let atom_sort = |a: &Atom| sorts[a.lhs as usize].or(sorts[a.rhs as usize]).unwrap_or(Sort::Concept);
    let mut concept = HornProblem { names: red.problem.names.clone(), mode: red.problem.mode, ..Default::default() };
    let mut num = concept.clone();
    let mut mixed: Vec<HornClause> = Vec::new();
    for (a, o) in &red.problem.facts {
        match atom_sort(a) {
            Sort::Concept => concept.facts.push((*a, *o)),
            Sort::Num => num.facts.push((*a, *o)),
        }
    }
    for c in &red.problem.clauses {
        let mut ss = c.premises.iter().chain(c.conclusion.iter()).map(&atom_sort);
        let first = ss.next().unwrap_or(Sort::Concept);
        if ss.all(|s| s == first) {
            match first {
                Sort::Concept => concept.clauses.push(c.clone()),
                Sort::Num => num.clauses.push(c.clone()),
            }
        } else {
            mixed.push(c.clone());
        }
    }
    let goal = red.problem.goal;
    let goal_sort = goal.map(|g| atom_sort(&g));

    let intervals: Vec<(ConstId, IntervalConcept)> = red
        .const_terms
        .iter()
        .enumerate()
        .filter_map(|(i, t)| match store.term(*t) {
            Term::Interval(iv) => Some((i as ConstId, iv.clone())),
            _ => None,
        })
        .collect();
    let zero = red.const_of[&store.zero()];
    let one = red.const_of[&store.one()];

    let mut log = CombineLog { mixed_clauses: mixed.len(), ..Default::default() };
    let mut order = EndpointOrder::default();
    for (_, iv) in &intervals {
        if let IntervalConcept::Closed(a, b) = iv {
            order.add(&NumAtom::le(a.clone(), b.clone())).unwrap();
        }
    }
    let mut endpoint_seen: BTreeSet<String> = BTreeSet::new();
    let mut pending: Vec<bool> = vec![true; mixed.len()];

    loop {
        log.iterations += 1;
        // numeric side to a fixpoint with interval semantics
        let num_sat = loop {
            let sat = saturate(&num);
            if sat.bottom.is_some() {
                log.reason = Some("empty clause on the numeric side".into());
                return (Verdict::Unsat, log);
            }
            let mut added = false;
            for (c, iv) in &intervals {
                if sat.holds(Atom::new(*c, zero)) {
                    log.reason = Some(format!("{} is empty", red.problem.name(*c)));
                    return (Verdict::Unsat, log);
                }
                if sat.holds(Atom::new(one, *c)) {
                    log.reason = Some(format!("{} covers every number", red.problem.name(*c)));
                    return (Verdict::Unsat, log);
                }
                let _ = iv;
            }
            for (ci, i) in &intervals {
                for (cj, j) in &intervals {
                    if ci == cj {
                        continue;
                    }
                    let cond = inclusion_condition(i, j);
                    let a = Atom::new(*ci, *cj);
                    if sat.holds(a) {
                        match &cond {
                            None => {
                                log.reason = Some(format!("{} cannot be included in {}", red.problem.name(*ci), red.problem.name(*cj)));
                                return (Verdict::Unsat, log);
                            }
                            Some(atoms) => {
                                for na in atoms {
                                    if endpoint_seen.insert(na.to_string()) {
                                        log.endpoint_facts.push(na.to_string());
                                        order.add(na).unwrap();
                                    }
                                }
                            }
                        }
                    } else if let Some(atoms) = &cond {
                        if atoms.iter().all(|na| order.entails_le(&na.lhs, &na.rhs)) {
                            num.facts.push((a, Origin::Input));
                            added = true;
                        }
                    }
                }
            }
            if !order.consistent() {
                log.reason = Some("endpoint constraints are inconsistent".into());
                return (Verdict::Unsat, log);
            }
            if !added {
                break sat;
            }
        };
        if goal_sort == Some(Sort::Num) && num_sat.holds(goal.unwrap()) {
            return (Verdict::Unsat, log);
        }
        let concept_sat = saturate(&concept);
        if concept_sat.bottom.is_some() {
            log.reason = Some("empty clause on the concept side".into());
            return (Verdict::Unsat, log);
        }
        if goal_sort == Some(Sort::Concept) && concept_sat.holds(goal.unwrap()) {
            return (Verdict::Unsat, log);
        }
        let mut moved = false;
        for (k, c) in mixed.iter().enumerate() {
            if !pending[k] {
                continue;
            }
            let entailed = c.premises.iter().all(|p| match atom_sort(p) {
                Sort::Concept => concept_sat.holds(*p),
                Sort::Num => num_sat.holds(*p),
            });
            if !entailed {
                continue;
            }
            pending[k] = false;
            moved = true;
            match c.conclusion {
                None => {
                    log.reason = Some("mixed clause with empty conclusion fired".into());
                    return (Verdict::Unsat, log);
                }
                Some(a) => {
                    log.moved.push(red.problem.render_atom(a));
                    match atom_sort(&a) {
                        Sort::Concept => concept.facts.push((a, c.origin)),
                        Sort::Num => num.facts.push((a, c.origin)),
                    }
                }
            }
        }
        if !moved {
            return (Verdict::Sat, log);
        }
    }
}
