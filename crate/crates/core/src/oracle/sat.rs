//! CNF construction for bounded model search, solved with varisat.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn pos(v: u32) -> Lit {
        Lit(v << 1)
    }

    pub fn neg(v: u32) -> Lit {
        Lit((v << 1) | 1)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn negated(self) -> bool {
        self.0 & 1 == 1
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Cnf {
    vars: u32,
    clauses: Vec<Vec<Lit>>,
    /// Set when an empty clause was added.
    trivially_unsat: bool,
}

impl Cnf {
    pub fn new_var(&mut self) -> u32 {
        self.vars += 1;
        self.vars - 1
    }

    pub fn vars(&self) -> u32 {
        self.vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn add(&mut self, mut clause: Vec<Lit>) {
        clause.sort_by_key(|l| l.0);
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if clause.is_empty() {
            self.trivially_unsat = true;
        }
        self.clauses.push(clause);
    }
}

/// A satisfying assignment, or `None`.
pub fn solve(cnf: &Cnf) -> Option<Vec<bool>> {
    use varisat::{ExtendFormula, Solver};
    if cnf.trivially_unsat {
        return None;
    }
    let mut solver = Solver::new();
    let vars: Vec<varisat::Var> = (0..cnf.vars).map(|_| solver.new_var()).collect();
    for c in &cnf.clauses {
        let lits: Vec<varisat::Lit> = c.iter().map(|l| vars[l.var() as usize].lit(!l.negated())).collect();
        solver.add_clause(&lits);
    }
    if !solver.solve().expect("no proof output configured") {
        return None;
    }
    let mut out = vec![false; cnf.vars as usize];
    for l in solver.model().expect("model after sat") {
        out[l.index()] = l.is_positive();
    }
    Some(out)
}
