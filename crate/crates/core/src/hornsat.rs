//! Ground Horn satisfiability over `<=` atoms by forward chaining.
//!
//! Clauses are watched from their premises and fire when their premise
//! counter reaches zero. In chase mode transitivity of `<=` is a built-in
//! rule instead of instantiated clauses.

use std::collections::{HashMap, VecDeque};
use std::fmt;

pub type ConstId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub lhs: ConstId,
    pub rhs: ConstId,
}

impl Atom {
    pub fn new(lhs: ConstId, rhs: ConstId) -> Self {
        Atom { lhs, rhs }
    }
}

/// Where a clause or fact came from; used when explaining derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Input,
    Mon,
    Role,
    Strict,
    Reflexive,
    Bounds,
    MeetLower,
    MeetUpper,
    Transitivity,
    MeetCongruence,
    Separation,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Origin::Input => "input",
            Origin::Mon => "monotonicity",
            Origin::Role => "role axiom",
            Origin::Strict => "strictness",
            Origin::Reflexive => "reflexivity",
            Origin::Bounds => "bounds",
            Origin::MeetLower => "meet lower bound",
            Origin::MeetUpper => "meet greatest lower bound",
            Origin::Transitivity => "transitivity",
            Origin::MeetCongruence => "meet congruence",
            Origin::Separation => "separation",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub premises: Vec<Atom>,
    /// `None` is the empty conclusion (false).
    pub conclusion: Option<Atom>,
    pub origin: Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    Instantiate,
    #[default]
    Chase,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Instantiate => "instantiate",
            Mode::Chase => "chase",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "instantiate" => Ok(Mode::Instantiate),
            "chase" => Ok(Mode::Chase),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HornProblem {
    pub names: Vec<String>,
    pub facts: Vec<(Atom, Origin)>,
    pub clauses: Vec<HornClause>,
    /// Positive form of the negated query atom.
    pub goal: Option<Atom>,
    pub mode: Mode,
}

impl HornProblem {
    pub fn name(&self, c: ConstId) -> &str {
        &self.names[c as usize]
    }

    pub fn render_atom(&self, a: Atom) -> String {
        format!("{} <= {}", self.name(a.lhs), self.name(a.rhs))
    }

    pub fn literal_occurrences(&self) -> u64 {
        self.facts.len() as u64
            + self.clauses.iter().map(|c| c.premises.len() as u64 + 1).sum::<u64>()
            + u64::from(self.goal.is_some())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Fact(usize),
    Clause(usize),
    /// From the two atoms (by index) `x <= y` and `y <= z`.
    Transitivity(usize, usize),
}

/// Every derived atom with the step that produced it, in derivation order.
#[derive(Clone, Debug, Default)]
pub struct ProofTrace {
    pub atoms: Vec<Atom>,
    pub steps: Vec<Step>,
    index: HashMap<Atom, usize>,
}

impl ProofTrace {
    pub fn get(&self, a: Atom) -> Option<usize> {
        self.index.get(&a).copied()
    }

    pub fn contains(&self, a: Atom) -> bool {
        self.index.contains_key(&a)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Premises (as atom indices) of the step deriving atom `i`.
    pub fn premises(&self, problem: &HornProblem, i: usize) -> Vec<usize> {
        match self.steps[i] {
            Step::Fact(_) => Vec::new(),
            Step::Clause(c) => problem.clauses[c].premises.iter().map(|p| self.index[p]).collect(),
            Step::Transitivity(a, b) => vec![a, b],
        }
    }

    /// Atoms needed to derive `roots`, premises before conclusions.
    pub fn support(&self, problem: &HornProblem, roots: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        let mut stack: Vec<(usize, bool)> = roots.iter().rev().map(|r| (*r, false)).collect();
        while let Some((i, done)) = stack.pop() {
            if done {
                out.push(i);
                continue;
            }
            if seen[i] {
                continue;
            }
            seen[i] = true;
            stack.push((i, true));
            for p in self.premises(problem, i).into_iter().rev() {
                if !seen[p] {
                    stack.push((p, false));
                }
            }
        }
        out
    }

    /// Re-checks every step against the problem.
    pub fn replay(&self, problem: &HornProblem) -> bool {
        for (i, step) in self.steps.iter().enumerate() {
            let a = self.atoms[i];
            let ok = match *step {
                Step::Fact(f) => problem.facts.get(f).is_some_and(|x| x.0 == a),
                Step::Clause(c) => problem.clauses.get(c).is_some_and(|cl| {
                    cl.conclusion == Some(a) && cl.premises.iter().all(|p| self.get(*p).is_some_and(|j| j < i))
                }),
                Step::Transitivity(x, y) => {
                    problem.mode == Mode::Chase
                        && x < i
                        && y < i
                        && self.atoms[x].lhs == a.lhs
                        && self.atoms[x].rhs == self.atoms[y].lhs
                        && self.atoms[y].rhs == a.rhs
                }
            };
            if !ok {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub decrements: u64,
    pub literal_occurrences: u64,
    pub derived: usize,
    pub transitivity_steps: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutation {
    Goal(usize),
    /// A clause with empty conclusion fired.
    Clause(usize),
}

/// Least model of the facts and clauses, with its trace.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub trace: ProofTrace,
    /// First clause with empty conclusion that fired.
    pub bottom: Option<usize>,
    pub stats: Stats,
}

impl Saturation {
    pub fn holds(&self, a: Atom) -> bool {
        self.trace.contains(a)
    }

    pub fn model(&self) -> &[Atom] {
        &self.trace.atoms
    }

    pub fn refutation(&self, goal: Option<Atom>) -> Option<Refutation> {
        if let Some(c) = self.bottom {
            return Some(Refutation::Clause(c));
        }
        goal.and_then(|g| self.trace.get(g)).map(Refutation::Goal)
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Unsat(ProofTrace, Refutation),
    Sat(Vec<Atom>),
}

impl Outcome {
    pub fn is_unsat(&self) -> bool {
        matches!(self, Outcome::Unsat(..))
    }
}

pub fn solve(problem: &HornProblem) -> Outcome {
    let sat = saturate(problem);
    match sat.refutation(problem.goal) {
        Some(r) => Outcome::Unsat(sat.trace, r),
        None => Outcome::Sat(sat.trace.atoms),
    }
}

pub fn saturate(problem: &HornProblem) -> Saturation {
    let n = problem.names.len();
    let mut watches: HashMap<Atom, Vec<u32>> = HashMap::new();
    let mut counters: Vec<u32> = Vec::with_capacity(problem.clauses.len());
    let mut trace = ProofTrace::default();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut stats = Stats { literal_occurrences: problem.literal_occurrences(), ..Stats::default() };
    let mut bottom = None;
    let mut pending_empty = Vec::new();

    for (ci, c) in problem.clauses.iter().enumerate() {
        counters.push(c.premises.len() as u32);
        for p in &c.premises {
            watches.entry(*p).or_default().push(ci as u32);
        }
        if c.premises.is_empty() {
            pending_empty.push(ci);
        }
    }

    let derive = |trace: &mut ProofTrace, queue: &mut VecDeque<usize>, a: Atom, step: Step| {
        if trace.index.contains_key(&a) {
            return;
        }
        let i = trace.atoms.len();
        trace.atoms.push(a);
        trace.steps.push(step);
        trace.index.insert(a, i);
        queue.push_back(i);
    };

    for (fi, (a, _)) in problem.facts.iter().enumerate() {
        derive(&mut trace, &mut queue, *a, Step::Fact(fi));
    }
    for ci in pending_empty {
        match problem.clauses[ci].conclusion {
            Some(a) => derive(&mut trace, &mut queue, a, Step::Clause(ci)),
            None => bottom = bottom.or(Some(ci)),
        }
    }

    let chase = problem.mode == Mode::Chase;
    let mut succ: Vec<Vec<(ConstId, usize)>> = if chase { vec![Vec::new(); n] } else { Vec::new() };
    let mut pred: Vec<Vec<(ConstId, usize)>> = if chase { vec![Vec::new(); n] } else { Vec::new() };

    while let Some(i) = queue.pop_front() {
        let a = trace.atoms[i];
        if let Some(ws) = watches.get(&a) {
            for &ci in ws {
                stats.decrements += 1;
                let c = &mut counters[ci as usize];
                *c -= 1;
                if *c == 0 {
                    match problem.clauses[ci as usize].conclusion {
                        Some(b) => derive(&mut trace, &mut queue, b, Step::Clause(ci as usize)),
                        None => bottom = bottom.or(Some(ci as usize)),
                    }
                }
            }
        }
        if chase && a.lhs != a.rhs {
            let (x, y) = (a.lhs as usize, a.rhs as usize);
            succ[x].push((a.rhs, i));
            pred[y].push((a.lhs, i));
            let before: Vec<(ConstId, usize)> = pred[x].clone();
            for (p, j) in before {
                if p != a.rhs {
                    stats.transitivity_steps += 1;
                    derive(&mut trace, &mut queue, Atom::new(p, a.rhs), Step::Transitivity(j, i));
                }
            }
            let after: Vec<(ConstId, usize)> = succ[y].clone();
            for (s, j) in after {
                if s != a.lhs {
                    stats.transitivity_steps += 1;
                    derive(&mut trace, &mut queue, Atom::new(a.lhs, s), Step::Transitivity(i, j));
                }
            }
        }
    }
    stats.derived = trace.atoms.len();
    debug_assert!(stats.decrements <= stats.literal_occurrences, "{stats:?}");
    Saturation { trace, bottom, stats }
}

/// True iff `model` contains every fact, is closed under every clause (and
/// under transitivity in chase mode), fires no empty clause and misses the
/// goal.
pub fn model_check(model: &[Atom], problem: &HornProblem) -> bool {
    let set: std::collections::HashSet<Atom> = model.iter().copied().collect();
    if !problem.facts.iter().all(|(a, _)| set.contains(a)) {
        return false;
    }
    for c in &problem.clauses {
        if c.premises.iter().all(|p| set.contains(p)) {
            match c.conclusion {
                Some(b) if set.contains(&b) => {}
                _ => return false,
            }
        }
    }
    if let Some(g) = problem.goal {
        if set.contains(&g) {
            return false;
        }
    }
    if problem.mode == Mode::Chase {
        let mut succ: HashMap<ConstId, Vec<ConstId>> = HashMap::new();
        for a in model {
            succ.entry(a.lhs).or_default().push(a.rhs);
        }
        for a in model {
            if let Some(next) = succ.get(&a.rhs) {
                if next.iter().any(|z| *z != a.lhs && !set.contains(&Atom::new(a.lhs, *z))) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(n: usize, facts: &[(u32, u32)], clauses: &[(&[(u32, u32)], Option<(u32, u32)>)], goal: (u32, u32), mode: Mode) -> HornProblem {
        HornProblem {
            names: (0..n).map(|i| format!("c{i}")).collect(),
            facts: facts.iter().map(|&(a, b)| (Atom::new(a, b), Origin::Input)).collect(),
            clauses: clauses
                .iter()
                .map(|(ps, c)| HornClause {
                    premises: ps.iter().map(|&(a, b)| Atom::new(a, b)).collect(),
                    conclusion: c.map(|(a, b)| Atom::new(a, b)),
                    origin: Origin::Input,
                })
                .collect(),
            goal: Some(Atom::new(goal.0, goal.1)),
            mode,
        }
    }

    #[test]
    fn reflexive_goal() {
        let p = problem(2, &[(0, 1), (0, 0)], &[], (0, 0), Mode::Chase);
        assert!(solve(&p).is_unsat());
    }

    #[test]
    fn chase_transitivity() {
        let p = problem(4, &[(0, 1), (2, 3), (1, 2)], &[], (0, 3), Mode::Chase);
        match solve(&p) {
            Outcome::Unsat(trace, Refutation::Goal(g)) => {
                assert!(trace.replay(&p));
                let support = trace.support(&p, &[g]);
                assert_eq!(*support.last().unwrap(), g);
            }
            other => panic!("{other:?}"),
        }
        let p = problem(4, &[(0, 1), (2, 3), (1, 2)], &[], (0, 3), Mode::Instantiate);
        assert!(!solve(&p).is_unsat());
    }

    #[test]
    fn clause_chain_and_bottom() {
        let p = problem(3, &[(0, 1)], &[(&[(0, 1)], Some((1, 2))), (&[(1, 2), (0, 1)], None)], (2, 0), Mode::Chase);
        let sat = saturate(&p);
        assert_eq!(sat.bottom, Some(1));
        assert!(sat.stats.decrements <= sat.stats.literal_occurrences);
    }

    #[test]
    fn sat_model_is_a_model() {
        let p = problem(3, &[(0, 1)], &[(&[(0, 1)], Some((1, 2))), (&[(2, 1)], Some((0, 2)))], (2, 0), Mode::Chase);
        match solve(&p) {
            Outcome::Sat(m) => {
                assert!(model_check(&m, &p));
                assert!(m.contains(&Atom::new(0, 2)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_problem_has_empty_model() {
        let p = HornProblem::default();
        match solve(&p) {
            Outcome::Sat(m) => assert!(m.is_empty()),
            other => panic!("{other:?}"),
        }
    }
}
