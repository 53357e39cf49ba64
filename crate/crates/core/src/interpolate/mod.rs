//! Ground interpolation for semilattices with monotone operators under
//! role-inclusion axioms.
//!
//! Instances of the axioms that would mix A-local and B-local symbols are
//! avoided by introducing terms over a shared separating term. The sides
//! then trade shared atoms until B refutes; the interpolant holds the atoms A
//! contributed to that refutation, each conditional on the atoms from B its
//! derivation used (usually none).

mod parse;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::algebra::{AlgAxiom, OpId, Term, TermId, TermStore, Translation};
use crate::hornsat::{saturate, solve, Atom, Mode, Origin, ProofTrace, Refutation, Saturation, Step};
use crate::reduce::{instantiate, reduce, Reduction};
use crate::syntax::{parse_cbox, Axiom, Sort};

pub use parse::{parse_problem, RawLiteral, RawProblem, RawTerm, Rel, Side};

const MAX_ROUNDS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpolationError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("A and B are jointly satisfiable")]
    NotUnsat,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no shared term separates {0}")]
    NoSeparatingTerm(String),
    #[error("interpolant check failed: {0}")]
    VerificationFailed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Color {
    Shared,
    A,
    B,
    Mixed,
}

impl Color {
    fn join(self, other: Color) -> Color {
        match (self, other) {
            (Color::Shared, c) | (c, Color::Shared) => c,
            (a, b) if a == b => a,
            _ => Color::Mixed,
        }
    }
}

/// A ground interpolation problem over a translated role-axiom set.
#[derive(Clone, Debug)]
pub struct InterpolationProblem {
    pub translation: Translation,
    pub a: Vec<(TermId, TermId)>,
    pub b: Vec<(TermId, TermId)>,
    /// The negated atom `s !<= t`, on the B side.
    pub negative: (TermId, TermId),
    const_color: HashMap<TermId, Color>,
    op_color: HashMap<OpId, Color>,
}

/// `premises -> conclusion`, each an atom `s <= t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Implication {
    pub premises: Vec<(TermId, TermId)>,
    pub conclusion: (TermId, TermId),
}

/// A conjunction of implications over shared symbols; mostly plain atoms.
#[derive(Clone, Debug)]
pub struct InterpolationResult {
    pub clauses: Vec<Implication>,
    pub rendered: Vec<String>,
    /// `(x, t, y)` for each separating term `t` with `x <= t <= y`.
    pub separations: Vec<(String, String, String)>,
    pub rounds: usize,
}

impl fmt::Display for InterpolationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rendered.is_empty() {
            f.write_str("top")
        } else {
            f.write_str(&self.rendered.join(" and "))
        }
    }
}

/// Renders a term with operators named after their roles.
pub fn show(store: &TermStore, t: TermId) -> String {
    match store.term(t) {
        Term::Zero => "0".into(),
        Term::One => "1".into(),
        Term::Const(n, _) => n.clone(),
        Term::Interval(_) => store.render(t),
        Term::Meet(args) => args.iter().map(|a| show(store, *a)).collect::<Vec<_>>().join(" & "),
        Term::Apply(op, args) => {
            let args: Vec<String> = args
                .iter()
                .map(|a| if matches!(store.term(*a), Term::Meet(_)) { format!("({})", show(store, *a)) } else { show(store, *a) })
                .collect();
            format!("{}({})", store.op(*op).role, args.join(", "))
        }
    }
}

fn axiom_ops(ax: &AlgAxiom) -> Vec<OpId> {
    match ax {
        AlgAxiom::Mon(f) | AlgAxiom::Strict(f) => vec![*f],
        AlgAxiom::K1 { g, h, .. } => vec![g.op, h.op],
        AlgAxiom::K2 { f, inner, h, .. } => [f.op, h.op].into_iter().chain(inner.iter().map(|g| g.op)).collect(),
        AlgAxiom::K3 { f, inner, .. } => std::iter::once(f.op).chain(inner.iter().map(|g| g.op)).collect(),
    }
}

impl InterpolationProblem {
    pub fn parse(text: &str) -> Result<Self, InterpolationError> {
        let raw = parse_problem(text)?;
        let mut ops = BTreeSet::new();
        for l in &raw.literals {
            l.lhs.ops(&mut ops);
            l.rhs.ops(&mut ops);
        }
        let mut cbox_text = raw.cbox_text.clone();
        for (f, arity) in &ops {
            cbox_text.push_str(&format!("\ndecl role {f} : {}", arity + 1));
        }
        let cbox = parse_cbox(&cbox_text).map_err(|e| InterpolationError::Parse { line: e.span.line, msg: e.to_string() })?;
        if cbox.axioms.iter().any(|a| matches!(a, Axiom::Restriction { .. })) {
            return Err(InterpolationError::Unsupported("role restrictions".into()));
        }
        if cbox.roles.values().any(|s| s.arity() != 2 || !s.is_binary_concept()) {
            return Err(InterpolationError::Unsupported("operators of arity other than one".into()));
        }
        let mut translation = Translation::new(&cbox);
        for ax in &translation.axioms {
            match ax {
                AlgAxiom::K1 { guards, .. } | AlgAxiom::K2 { guards, .. } | AlgAxiom::K3 { guards, .. }
                    if !guards.is_empty() =>
                {
                    return Err(InterpolationError::Unsupported("guarded role inclusions".into()))
                }
                AlgAxiom::K2 { inner, .. } | AlgAxiom::K3 { inner, .. } if inner.len() > 1 => {
                    return Err(InterpolationError::Unsupported("tuple compositions".into()))
                }
                _ => {}
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut negative = None;
        let mut consts: HashMap<String, (bool, bool)> = HashMap::new();
        let mut op_sides: HashMap<OpId, (bool, bool)> = HashMap::new();
        for l in &raw.literals {
            let x = build(&mut translation.store, &l.lhs);
            let y = build(&mut translation.store, &l.rhs);
            let mark = |e: &mut (bool, bool)| match l.side {
                Side::A => e.0 = true,
                Side::B => e.1 = true,
            };
            let mut sub = Vec::new();
            translation.store.subterms(x, &mut sub);
            translation.store.subterms(y, &mut sub);
            for t in sub {
                match translation.store.term(t) {
                    Term::Const(n, _) => mark(consts.entry(n.clone()).or_default()),
                    Term::Apply(op, _) => mark(op_sides.entry(*op).or_default()),
                    _ => {}
                }
            }
            let side = if l.side == Side::A { &mut a } else { &mut b };
            match l.rel {
                Rel::Le => side.push((x, y)),
                Rel::Eq => side.extend([(x, y), (y, x)]),
                Rel::NotLe => {
                    if l.side == Side::A {
                        return Err(InterpolationError::Unsupported(format!(
                            "line {}: the negated literal must be on the B side",
                            l.line
                        )));
                    }
                    if negative.replace((x, y)).is_some() {
                        return Err(InterpolationError::Unsupported(format!(
                            "line {}: more than one negated literal",
                            l.line
                        )));
                    }
                }
            }
        }
        let negative = negative.ok_or(InterpolationError::Unsupported("no negated literal on the B side".into()))?;
        let color = |(in_a, in_b): (bool, bool)| match (in_a, in_b) {
            (true, false) => Color::A,
            (false, true) => Color::B,
            _ => Color::Shared,
        };
        let const_color = consts
            .into_iter()
            .map(|(n, s)| (translation.store.constant(&n, Sort::Concept), color(s)))
            .collect();
        // operators related by some axiom share a class
        let n = translation.store.ops().len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for ax in &translation.axioms {
            let ops = axiom_ops(ax);
            for w in ops.windows(2) {
                let (x, y) = (find(&mut parent, w[0].index()), find(&mut parent, w[1].index()));
                parent[x] = y;
            }
        }
        let mut class_sides: HashMap<usize, (bool, bool)> = HashMap::new();
        for (op, s) in &op_sides {
            let e = class_sides.entry(find(&mut parent, op.index())).or_default();
            e.0 |= s.0;
            e.1 |= s.1;
        }
        let op_color = (0..n)
            .map(|i| {
                let c = class_sides.get(&find(&mut parent, i)).copied().unwrap_or_default();
                (OpId(i as u32), color(c))
            })
            .collect();
        Ok(InterpolationProblem { translation, a, b, negative, const_color, op_color })
    }

    pub fn color(&self, t: TermId) -> Color {
        let store = &self.translation.store;
        match store.term(t) {
            Term::Zero | Term::One | Term::Interval(_) => Color::Shared,
            Term::Const(..) => self.const_color.get(&t).copied().unwrap_or(Color::Shared),
            Term::Meet(args) => args.iter().fold(Color::Shared, |c, a| c.join(self.color(*a))),
            Term::Apply(op, args) => {
                args.iter().fold(self.op_color[op], |c, a| c.join(self.color(*a)))
            }
        }
    }

    fn store(&mut self) -> &mut TermStore {
        &mut self.translation.store
    }

    fn reduce(&mut self, positives: &[(TermId, TermId)], goal: Option<(TermId, TermId)>, extra: &[TermId]) -> Reduction {
        let axioms = self.translation.axioms.clone();
        reduce(self.store(), &axioms, positives, goal, extra, Mode::Chase)
    }

    /// `positives ⊨ goal` modulo the axioms.
    pub fn entails(&mut self, positives: &[(TermId, TermId)], goal: (TermId, TermId)) -> bool {
        solve(&self.reduce(positives, Some(goal), &[]).problem).is_unsat()
    }

    fn render_atom(&self, (x, y): (TermId, TermId)) -> String {
        format!("{} <= {}", show(&self.translation.store, x), show(&self.translation.store, y))
    }

    fn render_implication(&self, c: &Implication) -> String {
        if c.premises.is_empty() {
            return self.render_atom(c.conclusion);
        }
        let prem: Vec<String> = c.premises.iter().map(|p| self.render_atom(*p)).collect();
        format!("({} -> {})", prem.join(" and "), self.render_atom(c.conclusion))
    }
}

fn build(store: &mut TermStore, t: &RawTerm) -> TermId {
    match t {
        RawTerm::Zero => store.zero(),
        RawTerm::One => store.one(),
        RawTerm::Const(n) => store.constant(n, Sort::Concept),
        RawTerm::Apply(f, args) => {
            let op = store.op_by_role(f).expect("operators are declared before building");
            let args = args.iter().map(|a| build(store, a)).collect();
            store.apply(op, args)
        }
        RawTerm::Meet(args) => {
            let args = args.iter().map(|a| build(store, a)).collect();
            store.meet(args)
        }
    }
}

fn term_pair(red: &Reduction, a: Atom) -> (TermId, TermId) {
    (red.const_terms[a.lhs as usize], red.const_terms[a.rhs as usize])
}

/// Atoms that hold without any input fact.
fn baseline(red: &Reduction) -> Saturation {
    let mut p = red.problem.clone();
    p.facts.retain(|(_, o)| *o != Origin::Input);
    p.goal = None;
    saturate(&p)
}

type Pair = (TermId, TermId);

/// Input facts, as term pairs, in the derivation of `roots`.
fn used_inputs(red: &Reduction, trace: &ProofTrace, roots: &[usize]) -> BTreeSet<Pair> {
    trace
        .support(&red.problem, roots)
        .into_iter()
        .filter_map(|i| match trace.steps[i] {
            Step::Fact(f) => Some(term_pair(red, red.problem.facts[f].0)),
            _ => None,
        })
        .collect()
}

/// Shared atoms of a saturation that the axioms alone do not give.
fn shared_model(problem: &InterpolationProblem, red: &Reduction, sat: &Saturation) -> Vec<(Atom, Pair)> {
    let free = baseline(red);
    sat.model()
        .iter()
        .filter(|a| a.lhs != a.rhs && !free.holds(**a))
        .map(|a| (*a, term_pair(red, *a)))
        .filter(|(_, (x, y))| problem.color(*x) == Color::Shared && problem.color(*y) == Color::Shared)
        .collect()
}

enum Exchange {
    Done(Vec<Implication>),
    Stuck,
}

/// Alternates between the sides: A derives shared atoms from its literals
/// and the shared atoms B has passed over, B does the same in return, until
/// B refutes or neither side learns anything new.
fn exchange(problem: &mut InterpolationProblem, extra: &[TermId]) -> Exchange {
    let mut from_b: Vec<Pair> = Vec::new();
    let mut from_a: Vec<Implication> = Vec::new();
    for _ in 0..MAX_ROUNDS {
        let mut a_pos = problem.a.clone();
        a_pos.extend(from_b.iter().copied());
        let a_red = problem.reduce(&a_pos, None, extra);
        let a_sat = saturate(&a_red.problem);
        let hyps: BTreeSet<Pair> = from_b.iter().copied().collect();
        let mut learned = false;
        for (atom, pair) in shared_model(problem, &a_red, &a_sat) {
            if hyps.contains(&pair) || from_a.iter().any(|c| c.conclusion == pair) {
                continue;
            }
            let i = a_sat.trace.get(atom).expect("model atom is in the trace");
            let premises = used_inputs(&a_red, &a_sat.trace, &[i]).intersection(&hyps).copied().collect();
            from_a.push(Implication { premises, conclusion: pair });
            learned = true;
        }
        let mut b_pos = problem.b.clone();
        b_pos.extend(from_a.iter().map(|c| c.conclusion));
        let b_red = problem.reduce(&b_pos, Some(problem.negative), extra);
        let b_sat = saturate(&b_red.problem);
        if let Some(refutation) = b_sat.refutation(b_red.problem.goal) {
            let roots = match refutation {
                Refutation::Goal(i) => vec![i],
                Refutation::Clause(c) => {
                    b_red.problem.clauses[c].premises.iter().map(|a| b_sat.trace.get(*a).unwrap()).collect()
                }
            };
            return Exchange::Done(needed(&from_a, &b_red, &b_sat.trace, roots));
        }
        let known: BTreeSet<Pair> = from_a.iter().map(|c| c.conclusion).chain(from_b.iter().copied()).collect();
        for (_, pair) in shared_model(problem, &b_red, &b_sat) {
            if !known.contains(&pair) {
                from_b.push(pair);
                learned = true;
            }
        }
        if !learned {
            break;
        }
    }
    Exchange::Stuck
}

/// The A-side implications a B refutation depends on, following premises
/// that B derived back through the B trace.
fn needed(from_a: &[Implication], red: &Reduction, trace: &ProofTrace, roots: Vec<usize>) -> Vec<Implication> {
    let mut out: Vec<Implication> = Vec::new();
    let mut queue: Vec<Pair> = used_inputs(red, trace, &roots).into_iter().collect();
    while let Some(pair) = queue.pop() {
        let Some(c) = from_a.iter().find(|c| c.conclusion == pair) else { continue };
        if out.iter().any(|o| o.conclusion == pair) {
            continue;
        }
        for p in &c.premises {
            let atom = red.atom(p.0, p.1).expect("exchanged terms are constants");
            let i = trace.get(atom).expect("B derives every premise it passed on");
            queue.extend(used_inputs(red, trace, &[i]));
        }
        out.push(c.clone());
    }
    out.sort();
    out
}

pub fn interpolate(problem: &mut InterpolationProblem) -> Result<InterpolationResult, InterpolationError> {
    // shared terms of either side are visible to both
    let mut extra: Vec<TermId> = Vec::new();
    let mut sub = Vec::new();
    for &(x, y) in problem.a.iter().chain(&problem.b).chain([&problem.negative]) {
        problem.translation.store.subterms(x, &mut sub);
        problem.translation.store.subterms(y, &mut sub);
    }
    for t in sub {
        if problem.color(t) == Color::Shared && !extra.contains(&t) {
            extra.push(t);
        }
    }
    let joint: Vec<Pair> = problem.a.iter().chain(&problem.b).copied().collect();
    let mut separations = Vec::new();
    let (b, neg) = (problem.b.clone(), problem.negative);
    if problem.entails(&b, neg) {
        return Ok(InterpolationResult { clauses: Vec::new(), rendered: Vec::new(), separations, rounds: 0 });
    }
    for round in 1..=MAX_ROUNDS {
        let joint_red = problem.reduce(&joint, Some(problem.negative), &extra);
        let joint_sat = saturate(&joint_red.problem);
        if joint_sat.refutation(joint_red.problem.goal).is_none() {
            return Err(InterpolationError::NotUnsat);
        }
        if let Exchange::Done(clauses) = exchange(problem, &extra) {
            let result = InterpolationResult {
                rendered: clauses.iter().map(|c| problem.render_implication(c)).collect(),
                clauses,
                separations,
                rounds: round,
            };
            verify(problem, &result)?;
            return Ok(result);
        }
        // instances that fire jointly but mix the two sides
        let new_terms = separate(problem, &joint_red, &joint_sat, &mut separations)?;
        let before = extra.len();
        for t in new_terms {
            if !extra.contains(&t) {
                extra.push(t);
            }
        }
        if extra.len() == before {
            return Err(InterpolationError::Unsupported("no separating terms left to add".into()));
        }
    }
    Err(InterpolationError::Unsupported(format!("no interpolant after {MAX_ROUNDS} rounds")))
}

fn separate(
    problem: &mut InterpolationProblem,
    red: &Reduction,
    sat: &Saturation,
    log: &mut Vec<(String, String, String)>,
) -> Result<Vec<TermId>, InterpolationError> {
    let axioms = problem.translation.axioms.clone();
    let psi = red.psi.clone();
    let instances = instantiate(problem.store(), &axioms, &psi);
    let holds = |x: TermId, y: TermId| red.atom(x, y).is_some_and(|a| sat.holds(a));
    let shared_terms: Vec<TermId> =
        red.const_terms.iter().copied().filter(|t| problem.color(*t) == Color::Shared).collect();
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for inst in &instances {
        let Some((l, r)) = inst.conclusion else { continue };
        let terms = inst.premises.iter().flat_map(|(x, y)| [*x, *y]).chain([l, r]);
        if terms.fold(Color::Shared, |c, t| c.join(problem.color(t))) != Color::Mixed {
            continue;
        }
        if !inst.premises.iter().all(|(x, y)| holds(*x, *y)) {
            continue;
        }
        for &(x, y) in &inst.premises {
            let (cx, cy) = (problem.color(x), problem.color(y));
            if cx.join(cy) != Color::Mixed || !seen.insert((x, y)) {
                continue;
            }
            let t = match shared_terms.iter().copied().find(|t| holds(x, *t) && holds(*t, y)) {
                Some(t) => t,
                None => {
                    let above: Vec<TermId> = shared_terms.iter().copied().filter(|t| holds(x, *t)).collect();
                    if above.is_empty() {
                        return Err(InterpolationError::NoSeparatingTerm(problem.render_atom((x, y))));
                    }
                    problem.store().meet(above)
                }
            };
            log.push((show(&problem.translation.store, x), show(&problem.translation.store, t), show(&problem.translation.store, y)));
            out.push(t);
            for side in [l, r] {
                if let Term::Apply(op, args) = problem.translation.store.term(side).clone() {
                    if args.contains(&x) {
                        let args = args.iter().map(|a| if *a == x { t } else { *a }).collect();
                        out.push(problem.store().apply(op, args));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn verify(problem: &mut InterpolationProblem, result: &InterpolationResult) -> Result<(), InterpolationError> {
    for c in &result.clauses {
        for &(x, y) in c.premises.iter().chain([&c.conclusion]) {
            if problem.color(x) != Color::Shared || problem.color(y) != Color::Shared {
                return Err(InterpolationError::VerificationFailed(format!(
                    "{} is not over shared symbols",
                    problem.render_atom((x, y))
                )));
            }
        }
        let mut a = problem.a.clone();
        a.extend(c.premises.iter().copied());
        if !problem.entails(&a, c.conclusion) {
            return Err(InterpolationError::VerificationFailed(format!(
                "A does not entail {}",
                problem.render_implication(c)
            )));
        }
    }
    // fire the implications forward from B
    let mut known = problem.b.clone();
    let mut pending: Vec<&Implication> = result.clauses.iter().collect();
    loop {
        let before = pending.len();
        let mut i = 0;
        while i < pending.len() {
            let c = pending[i];
            if c.premises.iter().all(|p| problem.entails(&known, *p)) {
                known.push(c.conclusion);
                pending.swap_remove(i);
            } else {
                i += 1;
            }
        }
        if pending.len() == before {
            break;
        }
    }
    let neg = problem.negative;
    if !problem.entails(&known, neg) {
        return Err(InterpolationError::VerificationFailed("the interpolant and B are consistent".into()));
    }
    Ok(())
}
