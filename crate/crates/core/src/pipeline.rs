//! End-to-end subsumption checking: translate, reduce, solve.

use std::fmt;
use std::time::Instant;

use crate::algebra::{Goal, TermId, Translation};
use crate::concdom::{combine_solve, CombineLog};
use crate::hornsat::{saturate, Atom, Mode, ProofTrace, Refutation, Stats, Step};
use crate::reduce::{reduce, Reduction};
use crate::syntax::{render_concept, CBox, ConceptExpr, Query, Sort};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Subsumed,
    NotSubsumed,
}

impl Verdict {
    pub fn holds(self) -> bool {
        self == Verdict::Subsumed
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Subsumed => "SUBSUMED",
            Verdict::NotSubsumed => "NOT SUBSUMED",
        })
    }
}

/// Wall-clock time per stage, in microseconds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Timings {
    pub translate: u64,
    pub reduce: u64,
    pub solve: u64,
}

impl Timings {
    pub fn total(&self) -> u64 {
        self.translate + self.reduce + self.solve
    }
}

#[derive(Clone, Debug)]
pub struct QueryResult {
    pub query: String,
    pub verdict: Verdict,
    pub translation: Translation,
    pub goal: Goal,
    pub reduction: Reduction,
    /// Derivation of the goal, when decided by the Horn solver.
    pub proof: Option<(ProofTrace, Refutation)>,
    /// Least model, when the Horn solver found none.
    pub model: Option<Vec<Atom>>,
    pub stats: Option<Stats>,
    /// Present when the problem has numeric constants.
    pub combine: Option<CombineLog>,
    pub timings: Timings,
}

pub fn render_query(q: &Query) -> String {
    format!("{} sub {}", render_concept(&q.sub), render_concept(&q.sup))
}

fn has_num(red: &Reduction, t: &Translation) -> bool {
    red.const_terms.iter().any(|c| t.store.sort(*c) == Some(Sort::Num))
}

fn micros(start: Instant) -> u64 {
    start.elapsed().as_micros() as u64
}

/// Decides `query` with respect to `cbox`.
pub fn check_query(cbox: &CBox, query: &Query, mode: Mode) -> QueryResult {
    let t0 = Instant::now();
    let mut translation = Translation::new(cbox);
    let goal = translation.goal(query);
    let mut timings = Timings { translate: micros(t0), ..Default::default() };

    let t1 = Instant::now();
    let axioms = translation.axioms.clone();
    let reduction = reduce(&mut translation.store, &axioms, &goal.positives, Some(goal.negative), &[], mode);
    timings.reduce = micros(t1);

    let t2 = Instant::now();
    let mut result = QueryResult {
        query: render_query(query),
        verdict: Verdict::NotSubsumed,
        translation,
        goal,
        reduction,
        proof: None,
        model: None,
        stats: None,
        combine: None,
        timings,
    };
    if has_num(&result.reduction, &result.translation) {
        let (v, log) = combine_solve(&result.reduction, &result.translation.store);
        if v == crate::concdom::Verdict::Unsat {
            result.verdict = Verdict::Subsumed;
        }
        result.combine = Some(log);
    } else {
        let sat = saturate(&result.reduction.problem);
        result.stats = Some(sat.stats);
        match sat.refutation(result.reduction.problem.goal) {
            Some(r) => {
                result.verdict = Verdict::Subsumed;
                result.proof = Some((sat.trace, r));
            }
            None => result.model = Some(sat.trace.atoms),
        }
    }
    result.timings.solve = micros(t2);
    result
}

/// Shorthand for the verdict alone.
pub fn subsumes(cbox: &CBox, sub: &ConceptExpr, sup: &ConceptExpr, mode: Mode) -> bool {
    let q = Query { sub: sub.clone(), sup: sup.clone() };
    check_query(cbox, &q, mode).verdict.holds()
}

/// Subsumption between every ordered pair of concept names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub names: Vec<String>,
    /// `matrix[i][j]` iff `names[i]` is subsumed by `names[j]`.
    pub matrix: Vec<Vec<bool>>,
}

impl Classification {
    pub fn subsumes(&self, sub: &str, sup: &str) -> Option<bool> {
        let i = self.names.iter().position(|n| n == sub)?;
        let j = self.names.iter().position(|n| n == sup)?;
        Some(self.matrix[i][j])
    }

    /// Strict subsumers of each name, by name.
    pub fn subsumers(&self, name: &str) -> Vec<&str> {
        let Some(i) = self.names.iter().position(|n| n == name) else { return Vec::new() };
        self.names.iter().enumerate().filter(|(j, _)| *j != i && self.matrix[i][*j]).map(|(_, n)| n.as_str()).collect()
    }
}

/// Classifies the concept names of `cbox`, or `names` when given. Without
/// numeric sorts one saturation of the goal-free problem answers every pair.
pub fn classify(cbox: &CBox, names: Option<&[String]>, mode: Mode) -> Classification {
    let names: Vec<String> = names.map(<[String]>::to_vec).unwrap_or_else(|| cbox.concept_names());
    let mut t = Translation::new(cbox);
    let ids: Vec<TermId> = names.iter().map(|n| t.store.constant(n, Sort::Concept)).collect();
    let axioms = t.axioms.clone();
    let positives = t.positives.clone();
    let red = reduce(&mut t.store, &axioms, &positives, None, &ids, mode);
    let n = names.len();
    let mut matrix = vec![vec![false; n]; n];
    if has_num(&red, &t) {
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] = i == j
                    || subsumes(cbox, &ConceptExpr::name(&names[i]), &ConceptExpr::name(&names[j]), mode);
            }
        }
    } else {
        let sat = saturate(&red.problem);
        let all = sat.bottom.is_some();
        for i in 0..n {
            for j in 0..n {
                matrix[i][j] = all || sat.holds(red.atom(ids[i], ids[j]).expect("named constant"));
            }
        }
    }
    Classification { names, matrix }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("`{0}` does not follow from the CBox")]
pub struct NotATheorem(pub String);

/// One line per derivation step leading to the goal, premises first.
pub fn explain(result: &QueryResult) -> Result<Vec<String>, NotATheorem> {
    if let Some(log) = &result.combine {
        if result.verdict.holds() {
            let mut out: Vec<String> = log.endpoint_facts.iter().map(|e| format!("num: {e}")).collect();
            out.extend(log.moved.iter().map(|m| format!("moved: {m}")));
            if let Some(r) = &log.reason {
                out.push(format!("contradiction: {r}"));
            }
            out.push(format!("goal: {}", result.query));
            return Ok(out);
        }
        return Err(NotATheorem(result.query.clone()));
    }
    let Some((trace, refutation)) = &result.proof else {
        return Err(NotATheorem(result.query.clone()));
    };
    let p = &result.reduction.problem;
    let roots = match refutation {
        Refutation::Goal(i) => vec![*i],
        Refutation::Clause(c) => p.clauses[*c].premises.iter().map(|a| trace.get(*a).unwrap()).collect(),
    };
    let support = trace.support(p, &roots);
    let mut label = vec![0usize; trace.len()];
    let mut out = Vec::with_capacity(support.len() + 1);
    for (k, &i) in support.iter().enumerate() {
        label[i] = k + 1;
        let why = match trace.steps[i] {
            Step::Fact(f) => format!("{}", p.facts[f].1),
            Step::Clause(c) => {
                let cl = &p.clauses[c];
                let prem: Vec<String> = trace.premises(p, i).iter().map(|j| format!("({})", label[*j])).collect();
                let inst: Vec<String> = cl.premises.iter().map(|a| p.render_atom(*a)).collect();
                let head = format!("{} [{} -> {}]", cl.origin, inst.join(", "), p.render_atom(trace.atoms[i]));
                if prem.is_empty() {
                    head
                } else {
                    format!("{head} from {}", prem.join(" "))
                }
            }
            Step::Transitivity(a, b) => format!("transitivity from ({}) ({})", label[a], label[b]),
        };
        out.push(format!("({}) {}    {}", k + 1, p.render_atom(trace.atoms[i]), why));
    }
    if let Refutation::Clause(c) = refutation {
        out.push(format!("{} clause #{c} has an empty conclusion", p.clauses[*c].origin));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_cbox;

    fn check(text: &str) -> QueryResult {
        let cb = parse_cbox(text).unwrap();
        check_query(&cb, &cb.queries[0], Mode::Chase)
    }

    #[test]
    fn bottom_is_below_everything() {
        assert!(check("? bot sub X").verdict.holds());
        assert!(!check("? X sub bot").verdict.holds());
    }

    #[test]
    fn reflexive_explanation_is_one_step() {
        let r = check("? A sub A");
        let lines = explain(&r).unwrap();
        assert_eq!(lines.len(), 1, "{lines:?}");
    }

    #[test]
    fn not_a_theorem() {
        let r = check("A sub B\n? B sub A");
        assert!(!r.verdict.holds());
        assert!(explain(&r).is_err());
    }

    #[test]
    fn classify_matches_per_query() {
        let text = "A sub B and exists r . C\nexists r . C sub D\nD sub E\nrole r o r sub r\nE sub exists r . A";
        let cb = parse_cbox(text).unwrap();
        let c = classify(&cb, None, Mode::Chase);
        for (i, a) in c.names.iter().enumerate() {
            for (j, b) in c.names.iter().enumerate() {
                let q = subsumes(&cb, &ConceptExpr::name(a), &ConceptExpr::name(b), Mode::Chase);
                assert_eq!(c.matrix[i][j], q, "{a} {b}");
            }
        }
        assert_eq!(c.subsumes("A", "E"), Some(true));
        assert_eq!(c.subsumes("E", "A"), Some(false));
    }
}
