//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any FAIL.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use loctame::algebra::{psi_closure, TermId, TermStore, Translation};
use loctame::hornsat::{model_check, saturate, Mode, Origin};
use loctame::interpolate::{interpolate, InterpolationProblem};
use loctame::oracle::gen::{extended_cbox, normalized_cbox};
use loctame::oracle::{bounded_model_search, completion_classify};
use loctame::pipeline::{check_query, classify, QueryResult};
use loctame::syntax::{parse_cbox, CBox, ConceptExpr, Query, Sort};

const NORMALIZED: u64 = 1000;
const EXTENDED: u64 = 500;

struct Outcome {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn load(name: &str) -> CBox {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cboxes").join(name);
    parse_cbox(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn timed(cb: &CBox, mode: Mode) -> (QueryResult, Duration) {
    let t = Instant::now();
    let r = check_query(cb, &cb.queries[0], mode);
    (r, t.elapsed())
}

fn golden_cyclic() -> Outcome {
    let cb = load("cyclic.cbox");
    let (r, time) = timed(&cb, Mode::Instantiate);
    let p = &r.reduction.problem;
    let mon = p.clauses.iter().any(|c| {
        c.origin == Origin::Mon
            && c.premises.len() == 1
            && p.render_atom(c.premises[0]) == "c{A1&A2} <= c{P1&P2}"
            && c.conclusion.map(|a| p.render_atom(a)).as_deref() == Some("c{f_r1(A1&A2)} <= c{f_r1(P1&P2)}")
    });
    check(
        r.verdict.holds() && mon && time < Duration::from_millis(100),
        format!("{}, Mon instance e2<=e1 -> d2<=d1 present: {mon}, {time:?}", r.verdict),
    )
}

fn golden_endocarditis() -> Outcome {
    let cb = load("endocarditis.cbox");
    let (r, time) = timed(&cb, Mode::Chase);
    let mut psi: Vec<String> = r.reduction.psi.iter().map(|t| r.translation.store.render(*t)).collect();
    psi.sort();
    let expected = [
        "f_cont-in(Heart)",
        "f_cont-in(HeartValve)",
        "f_cont-in(HeartWall)",
        "f_has-loc(Endocard)",
        "f_has-loc(Heart)",
        "f_has-loc(HeartValve)",
        "f_has-loc(HeartWall)",
        "f_part-of(Heart)",
    ];
    check(
        r.verdict.holds() && psi == expected && time < Duration::from_millis(100),
        format!("{}, psi has {} terms, {time:?}", r.verdict, psi.len()),
    )
}

fn golden_sgc() -> Outcome {
    let text = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cboxes/sgc.interp")).unwrap();
    let mut p = InterpolationProblem::parse(&text).unwrap();
    let i = match interpolate(&mut p) {
        Ok(i) => i,
        Err(e) => return check(false, e.to_string()),
    };
    // I is equivalent to f(d) <= c modulo the axioms
    let store = &mut p.translation.store;
    let (d, c) = (store.constant("d", Sort::Concept), store.constant("c", Sort::Concept));
    let f = store.op_by_role("f").unwrap();
    let fd = store.apply(f, vec![d]);
    if i.clauses.iter().any(|c| !c.premises.is_empty()) {
        return check(false, format!("I = {i} is not a conjunction of atoms"));
    }
    let atoms: Vec<_> = i.clauses.iter().map(|c| c.conclusion).collect();
    let forward = p.entails(&atoms, (fd, c));
    let backward = atoms.iter().all(|a| p.entails(&[(fd, c)], *a));
    check(forward && backward, format!("I = {i}, equivalent to f(d) <= c: {}", forward && backward))
}

fn golden_price() -> Outcome {
    let cb = load("price.cbox");
    let (r, _) = timed(&cb, Mode::Chase);
    let Some(log) = &r.combine else { return check(false, "no combination log") };
    let moved = |s: &str| log.moved.iter().any(|m| m == s);
    let c = moved("c{f_price(down(n))} <= c{f_price(down(n1))}");
    let d = moved("c{f_weight(up(m))} <= c{f_weight(up(m1))}");
    check(r.verdict.holds() && c && d, format!("{}, moved c<=c1: {c}, d<=d1: {d}", r.verdict))
}

fn classification_disagreements(cb: &CBox, mode: Mode) -> usize {
    let oracle = completion_classify(cb).unwrap();
    let ours = classify(cb, None, mode);
    let mut bad = 0;
    for (i, a) in ours.names.iter().enumerate() {
        for (j, b) in ours.names.iter().enumerate() {
            bad += usize::from(ours.matrix[i][j] != oracle.subsumes(a, b));
        }
    }
    bad
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let bad: usize = (0..NORMALIZED)
        .into_par_iter()
        .map(|s| classification_disagreements(&normalized_cbox(&mut ChaCha8Rng::seed_from_u64(s)), Mode::Chase))
        .sum();
    let time = t.elapsed();
    check(bad == 0 && time < Duration::from_secs(60), format!("{NORMALIZED} CBoxes, {bad} disagreements, {time:?}"))
}

fn mode_equivalence() -> Outcome {
    let normalized = (0..NORMALIZED)
        .into_par_iter()
        .filter(|s| {
            let cb = normalized_cbox(&mut ChaCha8Rng::seed_from_u64(*s));
            classify(&cb, None, Mode::Chase) != classify(&cb, None, Mode::Instantiate)
        })
        .count();
    let extended = (0..EXTENDED)
        .into_par_iter()
        .filter(|s| {
            let cb = extended_cbox(&mut ChaCha8Rng::seed_from_u64(10_000 + s));
            let q = &cb.queries[0];
            check_query(&cb, q, Mode::Chase).verdict != check_query(&cb, q, Mode::Instantiate).verdict
        })
        .count();
    check(
        normalized + extended == 0,
        format!("{normalized}/{NORMALIZED} normalized and {extended}/{EXTENDED} extended disagree"),
    )
}

fn family(n: usize) -> CBox {
    let mut lines = vec!["role r sub s".to_string()];
    let m = (n - 2) / 10;
    for i in 0..m {
        let j = i + 1;
        lines.push(format!("A{i} sub exists r . A{j}"));
        lines.push(format!("A{i} and B{i} sub C{i}"));
        lines.push(format!("exists s . C{i} sub B{j}"));
    }
    lines.push(format!("? A0 and B0 sub C{m}"));
    let mut cb = parse_cbox(&lines.join("\n")).unwrap();
    let mut k = 0;
    while cb.size() < n {
        lines.insert(1, format!("Z{k} sub Z{}", k + 1));
        k += 1;
        cb = parse_cbox(&lines.join("\n")).unwrap();
    }
    cb
}

fn cubic_bound() -> Outcome {
    let mut rows = Vec::new();
    for n in [50, 100, 200, 400] {
        let cb = family(n);
        let r = check_query(&cb, &cb.queries[0], Mode::Chase);
        let count = r.reduction.clause_count(Mode::Instantiate);
        rows.push((cb.size(), count, count as f64 / (cb.size() as f64).powi(3)));
    }
    let cs: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let spread = cs.iter().cloned().fold(f64::MIN, f64::max) / cs.iter().cloned().fold(f64::MAX, f64::min);
    let worst = rows.windows(2).map(|w| w[1].1 as f64 / w[0].1 as f64).fold(0.0, f64::max);
    let table: Vec<String> = rows.iter().map(|(n, k, c)| format!("n={n}: {k} (c={c:.3})")).collect();
    check(spread <= 2.0 && worst <= 9.0, format!("{}; c spread {spread:.2}x, max doubling ratio {worst:.2}x", table.join(", ")))
}

fn horn_linearity() -> Outcome {
    let mut solved = 0;
    let mut bad = 0;
    for s in 0..200 {
        let cb = extended_cbox(&mut ChaCha8Rng::seed_from_u64(20_000 + s));
        for mode in [Mode::Chase, Mode::Instantiate] {
            let r = check_query(&cb, &cb.queries[0], mode);
            let st = saturate(&r.reduction.problem).stats;
            solved += 1;
            bad += usize::from(st.decrements > st.literal_occurrences);
        }
    }
    check(bad == 0, format!("{solved} instances, {bad} with decrements above literal occurrences"))
}

fn random_term(store: &mut TermStore, rng: &mut ChaCha8Rng, names: &[TermId], depth: usize) -> TermId {
    let ops = store.ops().len();
    if depth == 0 || ops == 0 || rng.gen_bool(0.3) {
        return *names.choose(rng).unwrap();
    }
    let op = loctame::algebra::OpId(rng.gen_range(0..ops) as u32);
    let args = (0..store.op(op).arity()).map(|_| random_term(store, rng, names, depth - 1)).collect();
    store.apply(op, args)
}

fn psi_properties() -> Outcome {
    let mut failures = Vec::new();
    for s in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(30_000 + s);
        let cb = if s % 2 == 0 { extended_cbox(&mut rng) } else { normalized_cbox(&mut rng) };
        let mut t = Translation::new(&cb);
        let names: Vec<TermId> = ["A", "B", "C", "A0", "A1"].iter().map(|n| t.store.constant(n, Sort::Concept)).collect();
        let small: Vec<TermId> = (0..rng.gen_range(1..4)).map(|_| random_term(&mut t.store, &mut rng, &names, 2)).collect();
        let mut large = small.clone();
        large.extend((0..rng.gen_range(0..4)).map(|_| random_term(&mut t.store, &mut rng, &names, 2)));
        let axioms = t.axioms.clone();
        let psi = psi_closure(&mut t.store, &axioms, small.iter().copied());
        let again = psi_closure(&mut t.store, &axioms, psi.iter().copied());
        let psi_large = psi_closure(&mut t.store, &axioms, large.iter().copied());
        let a: BTreeSet<TermId> = psi.iter().copied().collect();
        let b: BTreeSet<TermId> = again.iter().copied().collect();
        if a != b {
            failures.push(format!("idempotence at {s}"));
        }
        if !psi.iter().all(|x| psi_large.contains(x)) {
            failures.push(format!("monotonicity at {s}"));
        }
        // the same CBox without role axioms
        let mut plain = cb.clone();
        plain.axioms.retain(|a| matches!(a, loctame::syntax::Axiom::Gci { .. }));
        let mut tp = Translation::new(&plain);
        let names: Vec<TermId> = ["A", "B", "A0"].iter().map(|n| tp.store.constant(n, Sort::Concept)).collect();
        let seed: Vec<TermId> = (0..3).map(|_| random_term(&mut tp.store, &mut rng, &names, 2)).collect();
        let axioms = tp.axioms.clone();
        let closed: BTreeSet<TermId> = psi_closure(&mut tp.store, &axioms, seed.iter().copied()).into_iter().collect();
        let applies: BTreeSet<TermId> = seed.iter().copied().filter(|x| tp.store.is_apply(*x)).collect();
        if closed != applies {
            failures.push(format!("psi != seed without role axioms at {s}"));
        }
    }
    check(failures.is_empty(), if failures.is_empty() { "500 pairs".to_string() } else { failures.join(", ") })
}

fn soundness() -> Outcome {
    let results: Vec<(bool, bool)> = (0..EXTENDED)
        .into_par_iter()
        .map(|s| {
            let cb = extended_cbox(&mut ChaCha8Rng::seed_from_u64(40_000 + s));
            let q = &cb.queries[0];
            let holds = check_query(&cb, q, Mode::Chase).verdict.holds();
            (holds, bounded_model_search(&cb, q, 3).is_some())
        })
        .collect();
    let unsound = results.iter().filter(|(h, m)| *h && *m).count();
    let subsumed = results.iter().filter(|(h, _)| *h).count();
    let negative = results.len() - subsumed;
    let refuted = results.iter().filter(|(h, m)| !*h && *m).count();
    check(
        unsound == 0,
        format!(
            "{EXTENDED} instances, {subsumed} subsumed, {unsound} with countermodels; countermodels for {refuted}/{negative} non-subsumptions"
        ),
    )
}

fn model_checks() -> Outcome {
    let mut sat = 0;
    let mut bad = 0;
    for s in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(50_000 + s);
        let cb = if s % 2 == 0 { extended_cbox(&mut rng) } else { normalized_cbox(&mut rng) };
        let names = cb.concept_names();
        let queries: Vec<Query> = if names.is_empty() {
            Vec::new()
        } else if cb.queries.is_empty() {
            (0..4)
                .map(|_| Query {
                    sub: ConceptExpr::name(names.choose(&mut rng).unwrap()),
                    sup: ConceptExpr::name(names.choose(&mut rng).unwrap()),
                })
                .collect()
        } else {
            cb.queries.clone()
        };
        for q in &queries {
            for mode in [Mode::Chase, Mode::Instantiate] {
                let r = check_query(&cb, q, mode);
                if let Some(model) = &r.model {
                    sat += 1;
                    bad += usize::from(!model_check(model, &r.reduction.problem));
                }
            }
        }
    }
    check(bad == 0 && sat > 0, format!("{sat} SAT verdicts, {bad} least models violate a clause"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("golden cyclic TBox", golden_cyclic),
        ("golden Endocarditis", golden_endocarditis),
        ("golden semi-Galois interpolant", golden_sgc),
        ("golden price/weight", golden_price),
        ("oracle equivalence", oracle_equivalence),
        ("mode equivalence", mode_equivalence),
        ("cubic clause count", cubic_bound),
        ("Horn solver linearity", horn_linearity),
        ("psi properties", psi_properties),
        ("soundness sampling", soundness),
        ("least-model check", model_checks),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = f();
        let status = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {:<32} {status}  {}  [{:.1?}]", i + 1, name, o.detail, t.elapsed());
        failed += usize::from(!o.ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
