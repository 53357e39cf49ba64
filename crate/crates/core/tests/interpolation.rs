use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use loctame::interpolate::{interpolate, InterpolationError, InterpolationProblem};

fn term(rng: &mut ChaCha8Rng, consts: &[&str], ops: bool) -> String {
    let c = consts.choose(rng).unwrap().to_string();
    if ops && rng.gen_bool(0.4) {
        format!("{}({c})", ["f", "g"].choose(rng).unwrap())
    } else {
        c
    }
}

fn random_problem(seed: u64) -> String {
    let axioms = ["role f sub g", "role f o f sub f", "role f o g sub id", "role g o f sub f"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(0..4);
    let mut lines: Vec<String> = axioms.choose_multiple(&mut rng, k).map(|a| a.to_string()).collect();
    let a_side = ["a1", "a2", "s1", "s2"];
    let b_side = ["b1", "b2", "s1", "s2"];
    let ops = rng.gen_bool(0.8);
    for _ in 0..rng.gen_range(2..7) {
        lines.push(format!("A: {} <= {}", term(&mut rng, &a_side, ops), term(&mut rng, &a_side, ops)));
    }
    for _ in 0..rng.gen_range(1..4) {
        lines.push(format!("B: {} <= {}", term(&mut rng, &b_side, ops), term(&mut rng, &b_side, ops)));
    }
    lines.push(format!("B: {} !<= {}", term(&mut rng, &b_side, ops), term(&mut rng, &b_side, ops)));
    lines.join("\n")
}

#[test]
fn every_refutable_problem_has_a_verified_interpolant() {
    let (mut found, mut nontrivial) = (0, 0);
    for seed in 0..3000 {
        let text = random_problem(seed);
        let mut p = InterpolationProblem::parse(&text).unwrap();
        let joint: Vec<_> = p.a.iter().chain(&p.b).copied().collect();
        let unsat = p.entails(&joint, p.negative);
        match interpolate(&mut p) {
            Ok(i) => {
                assert!(unsat, "seed {seed}: interpolant {i} for a satisfiable problem");
                found += 1;
                nontrivial += usize::from(!i.clauses.is_empty());
            }
            Err(InterpolationError::NotUnsat) => assert!(!unsat, "seed {seed}\n{text}"),
            Err(e) => panic!("seed {seed}: {e}\n{text}"),
        }
    }
    assert!(found > 300 && nontrivial > 50, "{found} interpolants, {nontrivial} non-trivial");
}

#[test]
fn information_flowing_back_gives_an_implication() {
    // B gives f(s2) <= s2, from which A gets s2 <= f(s2)
    let text = "role g o f sub f\nrole f o g sub id\n\
                A: a1 <= s2\nA: g(a2) <= s1\nA: s2 <= f(s1)\nA: s1 <= f(a1)\n\
                B: f(s2) <= b2\nB: g(b2) <= g(b1)\nB: s2 <= g(s2)\nB: s2 !<= b2";
    let mut p = InterpolationProblem::parse(text).unwrap();
    let i = interpolate(&mut p).unwrap();
    assert_eq!(i.to_string(), "(f(s2) <= s2 -> s2 <= f(s2))");
}

#[test]
fn shared_upper_bound_separates() {
    // b <= s <= g(a): the shared s stands between the B and A sides
    let text = "role f o g sub id\nA: s <= g(a)\nA: a <= c\nB: b <= s\nB: f(b) !<= c";
    let mut p = InterpolationProblem::parse(text).unwrap();
    let i = interpolate(&mut p).unwrap();
    assert_eq!(i.to_string(), "f(s) <= c");
    assert!(i.separations.iter().all(|(_, t, _)| t == "s"));
}
