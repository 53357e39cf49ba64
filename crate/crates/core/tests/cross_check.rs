use loctame::hornsat::Mode;
use loctame::oracle::gen::{extended_cbox, normalized_cbox};
use loctame::oracle::{bounded_model_search, completion_classify};
use loctame::pipeline::{check_query, classify};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn classification_matches_completion() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..150 {
        let cb = normalized_cbox(&mut rng);
        let oracle = completion_classify(&cb).unwrap();
        let ours = classify(&cb, None, Mode::Chase);
        for a in &ours.names {
            for b in &ours.names {
                assert_eq!(ours.subsumes(a, b).unwrap(), oracle.subsumes(a, b), "case {i}: {a} sub {b}\n{}", loctame::syntax::render(&cb));
            }
        }
    }
}

#[test]
fn extended_verdicts_are_sound() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut refuted, mut not_subsumed) = (0, 0);
    for i in 0..100 {
        let cb = extended_cbox(&mut rng);
        let q = &cb.queries[0];
        let chase = check_query(&cb, q, Mode::Chase).verdict;
        let inst = check_query(&cb, q, Mode::Instantiate).verdict;
        assert_eq!(chase, inst, "case {i}\n{}", loctame::syntax::render(&cb));
        let m = bounded_model_search(&cb, q, 3);
        if chase.holds() {
            assert!(m.is_none(), "case {i}: countermodel {m:?}\n{}", loctame::syntax::render(&cb));
        } else {
            not_subsumed += 1;
            if m.is_some() {
                refuted += 1;
            }
        }
    }
    println!("countermodels for {refuted}/{not_subsumed} non-subsumptions");
}
