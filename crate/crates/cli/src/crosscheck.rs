use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use loctame::hornsat::Mode;
use loctame::normalize::is_normal;
use loctame::oracle::{bounded_model_search, completion_classify, gen};
use loctame::pipeline::{check_query, classify};
use loctame::syntax::CBox;

#[derive(Serialize, Debug, Default)]
pub struct CrossReport {
    pub checked: usize,
    pub failures: Vec<Failure>,
    /// `NOT SUBSUMED` verdicts without a countermodel of size at most 3.
    pub unconfirmed: usize,
}

#[derive(Serialize, Debug, Clone)]
pub struct Failure {
    pub seed: Option<u64>,
    pub what: String,
}

impl CrossReport {
    fn fail(&mut self, seed: Option<u64>, what: String) {
        self.failures.push(Failure { seed, what });
    }
}

/// Classification against the completion oracle, in both modes.
fn check_classification(cbox: &CBox, seed: Option<u64>, out: &mut CrossReport) {
    let chase = classify(cbox, None, Mode::Chase);
    let inst = classify(cbox, None, Mode::Instantiate);
    out.checked += 1;
    if chase != inst {
        out.fail(seed, "instantiate and chase classifications differ".into());
    }
    let oracle = match completion_classify(cbox) {
        Ok(o) => o,
        Err(e) => return out.fail(seed, format!("oracle: {e}")),
    };
    for (i, a) in chase.names.iter().enumerate() {
        for (j, b) in chase.names.iter().enumerate() {
            if chase.matrix[i][j] != oracle.subsumes(a, b) {
                out.fail(seed, format!("{a} sub {b}: pipeline {}, completion {}", chase.matrix[i][j], oracle.subsumes(a, b)));
            }
        }
    }
}

/// Mode agreement and bounded-model soundness for every query.
fn check_queries(cbox: &CBox, seed: Option<u64>, out: &mut CrossReport) {
    for q in &cbox.queries {
        out.checked += 1;
        let chase = check_query(cbox, q, Mode::Chase);
        let inst = check_query(cbox, q, Mode::Instantiate);
        if chase.verdict != inst.verdict {
            out.fail(seed, format!("{}: modes disagree", chase.query));
        }
        let cm = bounded_model_search(cbox, q, 3);
        match (chase.verdict.holds(), cm) {
            (true, Some(m)) => out.fail(seed, format!("{}: SUBSUMED but countermodel of size {}", chase.query, m.size)),
            (false, None) => out.unconfirmed += 1,
            _ => {}
        }
    }
}

pub fn check_file(cbox: &CBox) -> CrossReport {
    let mut out = CrossReport::default();
    if is_normal(cbox) && completion_classify(cbox).is_ok() {
        check_classification(cbox, None, &mut out);
    }
    check_queries(cbox, None, &mut out);
    out
}

pub fn check_samples(samples: usize, seed: u64, out: &mut CrossReport) {
    for i in 0..samples as u64 {
        let s = seed.wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        check_classification(&gen::normalized_cbox(&mut rng), Some(s), out);
        check_queries(&gen::extended_cbox(&mut rng), Some(s), out);
    }
}
