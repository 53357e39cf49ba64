use serde::Serialize;

use loctame::hornsat::Mode;
use loctame::pipeline::QueryResult;
use loctame::reduce::render_dump;

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct Micros {
    pub translate: u64,
    pub reduce: u64,
    pub solve: u64,
    pub total: u64,
}

#[derive(Serialize, Debug, Clone, PartialEq, Eq)]
pub struct ClauseCount {
    pub instantiate: u64,
    pub chase: u64,
}

#[derive(Serialize, Debug, Clone)]
pub struct QueryReport {
    pub query: String,
    pub verdict: String,
    pub holds: bool,
    pub psi_size: usize,
    pub clause_count: ClauseCount,
    pub micros_per_stage: Micros,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<String>,
}

#[derive(Serialize, Debug, Clone)]
pub struct RunReport {
    pub file: String,
    pub mode: String,
    pub seed: u64,
    pub queries: Vec<QueryReport>,
}

impl RunReport {
    pub fn all_hold(&self) -> bool {
        self.queries.iter().all(|q| q.holds)
    }
}

pub fn psi_terms(r: &QueryResult) -> Vec<String> {
    let mut v: Vec<String> = r.reduction.psi.iter().map(|t| r.translation.store.render(*t)).collect();
    v.sort();
    v.dedup();
    v
}

pub fn query_report(r: &QueryResult, emit_psi: bool, emit_reduction: bool) -> QueryReport {
    let t = &r.timings;
    QueryReport {
        query: r.query.clone(),
        verdict: r.verdict.to_string(),
        holds: r.verdict.holds(),
        psi_size: r.reduction.psi.len(),
        clause_count: ClauseCount {
            instantiate: r.reduction.clause_count(Mode::Instantiate),
            chase: r.reduction.clause_count(Mode::Chase),
        },
        micros_per_stage: Micros { translate: t.translate, reduce: t.reduce, solve: t.solve, total: t.total() },
        psi: emit_psi.then(|| psi_terms(r)),
        reduction: emit_reduction.then(|| render_dump(&r.reduction.problem)),
    }
}

pub fn print_text(report: &RunReport) {
    for q in &report.queries {
        println!("{}: {}", q.query, q.verdict);
        println!(
            "  psi {}  clauses {} (instantiate) / {} (chase)  {}us",
            q.psi_size, q.clause_count.instantiate, q.clause_count.chase, q.micros_per_stage.total
        );
        if let Some(psi) = &q.psi {
            println!("  psi:");
            for t in psi {
                println!("    {t}");
            }
        }
        if let Some(dump) = &q.reduction {
            print!("{dump}");
        }
    }
}
