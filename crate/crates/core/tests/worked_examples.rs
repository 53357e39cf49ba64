use std::path::PathBuf;

use loctame::hornsat::{Mode, Origin};
use loctame::pipeline::{check_query, explain, QueryResult};
use loctame::syntax::parse_cbox;

fn load(name: &str) -> loctame::syntax::CBox {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cboxes").join(name);
    parse_cbox(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn run(name: &str, mode: Mode) -> QueryResult {
    let cb = load(name);
    check_query(&cb, &cb.queries[0], mode)
}

#[test]
fn cyclic_tbox_uses_monotonicity() {
    for mode in [Mode::Chase, Mode::Instantiate] {
        let r = run("cyclic.cbox", mode);
        assert!(r.verdict.holds(), "{mode}");
        let p = &r.reduction.problem;
        let (trace, _) = r.proof.as_ref().unwrap();
        // e2 = A1&A2, e1 = P1&P2, d_i = f_r1(e_i)
        let e2 = "c{A1&A2}";
        let e1 = "c{P1&P2}";
        let mon = p.clauses.iter().find(|c| {
            c.origin == Origin::Mon
                && c.premises.len() == 1
                && p.name(c.premises[0].lhs) == e2
                && p.name(c.premises[0].rhs) == e1
        });
        let mon = mon.expect("Mon instance e2 <= e1 -> d2 <= d1");
        let concl = mon.conclusion.unwrap();
        assert_eq!(p.render_atom(concl), "c{f_r1(A1&A2)} <= c{f_r1(P1&P2)}");
        assert!(trace.contains(concl));
    }
}

#[test]
fn endocarditis() {
    let r = run("endocarditis.cbox", Mode::Chase);
    assert!(r.verdict.holds());
    let lines = explain(&r).unwrap();
    assert!(lines.iter().any(|l| l.contains("HeartWall <= c{f_cont-in(Heart)}")), "{lines:#?}");
}

#[test]
fn price_weight() {
    let r = run("price.cbox", Mode::Chase);
    let log = r.combine.as_ref().unwrap();
    assert!(r.verdict.holds(), "{log:?}");
    println!("{log:#?}");
}
