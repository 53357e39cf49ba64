//! Seeded random CBoxes, produced as text and parsed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{parse_cbox, CBox};

/// A normalized binary EL+ CBox with at most 12 names, 4 roles and 30
/// axioms, with no queries.
pub fn normalized_cbox<R: Rng>(rng: &mut R) -> CBox {
    let names: Vec<String> = (0..rng.gen_range(2..=12)).map(|i| format!("A{i}")).collect();
    let roles: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("r{i}")).collect();
    let lhs = |rng: &mut R| -> String {
        if rng.gen_bool(0.04) {
            "top".into()
        } else {
            names.choose(rng).unwrap().clone()
        }
    };
    let rhs = |rng: &mut R| -> String {
        if rng.gen_bool(0.04) {
            "bot".into()
        } else {
            names.choose(rng).unwrap().clone()
        }
    };
    let mut lines = Vec::new();
    for _ in 0..rng.gen_range(1..=30) {
        let r = roles.choose(rng).unwrap().clone();
        let line = match rng.gen_range(0..100) {
            0..=24 => format!("{} sub {}", lhs(rng), rhs(rng)),
            25..=44 => format!("{} and {} sub {}", lhs(rng), lhs(rng), rhs(rng)),
            45..=69 => format!("{} sub exists {r} . {}", lhs(rng), rhs(rng)),
            70..=89 => format!("exists {r} . {} sub {}", lhs(rng), rhs(rng)),
            90..=94 => format!("role {r} sub {}", roles.choose(rng).unwrap()),
            _ => format!("role {r} o {} sub {}", roles.choose(rng).unwrap(), roles.choose(rng).unwrap()),
        };
        lines.push(line);
    }
    parse_cbox(&lines.join("\n")).expect("generated CBox parses")
}

fn expr<R: Rng>(rng: &mut R, depth: usize) -> String {
    let names = ["A", "B", "C"];
    let leaf = |rng: &mut R| names.choose(rng).unwrap().to_string();
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..10) {
        0..=3 => leaf(rng),
        4 => format!("({} and {})", expr(rng, depth - 1), expr(rng, depth - 1)),
        5 | 6 => format!("exists {} . {}", ["r", "s"].choose(rng).unwrap(), expr(rng, depth - 1)),
        7 => format!("exists u . {}", expr(rng, depth - 1)),
        _ => format!("exists t . ({}, {})", expr(rng, depth - 1), expr(rng, depth - 1)),
    }
}

/// A CBox over at most three concept names with guarded, ternary, id and
/// restricted-role axioms, and one query.
pub fn extended_cbox<R: Rng>(rng: &mut R) -> CBox {
    let mut lines = vec!["decl role t : 3".to_string(), "role u = restrict t at 3 to C".to_string()];
    for _ in 0..rng.gen_range(1..=5) {
        lines.push(format!("{} sub {}", expr(rng, 2), expr(rng, 2)));
    }
    for _ in 0..rng.gen_range(1..=3) {
        let mut ax = match rng.gen_range(0..7) {
            0 => "role r sub s".to_string(),
            1 => "role r o s sub r".to_string(),
            2 => "role r o s sub id".to_string(),
            3 => "role t o (r, s) sub t".to_string(),
            4 => "role t o (r, s) sub id".to_string(),
            5 => "role u sub r".to_string(),
            _ => "role s o r o s sub s".to_string(),
        };
        if rng.gen_bool(0.5) {
            ax.push_str(&format!(" guard {}", ["A", "B", "C"].choose(rng).unwrap()));
        }
        lines.push(ax);
    }
    let sub = if rng.gen_bool(0.7) { expr(rng, 0) } else { expr(rng, 1) };
    let sup = if rng.gen_bool(0.7) { expr(rng, 0) } else { expr(rng, 1) };
    lines.push(format!("? {sub} sub {sup}"));
    parse_cbox(&lines.join("\n")).expect("generated CBox parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let cb = normalized_cbox(&mut rng);
            assert!(cb.concept_names().len() <= 12 && cb.roles.len() <= 4 && cb.axioms.len() <= 30);
            let cb = extended_cbox(&mut rng);
            assert!(cb.concept_names().len() <= 3);
            assert_eq!(cb.queries.len(), 1);
        }
    }
}
