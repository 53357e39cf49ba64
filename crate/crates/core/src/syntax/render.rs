use std::fmt::Write;

use super::{Axiom, CBox, ConceptExpr, IntervalConcept, RoleChain, RoleTarget, Sort};

/// Prints a CBox in the surface syntax; `parse_cbox(&render(c))` gives back `c`.
pub fn render(cbox: &CBox) -> String {
    let mut out = String::new();
    for (name, sig) in &cbox.roles {
        if cbox.restriction(name).is_some() {
            continue;
        }
        if sig.positions.iter().all(|s| *s == Sort::Concept) {
            writeln!(out, "decl role {name} : {}", sig.arity()).unwrap();
        } else {
            let sorts: Vec<String> = sig.positions.iter().map(|s| s.to_string()).collect();
            writeln!(out, "decl role {name} : ({})", sorts.join(", ")).unwrap();
        }
    }
    for ax in &cbox.axioms {
        match ax {
            Axiom::Gci { lhs, rhs } => writeln!(out, "{} sub {}", concept(lhs), concept(rhs)).unwrap(),
            Axiom::RoleIncl { lhs, rhs, guard } => {
                let l = match lhs {
                    RoleChain::Role(r) => r.clone(),
                    RoleChain::Compose(rs) => rs.join(" o "),
                    RoleChain::Tuple(r, ss) => format!("{r} o ({})", ss.join(", ")),
                };
                let r = match rhs {
                    RoleTarget::Role(s) => s.as_str(),
                    RoleTarget::Id => "id",
                };
                write!(out, "role {l} sub {r}").unwrap();
                if let Some(g) = guard {
                    write!(out, " guard {}", concept(g)).unwrap();
                }
                out.push('\n');
            }
            Axiom::Restriction { role, base, position, filler } => {
                writeln!(out, "role {role} = restrict {base} at {position} to {}", concept(filler)).unwrap()
            }
        }
    }
    for q in &cbox.queries {
        writeln!(out, "? {} sub {}", concept(&q.sub), concept(&q.sup)).unwrap();
    }
    out
}

pub fn concept(c: &ConceptExpr) -> String {
    match c {
        ConceptExpr::Bottom => "bot".into(),
        ConceptExpr::Top => "top".into(),
        ConceptExpr::Name(n, _) => n.clone(),
        ConceptExpr::Conj(l, r) => {
            let rs = concept(r);
            if matches!(**r, ConceptExpr::Conj(..)) {
                format!("{} and ({rs})", concept(l))
            } else {
                format!("{} and {rs}", concept(l))
            }
        }
        ConceptExpr::Exists { role, args } => {
            if args.len() == 1 {
                let a = concept(&args[0]);
                if matches!(args[0], ConceptExpr::Conj(..)) {
                    format!("exists {role} . ({a})")
                } else {
                    format!("exists {role} . {a}")
                }
            } else {
                let parts: Vec<String> = args.iter().map(concept).collect();
                format!("exists {role} . ({})", parts.join(", "))
            }
        }
        ConceptExpr::Interval(i) => match i {
            IntervalConcept::Up(e) => format!("num up {e}"),
            IntervalConcept::Down(e) => format!("num down {e}"),
            IntervalConcept::Closed(a, b) => format!("num [{a}, {b}]"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_cbox;

    #[test]
    fn round_trip_small() {
        let text = "decl role price : (concept, num)\n\
                    decl role r : 3\n\
                    A sub B and (C and D)\n\
                    exists r . (A, B and C) sub exists price . num [1/2, 3]\n\
                    role s o s sub s guard A\n\
                    role r' = restrict r at 2 to A\n\
                    ? A sub exists s . (B and C)\n";
        let cb = parse_cbox(text).unwrap();
        assert_eq!(parse_cbox(&render(&cb)).unwrap(), cb);
    }
}
