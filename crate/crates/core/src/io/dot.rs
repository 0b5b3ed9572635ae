//! Graphviz export.
//!
//! Causality, flow and bundle membership are solid arrows, symmetric conflict
//! is a dotted line and one-way asymmetric conflict a dotted arrow.

use std::fmt::Write as _;

use crate::models::Model;
use crate::poset::{EventId, EventStructure, Label};

fn header(out: &mut String, ids: &[EventId], labels: &[Label]) {
    out.push_str("digraph es {\n  node [shape=plaintext];\n");
    for (id, l) in ids.iter().zip(labels) {
        let _ = writeln!(out, "  \"{id}\" [label=\"{id}\", xlabel=\"{l}\"];");
    }
}

fn edge(out: &mut String, ids: &[EventId], x: usize, y: usize, attrs: &str) {
    let _ = writeln!(out, "  \"{}\" -> \"{}\"{attrs};", ids[x], ids[y]);
}

const CONFLICT: &str = " [style=dotted, dir=none]";
const ASYM: &str = " [style=dotted]";

/// Renders the relations of a model; poset-kind structures are rendered as
/// their configuration diagram.
pub fn export_dot(model: &Model) -> String {
    let ids = model.ids();
    let mut out = String::new();
    match model {
        Model::Poset(es) => return export_configs_dot(es),
        Model::Pes(p) => {
            header(&mut out, ids, p.labels());
            for (x, y) in p.causality_reduction() {
                edge(&mut out, ids, x, y, "");
            }
            for (x, y) in p.minimal_conflicts() {
                edge(&mut out, ids, x, y, CONFLICT);
            }
        }
        Model::Aes(a) => {
            header(&mut out, ids, a.labels());
            for (x, y) in a.causality_reduction() {
                edge(&mut out, ids, x, y, "");
            }
            let gens = a.asym_generators();
            for &(x, y) in &gens {
                if a.lt(x, y) {
                    continue;
                }
                if gens.contains(&(y, x)) {
                    if x < y {
                        edge(&mut out, ids, x, y, CONFLICT);
                    }
                } else {
                    edge(&mut out, ids, x, y, ASYM);
                }
            }
        }
        Model::Fes(f) => {
            header(&mut out, ids, f.labels());
            for (x, y) in f.flow_pairs() {
                edge(&mut out, ids, x, y, " [arrowhead=normalnormal]");
            }
            for (x, y) in f.conflict_pairs() {
                edge(&mut out, ids, x, y, CONFLICT);
            }
        }
        Model::Bes(b) => {
            header(&mut out, ids, b.labels());
            for (k, &(xs, y)) in b.bundles().iter().enumerate() {
                for x in xs.iter() {
                    edge(&mut out, ids, x, y, &format!(" [label=\"{k}\"]"));
                }
            }
            for (x, y) in b.conflict_pairs() {
                edge(&mut out, ids, x, y, CONFLICT);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Renders the configurations as a Hasse diagram of single-event transitions.
pub fn export_configs_dot(es: &EventStructure) -> String {
    let mut out = String::from("digraph configs {\n  node [shape=box];\n");
    for (i, c) in es.family().iter().enumerate() {
        let _ = writeln!(out, "  c{i} [label=\"{}\"];", es.show(c));
    }
    for i in 0..es.family().len() {
        for &(_, j) in es.single_successors(i) {
            let _ = writeln!(out, "  c{i} -> c{j} [dir=none];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::format::parse_es;
    use crate::models::configs_pes;

    const P2: &str = "kind pes\nevent a12 a\nevent b12 b\nevent b3 b\nevent c c\nle a12 b12\ncf a12 b3\n";

    #[test]
    fn p2_relations() {
        let dot = export_dot(&parse_es(P2).unwrap());
        assert_eq!(dot.matches("xlabel").count(), 4);
        assert_eq!(dot.lines().filter(|l| l.contains("->") && !l.contains("dotted")).count(), 1);
        assert_eq!(dot.matches("dotted").count(), 1);
    }

    #[test]
    fn p2_configuration_diagram() {
        let Model::Pes(p) = parse_es(P2).unwrap() else { panic!() };
        let dot = export_configs_dot(&configs_pes(&p));
        assert_eq!(dot.matches("[label=").count(), 8);
        assert_eq!(dot.matches("->").count(), 10);
    }

    #[test]
    fn empty_structure_has_no_nodes() {
        let dot = export_dot(&parse_es("kind pes\n").unwrap());
        assert!(!dot.contains("xlabel"));
        assert!(!dot.contains("->"));
    }
}
