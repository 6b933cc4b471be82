use std::fmt::Write as _;

use super::Drg;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Unlabeled nodes are drawn as small gray circles, tops
/// with a double border.
pub fn to_dot(g: &Drg) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(g.id()));
    for n in g.nodes() {
        let peripheries = if g.tops().contains(&n.id) { 2 } else { 1 };
        match &n.label {
            Some(l) => {
                let _ = writeln!(out, "  n{} [label=\"{}\", shape=box, peripheries={peripheries}];", n.id, escape(l));
            }
            None => {
                let _ = writeln!(
                    out,
                    "  n{} [label=\"\", shape=circle, style=filled, fillcolor=gray, peripheries={peripheries}];",
                    n.id
                );
            }
        }
    }
    for e in g.edges() {
        match &e.label {
            Some(l) => {
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", e.source, e.target, escape(l));
            }
            None => {
                let _ = writeln!(out, "  n{} -> n{};", e.source, e.target);
            }
        }
    }
    out.push_str("}\n");
    out
}
