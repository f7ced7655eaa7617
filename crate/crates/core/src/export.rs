//! DOT text for graphs: one line per vertex, then one line per edge, both in
//! increasing order.

use std::fmt::Write;

use crate::hypergraph::Graph;

pub fn to_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n");
    for v in 0..g.n() {
        writeln!(out, "  {v};").expect("writing to a String cannot fail");
    }
    for (u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").expect("writing to a String cannot fail");
    }
    out.push_str("}\n");
    out
}
