//! Graphviz export of a constraint graph, one arc per line.

use std::fmt::Write;

use efic_core::{ArcKind, ConstraintGraph, VertexId};

fn label(g: &ConstraintGraph, id: VertexId) -> String {
    let v = g.vertex(id);
    let profile: Vec<String> = v.profile.iter().map(usize::to_string).collect();
    format!("\"{}|{}\"", v.agent, profile.join(","))
}

/// Vertices are named `"agent|t_0,t_1,..."`; each arc carries its weight and kind.
pub fn to_dot(g: &ConstraintGraph) -> String {
    let mut out = String::from("digraph constraints {\n");
    for k in 0..g.vertex_count() {
        writeln!(out, "  {};", label(g, VertexId(k))).unwrap();
    }
    for a in g.arcs() {
        let style = match a.kind {
            ArcKind::Ef => "solid",
            ArcKind::Ic => "dashed",
        };
        writeln!(
            out,
            "  {} -> {} [weight_value={}, kind={}, label=\"{} {}\", style={}];",
            label(g, a.tail),
            label(g, a.head),
            a.weight,
            a.kind,
            a.kind,
            a.weight,
            style
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
