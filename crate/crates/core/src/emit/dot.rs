use std::fmt::Write;

use crate::pattern::Pattern;

fn shape(p: &Pattern, i: usize) -> &'static str {
    let label = &p.node(i).label;
    let tax = p.taxonomy();
    let mut ancestors: Vec<&str> = tax.top_level_ancestors(label).iter().map(|c| c.local_name()).collect();
    if tax.parents(label).map(|ps| ps.contains(&tax.top())).unwrap_or(false) {
        ancestors.push(label.local_name());
    }
    for (name, shape) in [("Instance", "box"), ("Model", "hexagon"), ("Process", "ellipse"), ("Actor", "diamond")] {
        if ancestors.contains(&name) {
            return shape;
        }
    }
    "plaintext"
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering. Node shapes follow the top-level class of the label.
pub fn emit_dot(p: &Pattern) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(p.name()));
    let mut order: Vec<usize> = (0..p.node_count()).collect();
    order.sort_by(|&a, &b| p.node(a).id.cmp(&p.node(b).id));
    for &i in &order {
        let n = p.node(i);
        let _ = writeln!(
            out,
            "  {} [label={}, shape={}];",
            quote(n.id.as_str()),
            quote(&format!("{} : {}", n.id, n.label.local_name())),
            shape(p, i)
        );
    }
    let mut edges: Vec<_> = p.edges().collect();
    edges.sort();
    for (a, b) in edges {
        let _ = writeln!(out, "  {} -> {};", quote(a.as_str()), quote(b.as_str()));
    }
    out.push_str("}\n");
    out
}
