//! Pretty-printer producing documents that resolve back to the same library.

use std::fmt::Write;

use super::{DeclKind, Library};
use crate::pattern::Pattern;
use crate::taxonomy::{default_taxonomy_shared, Taxonomy};

const DEFAULT_ONTOLOGY: &str = "ontohub:NeSyPatterns.omn";

/// Renders `lib` as a document. Every node gets an explicit id, and every
/// refinement an explicit `via` map, so re-parsing needs no inference.
///
/// Libraries built in code (without a recorded data clause) are written
/// over the bundled ontology, extended by their extra classes.
pub fn emit_dsl(lib: &Library) -> String {
    let mut out = String::from("logic NeSyPatterns\n");
    for (kind, name) in declaration_order(lib) {
        out.push('\n');
        match kind {
            DeclKind::Pattern => pattern(&mut out, lib, &name),
            DeclKind::Combine => {
                let _ = writeln!(out, "pattern {name} = combine {} end", lib.combine_defs[&name]);
            }
            DeclKind::Refinement => {
                let r = &lib.refinements[&name];
                let _ = write!(
                    out,
                    "refinement {name} = {} refined to {}",
                    r.source().name(),
                    r.target().name()
                );
                let pairs: Vec<String> = r
                    .source()
                    .nodes()
                    .iter()
                    .map(|n| format!("{} |-> {}", n.id, r.node_map()[&n.id]))
                    .collect();
                if !pairs.is_empty() {
                    let _ = write!(out, "\n  via {}", pairs.join(", "));
                }
                out.push_str("\nend\n");
            }
            DeclKind::Network => {
                let net = &lib.networks[&name];
                let members: Vec<&str> = net
                    .patterns()
                    .iter()
                    .map(|p| p.name())
                    .chain(net.edges().iter().map(|e| e.refinement.name()))
                    .collect();
                let _ = writeln!(out, "network {name} = {} end", members.join(", "));
            }
        }
    }
    out
}

fn declaration_order(lib: &Library) -> Vec<(DeclKind, String)> {
    if !lib.order.is_empty() {
        return lib.order.clone();
    }
    let mut order: Vec<(DeclKind, String)> = lib
        .patterns
        .keys()
        .filter(|p| !lib.combine_defs.contains_key(*p))
        .map(|p| (DeclKind::Pattern, p.clone()))
        .collect();
    order.extend(lib.refinements.keys().map(|r| (DeclKind::Refinement, r.clone())));
    order.extend(lib.networks.keys().map(|n| (DeclKind::Network, n.clone())));
    order.extend(lib.combine_defs.keys().map(|c| (DeclKind::Combine, c.clone())));
    order
}

fn pattern(out: &mut String, lib: &Library, name: &str) {
    let p = &lib.patterns[name];
    let data = match lib.pattern_ontology.get(name) {
        Some(key) => key.clone(),
        None => data_clause(p.taxonomy()),
    };
    let _ = writeln!(out, "pattern {name} = data {data}");
    write_body(out, p);
    out.push_str("end\n");
}

fn write_body(out: &mut String, p: &Pattern) {
    let node = |i: usize| {
        let n = p.node(i);
        format!("{} : {}", n.id, n.label.local_name())
    };
    // every node on its own first, so declaration order survives
    for i in 0..p.node_count() {
        let _ = writeln!(out, "  {};", node(i));
    }
    for (a, b) in p.edge_indices() {
        let _ = writeln!(out, "  {} -> {};", node(a), node(b));
    }
}

fn data_clause(t: &Taxonomy) -> String {
    let base = default_taxonomy_shared();
    if *t == *base {
        return DEFAULT_ONTOLOGY.to_string();
    }
    let mut fragment = String::new();
    for class in t.classes().iter().filter(|c| !base.contains(c)) {
        let _ = write!(fragment, "\n    Class: <{}>", class.iri());
        let parents = t.parents(class).expect("own class");
        if !parents.is_empty() {
            let list: Vec<String> = parents.iter().map(|p| format!("<{}>", p.iri())).collect();
            let _ = write!(fragment, " SubClassOf: {}", list.join(", "));
        }
    }
    format!("{{ {DEFAULT_ONTOLOGY} then{fragment} }}")
}
