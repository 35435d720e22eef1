use std::fmt;

use crate::diagnostics::Diagnostic;
use crate::pattern::{NodeId, Pattern};
use crate::taxonomy::ClassRef;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    ProvidesInput,
    HasOutput,
    Throughput,
    ConnectedTo,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::ProvidesInput => "providesInput",
            Relation::HasOutput => "hasOutput",
            Relation::Throughput => "throughput",
            Relation::ConnectedTo => "connectedTo",
        })
    }
}

/// Class memberships and object-property facts describing a pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AboxTriples {
    pub memberships: Vec<(NodeId, ClassRef)>,
    pub links: Vec<(Relation, NodeId, NodeId)>,
    pub warnings: Vec<Diagnostic>,
}

impl AboxTriples {
    /// One fact per line: each membership followed by the node's outgoing links.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (node, class) in &self.memberships {
            out.push_str(&format!("{node} : {}\n", class.local_name()));
            for (rel, a, b) in self.links.iter().filter(|(_, a, _)| a == node) {
                out.push_str(&format!("{rel}({a},{b})\n"));
            }
        }
        out
    }
}

impl fmt::Display for AboxTriples {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Translates a pattern into ABox facts. Edges touching a process become
/// `providesInput`, `hasOutput` or `throughput`; any other edge becomes
/// `connectedTo` with a warning. Without a `Process` class every edge is
/// of the last kind.
pub fn emit_abox(p: &Pattern) -> AboxTriples {
    let tax = p.taxonomy();
    let process = tax.lookup("Process").and_then(|c| tax.id(c));
    let is_process = |i: usize| process.is_some_and(|pr| tax.leq_id(p.label_id(i), pr));
    let memberships = p.nodes().iter().map(|n| (n.id.clone(), n.label.clone())).collect();
    let mut links = Vec::new();
    let mut warnings = Vec::new();
    for (a, b) in p.edge_indices() {
        let rel = match (is_process(a), is_process(b)) {
            (false, true) => Relation::ProvidesInput,
            (true, false) => Relation::HasOutput,
            (true, true) => Relation::Throughput,
            (false, false) => {
                warnings.push(Diagnostic::warning(
                    Default::default(),
                    format!(
                        "edge {} -> {} joins two non-process nodes; emitted as connectedTo",
                        p.node(a).id,
                        p.node(b).id
                    ),
                ));
                Relation::ConnectedTo
            }
        };
        links.push((rel, p.node(a).id.clone(), p.node(b).id.clone()));
    }
    AboxTriples {
        memberships,
        links,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::build_pattern;
    use crate::taxonomy::default_taxonomy_shared;

    fn pattern(nodes: &[(&str, &str)], edges: &[(&str, &str)]) -> Pattern {
        let t = default_taxonomy_shared();
        let nodes: Vec<_> = nodes.iter().map(|(i, c)| (NodeId::new(*i), t.lookup(c).unwrap().clone())).collect();
        let edges: Vec<_> = edges.iter().map(|(a, b)| (NodeId::new(*a), NodeId::new(*b))).collect();
        build_pattern("p", t, nodes, edges).unwrap()
    }

    #[test]
    fn throughput_and_connected() {
        let p = pattern(&[("d1", "Deduction"), ("d2", "Deduction")], &[("d1", "d2")]);
        let a = emit_abox(&p);
        assert_eq!(a.links[0].0, Relation::Throughput);
        assert!(a.warnings.is_empty());
        let p = pattern(&[("s", "Symbol"), ("d", "Data")], &[("s", "d")]);
        let a = emit_abox(&p);
        assert_eq!(a.links[0].0, Relation::ConnectedTo);
        assert_eq!(a.warnings.len(), 1);
        assert_eq!(a.to_text(), "s : Symbol\nconnectedTo(s,d)\nd : Data\n");
    }
}
