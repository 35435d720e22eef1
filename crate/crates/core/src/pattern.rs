//! Patterns: simple directed graphs whose nodes carry ontology classes.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::taxonomy::{ClassId, ClassRef, Taxonomy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("edge from `{0}` to itself; patterns are simple graphs")]
    SelfLoop(NodeId),
    #[error("class `{0}` is not part of the pattern's ontology")]
    UnknownLabel(String),
    #[error("node `{0}` is declared twice with different classes")]
    DuplicateNode(NodeId),
    #[error("edge endpoint `{0}` is not a declared node")]
    UnknownNode(NodeId),
}

/// Node identifier, unique within one pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_string())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNode {
    pub id: NodeId,
    pub label: ClassRef,
}

/// A simple directed graph with class-labeled nodes.
///
/// Nodes keep their declaration order; edges are stored as a set of node
/// index pairs.
#[derive(Debug, Clone)]
pub struct Pattern {
    name: String,
    taxonomy: Arc<Taxonomy>,
    nodes: Vec<PatternNode>,
    labels: Vec<ClassId>,
    index: HashMap<NodeId, usize>,
    edges: BTreeSet<(usize, usize)>,
}

pub fn build_pattern<N, E>(
    name: impl Into<String>,
    taxonomy: Arc<Taxonomy>,
    node_decls: N,
    edge_decls: E,
) -> Result<Pattern, PatternError>
where
    N: IntoIterator<Item = (NodeId, ClassRef)>,
    E: IntoIterator<Item = (NodeId, NodeId)>,
{
    let mut nodes: Vec<PatternNode> = Vec::new();
    let mut labels = Vec::new();
    let mut index: HashMap<NodeId, usize> = HashMap::new();
    for (id, label) in node_decls {
        let class = taxonomy
            .id(&label)
            .ok_or_else(|| PatternError::UnknownLabel(label.local_name().to_string()))?;
        match index.get(&id) {
            Some(&i) if nodes[i].label == label => {}
            Some(_) => return Err(PatternError::DuplicateNode(id)),
            None => {
                index.insert(id.clone(), nodes.len());
                nodes.push(PatternNode { id, label });
                labels.push(class);
            }
        }
    }
    let mut edges = BTreeSet::new();
    for (a, b) in edge_decls {
        let ia = *index.get(&a).ok_or_else(|| PatternError::UnknownNode(a.clone()))?;
        let ib = *index.get(&b).ok_or_else(|| PatternError::UnknownNode(b.clone()))?;
        if ia == ib {
            return Err(PatternError::SelfLoop(a));
        }
        edges.insert((ia, ib));
    }
    Ok(Pattern {
        name: name.into(),
        taxonomy,
        nodes,
        labels,
        index,
        edges,
    })
}

impl Pattern {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn taxonomy(&self) -> &Arc<Taxonomy> {
        &self.taxonomy
    }

    pub fn nodes(&self) -> &[PatternNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, i: usize) -> &PatternNode {
        &self.nodes[i]
    }

    pub fn index_of(&self, id: &NodeId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn label(&self, id: &NodeId) -> Option<&ClassRef> {
        self.index_of(id).map(|i| &self.nodes[i].label)
    }

    pub fn label_id(&self, i: usize) -> ClassId {
        self.labels[i]
    }

    /// Edges as node-index pairs, ordered by source then target index.
    pub fn edge_indices(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> + '_ {
        self.edges.iter().map(|&(a, b)| (&self.nodes[a].id, &self.nodes[b].id))
    }

    pub fn has_edge_idx(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn has_edge(&self, a: &NodeId, b: &NodeId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(a), Some(b)) => self.has_edge_idx(a, b),
            _ => false,
        }
    }

    /// Distinct neighbours (in or out) of each node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut nbrs = vec![BTreeSet::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            nbrs[a].insert(b);
            nbrs[b].insert(a);
        }
        nbrs.into_iter().map(|s| s.len()).collect()
    }

    pub(crate) fn in_out_degrees(&self) -> Vec<(usize, usize)> {
        let mut d = vec![(0, 0); self.nodes.len()];
        for &(a, b) in &self.edges {
            d[a].1 += 1;
            d[b].0 += 1;
        }
        d
    }
}

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.taxonomy.same_classes(&other.taxonomy)
    }
}

/// Label- and edge-preserving bijection test; node ids are ignored.
pub fn isomorphic(p: &Pattern, q: &Pattern) -> bool {
    if p.node_count() != q.node_count() || p.edge_count() != q.edge_count() {
        return false;
    }
    let mut pl: Vec<&ClassRef> = p.nodes.iter().map(|n| &n.label).collect();
    let mut ql: Vec<&ClassRef> = q.nodes.iter().map(|n| &n.label).collect();
    pl.sort();
    ql.sort();
    if pl != ql {
        return false;
    }
    let pd = p.in_out_degrees();
    let qd = q.in_out_degrees();
    let mut map = vec![usize::MAX; p.node_count()];
    let mut used = vec![false; q.node_count()];
    extend_iso(p, q, &pd, &qd, 0, &mut map, &mut used)
}

fn extend_iso(
    p: &Pattern,
    q: &Pattern,
    pd: &[(usize, usize)],
    qd: &[(usize, usize)],
    next: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if next == p.node_count() {
        return true;
    }
    for cand in 0..q.node_count() {
        if used[cand] || q.nodes[cand].label != p.nodes[next].label || qd[cand] != pd[next] {
            continue;
        }
        let consistent = (0..next).all(|prev| {
            p.has_edge_idx(prev, next) == q.has_edge_idx(map[prev], cand)
                && p.has_edge_idx(next, prev) == q.has_edge_idx(cand, map[prev])
        });
        if !consistent {
            continue;
        }
        map[next] = cand;
        used[cand] = true;
        if extend_iso(p, q, pd, qd, next + 1, map, used) {
            return true;
        }
        used[cand] = false;
    }
    map[next] = usize::MAX;
    false
}
