//! Refinements: label-decreasing graph homomorphisms between patterns.
//!
//! A map `φ: P1 -> P2` is a refinement when it is total on the nodes of
//! `P1`, sends every edge of `P1` to an edge of `P2`, and satisfies
//! `lab(φ(n)) <= lab(n)` for every node. Maps need not be injective.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::pattern::{NodeId, Pattern};
use crate::taxonomy::ClassRef;

/// Total or partial assignment of source node ids to target node ids.
pub type NodeMap = BTreeMap<NodeId, NodeId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingImage(NodeId),
    UnknownSource(NodeId),
    UnknownImage { node: NodeId, image: NodeId },
    MissingEdge { from: NodeId, to: NodeId, image_from: NodeId, image_to: NodeId },
    Label { node: NodeId, label: ClassRef, image: NodeId, image_label: ClassRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingImage(n) => write!(f, "node `{n}` has no image"),
            Violation::UnknownSource(n) => write!(f, "`{n}` is not a node of the source pattern"),
            Violation::UnknownImage { node, image } => {
                write!(f, "`{node}` is mapped to `{image}`, which is not a node of the target pattern")
            }
            Violation::MissingEdge { from, to, image_from, image_to } => write!(
                f,
                "edge `{from}` -> `{to}` maps to `{image_from}` -> `{image_to}`, which is not an edge"
            ),
            Violation::Label { node, label, image, image_label } => write!(
                f,
                "`{node}` : {label} is mapped to `{image}` : {image_label}, but {image_label} is not a subclass of {label}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefinementError {
    #[error("patterns `{source_name}` and `{target}` are written over different ontologies")]
    TaxonomyMismatch { source_name: String, target: String },
    #[error("refinement `{name}` is invalid: {}", join_violations(.violations))]
    Invalid { name: String, violations: Vec<Violation> },
    #[error("no refinement from `{source_name}` to `{target}` exists")]
    NoRefinement { source_name: String, target: String },
    #[error(
        "refinement from `{source_name}` to `{target}` is ambiguous; candidates {} and {}",
        render_map(&.witnesses[0]), render_map(&.witnesses[1])
    )]
    Ambiguous { source_name: String, target: String, witnesses: [NodeMap; 2] },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// `{a |-> b, c |-> d}`
pub fn render_map(map: &NodeMap) -> String {
    let body: Vec<String> = map.iter().map(|(k, v)| format!("{k} |-> {v}")).collect();
    format!("{{{}}}", body.join(", "))
}

/// A named, validated refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    name: String,
    source: Arc<Pattern>,
    target: Arc<Pattern>,
    node_map: NodeMap,
    /// Target node index for each source node index.
    images: Vec<usize>,
}

impl Refinement {
    /// Validates `map` and wraps it as a refinement.
    pub fn new(
        name: impl Into<String>,
        source: Arc<Pattern>,
        target: Arc<Pattern>,
        map: NodeMap,
    ) -> Result<Self, RefinementError> {
        let name = name.into();
        let violations = check_refinement(&source, &target, &map)?;
        if !violations.is_empty() {
            return Err(RefinementError::Invalid { name, violations });
        }
        let images = source
            .nodes()
            .iter()
            .map(|n| target.index_of(&map[&n.id]).expect("checked"))
            .collect();
        Ok(Refinement {
            name,
            source,
            target,
            node_map: map,
            images,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Pattern> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Pattern> {
        &self.target
    }

    pub fn node_map(&self) -> &NodeMap {
        &self.node_map
    }

    /// Image index of source node `i`.
    pub fn image_idx(&self, i: usize) -> usize {
        self.images[i]
    }
}

fn ensure_shared_ontology(src: &Pattern, tgt: &Pattern) -> Result<(), RefinementError> {
    if src.taxonomy().same_classes(tgt.taxonomy()) {
        Ok(())
    } else {
        Err(RefinementError::TaxonomyMismatch {
            source_name: src.name().to_string(),
            target: tgt.name().to_string(),
        })
    }
}

/// Lists every way `map` fails to be a refinement from `src` to `tgt`; an
/// empty list means the map is a refinement.
pub fn check_refinement(src: &Pattern, tgt: &Pattern, map: &NodeMap) -> Result<Vec<Violation>, RefinementError> {
    ensure_shared_ontology(src, tgt)?;
    let tax = src.taxonomy();
    let mut out = Vec::new();
    for key in map.keys() {
        if src.index_of(key).is_none() {
            out.push(Violation::UnknownSource(key.clone()));
        }
    }
    let mut images = vec![None; src.node_count()];
    for (i, node) in src.nodes().iter().enumerate() {
        let Some(image) = map.get(&node.id) else {
            out.push(Violation::MissingImage(node.id.clone()));
            continue;
        };
        let Some(j) = tgt.index_of(image) else {
            out.push(Violation::UnknownImage { node: node.id.clone(), image: image.clone() });
            continue;
        };
        images[i] = Some(j);
        let image_label = &tgt.node(j).label;
        if !tax.leq(image_label, &node.label).unwrap_or(false) {
            out.push(Violation::Label {
                node: node.id.clone(),
                label: node.label.clone(),
                image: image.clone(),
                image_label: image_label.clone(),
            });
        }
    }
    for (a, b) in src.edge_indices() {
        if let (Some(ia), Some(ib)) = (images[a], images[b]) {
            if !tgt.has_edge_idx(ia, ib) {
                out.push(Violation::MissingEdge {
                    from: src.node(a).id.clone(),
                    to: src.node(b).id.clone(),
                    image_from: tgt.node(ia).id.clone(),
                    image_to: tgt.node(ib).id.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Backtracking state shared by all branches of one search.
struct Search {
    /// Source nodes in search order: decreasing degree, then declaration order.
    order: Vec<usize>,
    /// Label-compatible target nodes per source node, ascending.
    candidates: Vec<Vec<usize>>,
    /// For search position k: (earlier source node u, true if edge order[k] -> u,
    /// false if u -> order[k]).
    constraints: Vec<Vec<(usize, bool)>>,
    tgt_n: usize,
    tgt_adj: Vec<bool>,
}

impl Search {
    fn new(src: &Pattern, tgt: &Pattern) -> Self {
        let tax = src.taxonomy();
        let degrees = src.degrees();
        let mut order: Vec<usize> = (0..src.node_count()).collect();
        order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
        let mut position = vec![0; src.node_count()];
        for (k, &s) in order.iter().enumerate() {
            position[s] = k;
        }

        // Target labels expressed in the source taxonomy; the class sets agree.
        let tgt_labels: Vec<_> = tgt.nodes().iter().map(|n| tax.id(&n.label)).collect();
        let candidates = (0..src.node_count())
            .map(|s| {
                let label = src.label_id(s);
                (0..tgt.node_count())
                    .filter(|&t| tgt_labels[t].is_some_and(|tl| tax.leq_id(tl, label)))
                    .collect()
            })
            .collect();

        let mut constraints = vec![Vec::new(); src.node_count()];
        for (a, b) in src.edge_indices() {
            if position[a] > position[b] {
                constraints[position[a]].push((b, true));
            } else {
                constraints[position[b]].push((a, false));
            }
        }

        let n = tgt.node_count();
        let mut tgt_adj = vec![false; n * n];
        for (a, b) in tgt.edge_indices() {
            tgt_adj[a * n + b] = true;
        }
        Search {
            order,
            candidates,
            constraints,
            tgt_n: n,
            tgt_adj,
        }
    }

    fn fits(&self, k: usize, t: usize, assign: &[usize]) -> bool {
        self.constraints[k].iter().all(|&(u, outgoing)| {
            let tu = assign[u];
            if outgoing {
                self.tgt_adj[t * self.tgt_n + tu]
            } else {
                self.tgt_adj[tu * self.tgt_n + t]
            }
        })
    }

    fn run(&self, k: usize, assign: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if k == self.order.len() {
            out.push(assign.clone());
            return;
        }
        let s = self.order[k];
        for &t in &self.candidates[s] {
            if self.fits(k, t, assign) {
                assign[s] = t;
                self.run(k + 1, assign, out, limit);
                if out.len() >= limit {
                    return;
                }
            }
        }
        assign[s] = usize::MAX;
    }

    #[cfg(feature = "parallel")]
    fn branch(&self, first: usize, limit: usize) -> Vec<Vec<usize>> {
        let mut assign = vec![usize::MAX; self.order.len()];
        assign[self.order[0]] = first;
        let mut out = Vec::new();
        self.run(1, &mut assign, &mut out, limit);
        out
    }
}

fn to_node_map(src: &Pattern, tgt: &Pattern, images: &[usize]) -> NodeMap {
    images
        .iter()
        .enumerate()
        .map(|(s, &t)| (src.node(s).id.clone(), tgt.node(t).id.clone()))
        .collect()
}

/// Enumerates up to `limit` refinements from `src` to `tgt`.
///
/// Results come out in the search's lexicographic order: source nodes are
/// visited by decreasing degree (ties by declaration order) and candidates
/// by ascending target declaration order. With the `parallel` feature the
/// first-level branches are explored concurrently; the output is identical.
pub fn find_homomorphisms(src: &Pattern, tgt: &Pattern, limit: usize) -> Vec<NodeMap> {
    #[cfg(feature = "parallel")]
    {
        find_homomorphisms_par(src, tgt, limit)
    }
    #[cfg(not(feature = "parallel"))]
    {
        find_homomorphisms_seq(src, tgt, limit)
    }
}

/// Single-threaded [`find_homomorphisms`].
pub fn find_homomorphisms_seq(src: &Pattern, tgt: &Pattern, limit: usize) -> Vec<NodeMap> {
    if limit == 0 || !src.taxonomy().same_classes(tgt.taxonomy()) {
        return Vec::new();
    }
    let search = Search::new(src, tgt);
    let mut out = Vec::new();
    let mut assign = vec![usize::MAX; src.node_count()];
    search.run(0, &mut assign, &mut out, limit);
    out.iter().map(|m| to_node_map(src, tgt, m)).collect()
}

/// Below this many first-level candidates the parallel search falls back to
/// the sequential one.
#[cfg(feature = "parallel")]
const PAR_MIN_BRANCHES: usize = 4;

/// [`find_homomorphisms`] with the first search level split across rayon.
#[cfg(feature = "parallel")]
pub fn find_homomorphisms_par(src: &Pattern, tgt: &Pattern, limit: usize) -> Vec<NodeMap> {
    use rayon::prelude::*;

    if limit == 0 || !src.taxonomy().same_classes(tgt.taxonomy()) {
        return Vec::new();
    }
    let search = Search::new(src, tgt);
    let Some(&first) = search.order.first() else {
        return find_homomorphisms_seq(src, tgt, limit);
    };
    let firsts = &search.candidates[first];
    if firsts.len() < PAR_MIN_BRANCHES {
        return find_homomorphisms_seq(src, tgt, limit);
    }
    let branches: Vec<Vec<Vec<usize>>> = firsts
        .par_iter()
        .map(|&t| search.branch(t, limit))
        .collect();
    branches
        .into_iter()
        .flatten()
        .take(limit)
        .map(|m| to_node_map(src, tgt, &m))
        .collect()
}

/// Infers the unique refinement from `src` to `tgt`.
pub fn infer_refinement(
    name: impl Into<String>,
    src: Arc<Pattern>,
    tgt: Arc<Pattern>,
) -> Result<Refinement, RefinementError> {
    ensure_shared_ontology(&src, &tgt)?;
    let mut found = find_homomorphisms(&src, &tgt, 2);
    match found.len() {
        0 => Err(RefinementError::NoRefinement {
            source_name: src.name().to_string(),
            target: tgt.name().to_string(),
        }),
        1 => Refinement::new(name, src, tgt, found.pop().unwrap()),
        _ => {
            let second = found.pop().unwrap();
            let first = found.pop().unwrap();
            Err(RefinementError::Ambiguous {
                source_name: src.name().to_string(),
                target: tgt.name().to_string(),
                witnesses: [first, second],
            })
        }
    }
}

/// Identity refinement of a pattern onto itself.
pub fn identity(pattern: &Arc<Pattern>) -> Refinement {
    let map = pattern.nodes().iter().map(|n| (n.id.clone(), n.id.clone())).collect();
    Refinement::new(format!("id_{}", pattern.name()), pattern.clone(), pattern.clone(), map)
        .expect("identity is a refinement")
}
