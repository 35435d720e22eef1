//! Combination of a network as a colimit.
//!
//! The node set of the result is the disjoint union of all member node sets
//! quotiented by the equivalence generated by `n ~ φ(n)` for every
//! refinement `φ` of the network. Each equivalence class is labeled with the
//! infimum of its members' labels; when some infimum does not exist the
//! combination is undefined.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::dsl::Library;
use crate::network::Network;
use crate::pattern::{build_pattern, NodeId, Pattern, PatternError};
use crate::refinement::NodeMap;
use crate::taxonomy::ClassRef;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error(
        "colimit is undefined: node `{node}` merges classes {} which have no infimum",
        render_labels(.labels)
    )]
    UndefinedColimit { node: String, members: Vec<String>, labels: Vec<ClassRef> },
    #[error("combination merges both ends of edge `{from}` -> `{to}` into node `{node}`, creating a self-loop")]
    DegenerateLoop { node: String, from: String, to: String },
    #[error("combine definitions depend on each other cyclically: {}", .0.join(" -> "))]
    CyclicCombine(Vec<String>),
    #[error("unknown network `{0}`")]
    UnknownNetwork(String),
    #[error("in `{pattern}`: {source}")]
    InPattern {
        pattern: String,
        #[source]
        source: Box<CombineError>,
    },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

fn render_labels(labels: &[ClassRef]) -> String {
    let names: Vec<&str> = labels.iter().map(|l| l.local_name()).collect();
    match names.as_slice() {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// Disjoint-set forest with union by rank and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(len: usize) -> Self {
        UnionFind {
            parent: (0..len).collect(),
            rank: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

/// The colimit pattern with its injections and preimage classes.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationResult {
    pub pattern: Pattern,
    /// `μ_i` for every member pattern, keyed by pattern name.
    pub injections: BTreeMap<String, NodeMap>,
    /// Members `(pattern, node)` of every result node.
    pub classes: BTreeMap<NodeId, Vec<(String, NodeId)>>,
}

/// Computes the combination of `net`. The result pattern is named after
/// the network.
pub fn combine(net: &Network) -> Result<CombinationResult, CombineError> {
    let patterns = net.patterns();
    let tax = patterns[0].taxonomy().clone();
    let mut offsets = Vec::with_capacity(patterns.len());
    let mut total = 0;
    for p in patterns {
        offsets.push(total);
        total += p.node_count();
    }
    // arena slot -> (pattern index, node index)
    let slots: Vec<(usize, usize)> = patterns
        .iter()
        .enumerate()
        .flat_map(|(i, p)| (0..p.node_count()).map(move |n| (i, n)))
        .collect();

    let mut uf = UnionFind::new(total);
    for edge in net.edges() {
        let r = &edge.refinement;
        for n in 0..r.source().node_count() {
            uf.union(offsets[edge.source] + n, offsets[edge.target] + r.image_idx(n));
        }
    }

    let qualified = |slot: usize| {
        let (i, n) = slots[slot];
        format!("{}.{}", patterns[i].name(), patterns[i].node(n).id)
    };

    let mut members_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for slot in 0..total {
        members_of.entry(uf.find(slot)).or_default().push(slot);
    }
    // classes ordered by their least qualified member name
    let mut classes: Vec<(String, Vec<usize>)> = members_of
        .into_values()
        .map(|mut members| {
            members.sort_by_key(|&s| qualified(s));
            (qualified(members[0]), members)
        })
        .collect();
    classes.sort();

    let mut class_of = vec![0; total];
    let mut used = HashSet::new();
    let mut node_decls = Vec::with_capacity(classes.len());
    let mut preimages = BTreeMap::new();
    for (c, (least, members)) in classes.iter().enumerate() {
        let mut id = least.clone();
        let mut suffix = 2;
        while !used.insert(id.clone()) {
            id = format!("{least}_{suffix}");
            suffix += 1;
        }
        let label_ids: Vec<_> = members
            .iter()
            .map(|&s| {
                let (i, n) = slots[s];
                tax.id(&patterns[i].node(n).label).expect("shared ontology")
            })
            .collect();
        let Some(label) = tax.infimum_ids(&label_ids) else {
            // report only the most specific labels; the others are implied
            let distinct: BTreeSet<_> = label_ids.iter().copied().collect();
            let mut labels: Vec<ClassRef> = distinct
                .iter()
                .filter(|&&l| !distinct.iter().any(|&m| m != l && tax.leq_id(m, l)))
                .map(|&l| tax.class(l).clone())
                .collect();
            labels.sort_by(|a, b| a.local_name().cmp(b.local_name()));
            return Err(CombineError::UndefinedColimit {
                node: id,
                members: members.iter().map(|&s| qualified(s)).collect(),
                labels,
            });
        };
        for &s in members {
            class_of[s] = c;
        }
        let node = NodeId::new(id);
        preimages.insert(
            node.clone(),
            members
                .iter()
                .map(|&s| {
                    let (i, n) = slots[s];
                    (patterns[i].name().to_string(), patterns[i].node(n).id.clone())
                })
                .collect(),
        );
        node_decls.push((node, tax.class(label).clone()));
    }

    let mut edges = BTreeSet::new();
    for (i, p) in patterns.iter().enumerate() {
        for (a, b) in p.edge_indices() {
            let (ca, cb) = (class_of[offsets[i] + a], class_of[offsets[i] + b]);
            if ca == cb {
                return Err(CombineError::DegenerateLoop {
                    node: node_decls[ca].0.to_string(),
                    from: qualified(offsets[i] + a),
                    to: qualified(offsets[i] + b),
                });
            }
            edges.insert((ca, cb));
        }
    }
    let edge_decls: Vec<_> = edges
        .into_iter()
        .map(|(a, b)| (node_decls[a].0.clone(), node_decls[b].0.clone()))
        .collect();

    let injections = patterns
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let map = p
                .nodes()
                .iter()
                .enumerate()
                .map(|(n, node)| (node.id.clone(), node_decls[class_of[offsets[i] + n]].0.clone()))
                .collect();
            (p.name().to_string(), map)
        })
        .collect();

    let pattern = build_pattern(net.name(), tax.clone(), node_decls, edge_decls)?;
    Ok(CombinationResult {
        pattern,
        injections,
        classes: preimages,
    })
}

/// Combination for a combine-defined pattern, named after that pattern.
pub fn combine_named(lib: &Library, pattern: &str) -> Result<CombinationResult, CombineError> {
    let in_pattern = |e: CombineError| CombineError::InPattern {
        pattern: pattern.to_string(),
        source: Box::new(e),
    };
    let network = lib
        .combine_defs
        .get(pattern)
        .ok_or_else(|| CombineError::UnknownNetwork(pattern.to_string()))?;
    let net = lib
        .networks
        .get(network)
        .ok_or_else(|| in_pattern(CombineError::UnknownNetwork(network.clone())))?;
    let mut result = combine(net).map_err(in_pattern)?;
    result.pattern = result.pattern.with_name(pattern);
    Ok(result)
}

/// Computes a combine-defined pattern and stores it in `lib`.
pub fn materialize(lib: &mut Library, pattern: &str) -> Result<Arc<Pattern>, CombineError> {
    if let Some(p) = lib.patterns.get(pattern) {
        return Ok(p.clone());
    }
    let result = Arc::new(combine_named(lib, pattern)?.pattern);
    lib.patterns.insert(pattern.to_string(), result.clone());
    Ok(result)
}

/// Materializes every combine-defined pattern in dependency order.
pub fn evaluate_combines(lib: &Library) -> Result<Library, CombineError> {
    let deps: BTreeMap<&str, Vec<&str>> = lib
        .combine_defs
        .iter()
        .map(|(pattern, network)| {
            let members = lib
                .networks
                .get(network)
                .map(|n| {
                    n.patterns()
                        .iter()
                        .map(|p| p.name())
                        .filter(|m| lib.combine_defs.contains_key(*m))
                        .collect()
                })
                .unwrap_or_default();
            (pattern.as_str(), members)
        })
        .collect();

    let mut order = Vec::new();
    let mut state: BTreeMap<&str, bool> = BTreeMap::new(); // false = on stack, true = done
    for &start in deps.keys() {
        visit(start, &deps, &mut state, &mut Vec::new(), &mut order)?;
    }

    let mut out = lib.clone();
    for name in order {
        materialize(&mut out, name)?;
    }
    Ok(out)
}

fn visit<'a>(
    node: &'a str,
    deps: &BTreeMap<&'a str, Vec<&'a str>>,
    state: &mut BTreeMap<&'a str, bool>,
    stack: &mut Vec<&'a str>,
    order: &mut Vec<&'a str>,
) -> Result<(), CombineError> {
    match state.get(node) {
        Some(true) => return Ok(()),
        Some(false) => {
            let start = stack.iter().position(|&s| s == node).unwrap_or(0);
            let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
            cycle.push(node.to_string());
            return Err(CombineError::CyclicCombine(cycle));
        }
        None => {}
    }
    state.insert(node, false);
    stack.push(node);
    for &d in deps.get(node).map(Vec::as_slice).unwrap_or_default() {
        visit(d, deps, state, stack, order)?;
    }
    stack.pop();
    state.insert(node, true);
    order.push(node);
    Ok(())
}
