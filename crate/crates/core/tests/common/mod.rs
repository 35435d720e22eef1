//! Random generators and brute-force oracles shared by the integration tests.
//!
//! The oracles only use the generator's own description of the data (parent
//! lists, node lists, edge lists), never the library's closures or search.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;
use std::sync::Arc;

use nesy_core::network::Network;
use nesy_core::pattern::{build_pattern, NodeId, Pattern};
use nesy_core::refinement::{NodeMap, Refinement};
use nesy_core::taxonomy::{ClassRef, Taxonomy, TOP_NAME};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name)).expect("corpus file")
}

/// A generated taxonomy with its defining parent lists.
/// Index 0 is top; `parents[i]` holds direct superclasses of class `i`.
pub struct GenTaxonomy {
    pub taxonomy: Arc<Taxonomy>,
    pub names: Vec<String>,
    pub parents: Vec<Vec<usize>>,
}

impl GenTaxonomy {
    pub fn class(&self, i: usize) -> ClassRef {
        if i == 0 {
            self.taxonomy.top().clone()
        } else {
            self.taxonomy.lookup(&self.names[i]).expect("generated class").clone()
        }
    }

    pub fn index(&self, c: &ClassRef) -> usize {
        if c == self.taxonomy.top() {
            0
        } else {
            self.names.iter().position(|n| n == c.local_name()).expect("generated class")
        }
    }

    /// Reflexive-transitive reachability along parent links (BFS).
    pub fn leq(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.names.len()];
        let mut queue = VecDeque::from([a]);
        while let Some(c) = queue.pop_front() {
            if c == b {
                return true;
            }
            if std::mem::replace(&mut seen[c], true) {
                continue;
            }
            queue.extend(self.parents[c].iter().copied());
        }
        false
    }

    /// Greatest common lower bound by scanning all classes.
    pub fn glb(&self, classes: &[usize]) -> Option<usize> {
        let n = self.names.len();
        let lower: Vec<usize> = (0..n).filter(|&c| classes.iter().all(|&x| self.leq(c, x))).collect();
        lower.iter().copied().find(|&g| lower.iter().all(|&l| self.leq(l, g)))
    }
}

/// Random DAG of `1..=max_classes` classes (top included). Each class has
/// up to three parents drawn from classes created before it.
pub fn random_taxonomy(rng: &mut impl Rng, max_classes: usize) -> GenTaxonomy {
    let n = rng.random_range(1..=max_classes);
    let mut names = vec![TOP_NAME.to_string()];
    let mut parents = vec![Vec::new()];
    let mut b = Taxonomy::builder("urn:gen#");
    for i in 1..n {
        let name = format!("K{i}");
        let k = rng.random_range(1..=3.min(i));
        let mut ps: Vec<usize> = (0..k).map(|_| rng.random_range(0..i)).collect();
        ps.sort();
        ps.dedup();
        let supers: Vec<&str> = ps.iter().map(|&p| names[p].as_str()).collect();
        b.class(&name, &supers).unwrap();
        names.push(name);
        parents.push(ps);
    }
    GenTaxonomy {
        taxonomy: Arc::new(b.build().unwrap()),
        names,
        parents,
    }
}

/// Description of a generated pattern: labels by class index, edges by node index.
#[derive(Debug, Clone)]
pub struct GenPattern {
    pub labels: Vec<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl GenPattern {
    pub fn build(&self, gt: &GenTaxonomy, name: &str) -> Pattern {
        build_pattern(
            name,
            gt.taxonomy.clone(),
            self.labels.iter().enumerate().map(|(i, &l)| (node(i), gt.class(l))),
            self.edges.iter().map(|&(a, b)| (node(a), node(b))),
        )
        .unwrap()
    }
}

pub fn node(i: usize) -> NodeId {
    NodeId::new(format!("n{i}"))
}

pub fn random_gen_pattern(rng: &mut impl Rng, gt: &GenTaxonomy, nodes: usize, density: f64) -> GenPattern {
    let labels = (0..nodes).map(|_| rng.random_range(0..gt.names.len())).collect();
    let mut edges = BTreeSet::new();
    for a in 0..nodes {
        for b in 0..nodes {
            if a != b && rng.random_bool(density) {
                edges.insert((a, b));
            }
        }
    }
    GenPattern { labels, edges }
}

/// All total maps src -> tgt that preserve edges and decrease labels,
/// found by enumerating every one of the |tgt|^|src| maps.
pub fn brute_homomorphisms(gt: &GenTaxonomy, src: &GenPattern, tgt: &GenPattern) -> BTreeSet<Vec<usize>> {
    let (n, m) = (src.labels.len(), tgt.labels.len());
    let mut out = BTreeSet::new();
    if m == 0 {
        if n == 0 {
            out.insert(Vec::new());
        }
        return out;
    }
    let total = m.pow(n as u32);
    for code in 0..total {
        let mut map = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            map.push(c % m);
            c /= m;
        }
        let labels_ok = (0..n).all(|i| gt.leq(tgt.labels[map[i]], src.labels[i]));
        let edges_ok = src.edges.iter().all(|&(a, b)| tgt.edges.contains(&(map[a], map[b])));
        if labels_ok && edges_ok {
            out.insert(map);
        }
    }
    out
}

/// Converts a node map over `n{i}` ids to an index vector.
pub fn map_indices(map: &NodeMap, n: usize) -> Vec<usize> {
    (0..n)
        .map(|i| {
            let img = map[&node(i)].as_str();
            img[1..].parse().unwrap()
        })
        .collect()
}

/// Isomorphism by trying every bijection; only for small patterns.
pub fn brute_isomorphic(p: &Pattern, q: &Pattern) -> bool {
    let n = p.node_count();
    if n != q.node_count() || p.edge_count() != q.edge_count() {
        return false;
    }
    let pe: BTreeSet<(usize, usize)> = p.edge_indices().collect();
    let qe: BTreeSet<(usize, usize)> = q.edge_indices().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = (0..n).all(|i| p.node(i).label == q.node(perm[i]).label)
            && pe.iter().all(|&(a, b)| qe.contains(&(perm[a], perm[b])));
        if ok {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// A generated network together with its raw description.
pub struct GenNetwork {
    pub gt: GenTaxonomy,
    pub patterns: Vec<Arc<Pattern>>,
    /// (source pattern, target pattern, image of each source node)
    pub refinements: Vec<(usize, usize, Vec<usize>)>,
    pub network: Network,
}

/// Random type-correct network: refinements are created by picking a target
/// pattern and deriving a source whose nodes map into it with weaker labels
/// and only image-preserved edges. Sizes stay within `max_patterns`,
/// `max_nodes` (total) and `max_refinements`.
pub fn random_network(
    rng: &mut impl Rng,
    max_classes: usize,
    max_patterns: usize,
    max_nodes: usize,
    max_refinements: usize,
) -> GenNetwork {
    let gt = random_taxonomy(rng, max_classes);
    let count = rng.random_range(1..=max_patterns);
    let mut budget = max_nodes;
    let mut gens: Vec<GenPattern> = Vec::new();
    let mut refs: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..count {
        let remaining = count - i - 1;
        let cap = (budget - remaining).clamp(1, 5);
        let size = rng.random_range(1..=cap);
        let derive = i > 0 && refs.len() < max_refinements && rng.random_bool(0.75);
        if derive {
            let t = rng.random_range(0..i);
            let (p, map) = derive_source(rng, &gt, &gens[t], size);
            refs.push((i, t, map));
            gens.push(p);
        } else {
            gens.push(random_gen_pattern(rng, &gt, size, 0.3));
        }
        budget -= size;
    }
    // extra refinements between existing patterns, found by brute force
    for _ in 0..rng.random_range(0..=2) {
        if refs.len() >= max_refinements || gens.len() < 2 {
            break;
        }
        let s = rng.random_range(0..gens.len());
        let t = rng.random_range(0..gens.len());
        let maps: Vec<Vec<usize>> = brute_homomorphisms(&gt, &gens[s], &gens[t]).into_iter().collect();
        if let Some(map) = maps.choose(rng) {
            refs.push((s, t, map.clone()));
        }
    }

    let patterns: Vec<Arc<Pattern>> = gens
        .iter()
        .enumerate()
        .map(|(i, g)| Arc::new(g.build(&gt, &format!("P{i}"))))
        .collect();
    let refinements: Vec<Arc<Refinement>> = refs
        .iter()
        .enumerate()
        .map(|(k, (s, t, map))| {
            let node_map: NodeMap = map.iter().enumerate().map(|(a, &b)| (node(a), node(b))).collect();
            Arc::new(Refinement::new(format!("R{k}"), patterns[*s].clone(), patterns[*t].clone(), node_map).unwrap())
        })
        .collect();
    let network = Network::new("N", patterns.clone(), refinements).unwrap();
    GenNetwork {
        gt,
        patterns,
        refinements: refs,
        network,
    }
}

fn derive_source(rng: &mut impl Rng, gt: &GenTaxonomy, target: &GenPattern, size: usize) -> (GenPattern, Vec<usize>) {
    let m = target.labels.len();
    let map: Vec<usize> = (0..size).map(|_| rng.random_range(0..m)).collect();
    let labels = map
        .iter()
        .map(|&t| {
            let below = target.labels[t];
            let ups: Vec<usize> = (0..gt.names.len()).filter(|&c| gt.leq(below, c)).collect();
            *ups.choose(rng).unwrap()
        })
        .collect();
    let mut edges = BTreeSet::new();
    for a in 0..size {
        for b in 0..size {
            if a != b && target.edges.contains(&(map[a], map[b])) && rng.random_bool(0.7) {
                edges.insert((a, b));
            }
        }
    }
    (GenPattern { labels, edges }, map)
}

/// Connected components of the relation `(i, n) ~ (j, φ(n))`, computed by
/// BFS over an explicit adjacency list. Keys are (pattern, node) slots.
pub fn gluing_classes(gn: &GenNetwork) -> Vec<BTreeSet<(usize, usize)>> {
    let mut adj: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for (i, p) in gn.patterns.iter().enumerate() {
        for n in 0..p.node_count() {
            adj.entry((i, n)).or_default();
        }
    }
    for (s, t, map) in &gn.refinements {
        for (a, &b) in map.iter().enumerate() {
            adj.get_mut(&(*s, a)).unwrap().push((*t, b));
            adj.get_mut(&(*t, b)).unwrap().push((*s, a));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut class = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x) {
                continue;
            }
            class.insert(x);
            queue.extend(adj[&x].iter().copied());
        }
        out.push(class);
    }
    out
}

/// parse + resolve against the builtin catalog, then evaluate combines.
pub fn load(text: &str) -> Result<nesy_core::Library, String> {
    let doc = nesy_core::parse(text).map_err(|e| format!("{}: {e}", e.pos))?;
    let resolved = nesy_core::resolve(&doc, &nesy_core::Catalog::builtin())
        .map_err(|es| es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))?;
    nesy_core::evaluate_combines(&resolved.library).map_err(|e| e.to_string())
}

/// parse + resolve only; combine definitions stay unevaluated.
pub fn resolve_only(text: &str) -> Result<nesy_core::Library, String> {
    let doc = nesy_core::parse(text).map_err(|e| format!("{}: {e}", e.pos))?;
    nesy_core::resolve(&doc, &nesy_core::Catalog::builtin())
        .map(|r| r.library)
        .map_err(|es| es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))
}

const DEFAULT_CLASSES: &[&str] = &[
    "Instance", "Data", "Symbol", "Model", "Statistical_Model", "Semantic_Model", "Process", "Training",
    "Deduction", "Transformation", "Actor",
];

/// A random document over the bundled ontology: patterns built from chains
/// with named and anonymous nodes, refinements (inferred when unique,
/// otherwise via an explicit map), a network and a combination when the
/// colimit exists.
pub fn random_document(rng: &mut impl Rng) -> String {
    let mut text = String::from("logic NeSyPatterns\n");
    let count = rng.random_range(1..=4);
    for p in 0..count {
        text.push_str(&format!("pattern Q{p} = data ontohub:NeSyPatterns.omn\n"));
        let mut ids: BTreeMap<String, &str> = BTreeMap::new();
        for _ in 0..rng.random_range(1..=3) {
            let len = rng.random_range(1..=3);
            let mut refs = Vec::new();
            let mut last: Option<String> = None;
            for _ in 0..len {
                let class = *DEFAULT_CLASSES.choose(rng).unwrap();
                let r = if rng.random_bool(0.5) {
                    let id = format!("x{}", rng.random_range(0..4));
                    if last.as_deref() == Some(id.as_str()) {
                        continue;
                    }
                    let label = *ids.entry(id.clone()).or_insert(class);
                    last = Some(id.clone());
                    format!("{id} : {label}")
                } else {
                    last = None;
                    class.to_string()
                };
                refs.push(r);
            }
            text.push_str(&format!("  {};\n", refs.join(" -> ")));
        }
        text.push_str("end\n");
    }
    let lib = resolve_only(&text).expect("generated patterns resolve");
    let names: Vec<String> = lib.patterns.keys().cloned().collect();
    let mut members = Vec::new();
    let mut k = 0;
    for s in &names {
        for t in &names {
            if k >= 3 || !rng.random_bool(0.4) {
                continue;
            }
            let maps = nesy_core::find_homomorphisms(&lib.patterns[s], &lib.patterns[t], 2);
            match maps.len() {
                0 => continue,
                1 => text.push_str(&format!("refinement R{k} = {s} refined to {t} end\n")),
                _ => {
                    let pairs: Vec<String> = maps[0].iter().map(|(a, b)| format!("{a} |-> {b}")).collect();
                    text.push_str(&format!("refinement R{k} = {s} refined to {t} via {} end\n", pairs.join(", ")));
                }
            }
            members.push(format!("R{k}"));
            k += 1;
        }
    }
    if !members.is_empty() {
        members.push(names[0].clone());
        text.push_str(&format!("network N = {} end\n", members.join(", ")));
        let with_combine = format!("{text}pattern C = combine N end\n");
        if load(&with_combine).is_ok() {
            return with_combine;
        }
    }
    text
}
