//! Class hierarchy of pattern elements.
//!
//! A [`Taxonomy`] is a finite DAG of named classes with a distinguished top
//! class. Subsumption (`leq`) is the reflexive-transitive closure of the
//! subclass edges and is precomputed as one bitset of ancestors per class,
//! so queries are O(1) after construction.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use indexmap::IndexSet;
use thiserror::Error;

use crate::diagnostics::{Diagnostic, Position};

/// Namespace of the bundled pattern-element ontology.
pub const DEFAULT_NAMESPACE: &str = "https://ontohub.org/meta/NeSyPatterns.omn#";
/// Local name of the top class.
pub const TOP_NAME: &str = "NeSy_Pattern_Element";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("{pos}: {message}")]
    Syntax { pos: Position, message: String },
    #[error("subclass axioms form a cycle: {}", .cycle.join(" SubClassOf "))]
    Cycle { cycle: Vec<String> },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("`{0}` does not name a class")]
    InvalidIri(String),
}

/// An ontology class, identified by its IRI.
#[derive(Clone)]
pub struct ClassRef {
    iri: Arc<str>,
    local_name: Arc<str>,
}

impl ClassRef {
    pub fn new(iri: impl AsRef<str>) -> Result<Self, TaxonomyError> {
        let iri = iri.as_ref();
        let tail = iri
            .rsplit_once('#')
            .map(|(_, t)| t)
            .or_else(|| iri.rsplit_once('/').map(|(_, t)| t))
            .or_else(|| iri.rsplit_once(':').map(|(_, t)| t))
            .unwrap_or(iri);
        let local = normalize_local_name(tail);
        if local.is_empty() {
            return Err(TaxonomyError::InvalidIri(iri.to_string()));
        }
        Ok(ClassRef {
            iri: iri.into(),
            local_name: local.into(),
        })
    }

    pub fn iri(&self) -> &str {
        &self.iri
    }

    pub fn local_name(&self) -> &str {
        &self.local_name
    }
}

/// Replaces whitespace (and `%20` escapes) with underscores.
pub fn normalize_local_name(name: &str) -> String {
    name.trim()
        .replace("%20", " ")
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect()
}

impl PartialEq for ClassRef {
    fn eq(&self, other: &Self) -> bool {
        self.iri == other.iri
    }
}

impl Eq for ClassRef {}

impl Hash for ClassRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.iri.hash(state)
    }
}

impl PartialOrd for ClassRef {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ClassRef {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iri.cmp(&other.iri)
    }
}

impl fmt::Debug for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassRef({})", self.local_name)
    }
}

impl fmt::Display for ClassRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.local_name)
    }
}

/// Dense index of a class inside one taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub(crate) u32);

impl ClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(len: usize) -> Self {
        BitSet(vec![0; len.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= *b;
        }
    }

    fn intersect_with(&mut self, other: &BitSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= *b;
        }
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits & (1 << b) != 0).map(move |b| w * 64 + b)
        })
    }
}

/// An immutable subclass DAG with a top class.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    namespace: String,
    classes: Vec<ClassRef>,
    by_iri: HashMap<Arc<str>, usize>,
    by_local: HashMap<Arc<str>, usize>,
    parents: Vec<Vec<usize>>,
    /// `up[c]` holds every `d` with `c <= d`, including `c`.
    up: Vec<BitSet>,
    /// `down[c]` holds every `d` with `d <= c`, including `c`.
    down: Vec<BitSet>,
    top: usize,
}

impl Taxonomy {
    pub fn builder(namespace: impl Into<String>) -> TaxonomyBuilder {
        TaxonomyBuilder::new(namespace)
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn top(&self) -> &ClassRef {
        &self.classes[self.top]
    }

    pub fn top_id(&self) -> ClassId {
        ClassId(self.top as u32)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Classes in declaration order.
    pub fn classes(&self) -> &[ClassRef] {
        &self.classes
    }

    pub fn contains(&self, class: &ClassRef) -> bool {
        self.by_iri.contains_key(class.iri())
    }

    pub fn id(&self, class: &ClassRef) -> Option<ClassId> {
        self.by_iri.get(class.iri()).map(|&i| ClassId(i as u32))
    }

    pub fn class(&self, id: ClassId) -> &ClassRef {
        &self.classes[id.index()]
    }

    pub fn by_iri(&self, iri: &str) -> Option<&ClassRef> {
        self.by_iri.get(iri).map(|&i| &self.classes[i])
    }

    /// Finds a class by its normalized local name (case-sensitive).
    pub fn lookup(&self, name: &str) -> Option<&ClassRef> {
        self.by_local
            .get(normalize_local_name(name).as_str())
            .map(|&i| &self.classes[i])
    }

    /// Direct superclasses of `class`.
    pub fn parents(&self, class: &ClassRef) -> Result<Vec<&ClassRef>, TaxonomyError> {
        let id = self.require(class)?;
        Ok(self.parents[id.index()].iter().map(|&p| &self.classes[p]).collect())
    }

    /// All subclass edges `(sub, super)` in declaration order.
    pub fn edges(&self) -> impl Iterator<Item = (&ClassRef, &ClassRef)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(move |(c, ps)| ps.iter().map(move |&p| (&self.classes[c], &self.classes[p])))
    }

    fn require(&self, class: &ClassRef) -> Result<ClassId, TaxonomyError> {
        self.id(class)
            .ok_or_else(|| TaxonomyError::UnknownClass(class.local_name().to_string()))
    }

    /// `a <= b` in the subclass order.
    pub fn leq(&self, a: &ClassRef, b: &ClassRef) -> Result<bool, TaxonomyError> {
        Ok(self.leq_id(self.require(a)?, self.require(b)?))
    }

    pub fn leq_id(&self, a: ClassId, b: ClassId) -> bool {
        self.up[a.index()].contains(b.index())
    }

    /// Greatest common lower bound of `labels`, or `None` when the common
    /// lower bounds have zero or several maximal elements.
    pub fn infimum<'a, I>(&self, labels: I) -> Result<Option<ClassRef>, TaxonomyError>
    where
        I: IntoIterator<Item = &'a ClassRef>,
    {
        let ids = labels
            .into_iter()
            .map(|c| self.require(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.infimum_ids(&ids).map(|id| self.class(id).clone()))
    }

    pub fn infimum_ids(&self, labels: &[ClassId]) -> Option<ClassId> {
        let mut common = BitSet::new(self.classes.len());
        for i in 0..self.classes.len() {
            common.insert(i);
        }
        for l in labels {
            common.intersect_with(&self.down[l.index()]);
        }
        let candidates: Vec<usize> = common.ones().collect();
        let mut maximal = candidates.iter().copied().filter(|&c| {
            !candidates
                .iter()
                .any(|&d| d != c && self.up[c].contains(d))
        });
        match (maximal.next(), maximal.next()) {
            (Some(c), None) => Some(ClassId(c as u32)),
            _ => None,
        }
    }

    /// Direct children of top that lie above `class`, in declaration order.
    pub fn top_level_ancestors(&self, class: &ClassRef) -> Vec<&ClassRef> {
        let Some(id) = self.id(class) else {
            return Vec::new();
        };
        self.classes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.parents[*i].contains(&self.top) && self.up[id.index()].contains(*i))
            .map(|(_, c)| c)
            .collect()
    }

    /// True when both taxonomies declare the same set of class IRIs.
    pub fn same_classes(&self, other: &Taxonomy) -> bool {
        self.classes.len() == other.classes.len()
            && self.classes.iter().all(|c| other.contains(c))
    }

    /// A builder seeded with every class and edge of `self`.
    pub fn to_builder(&self) -> TaxonomyBuilder {
        let mut b = TaxonomyBuilder::with_top(self.namespace.clone(), self.top().clone());
        for c in &self.classes {
            b.add_class(c.clone());
        }
        for (sub, sup) in self.edges() {
            b.add_subclass(sub.clone(), sup.clone());
        }
        b
    }

    /// Returns `self` extended with the classes and axioms of a Manchester
    /// fragment. Names used as superclasses must be declared in `self` or in
    /// the fragment.
    pub fn extend(&self, fragment: &str) -> Result<(Taxonomy, Vec<Diagnostic>), TaxonomyError> {
        crate::manchester::extend(self, fragment)
    }
}

impl PartialEq for Taxonomy {
    fn eq(&self, other: &Self) -> bool {
        if !self.same_classes(other) || self.top() != other.top() {
            return false;
        }
        let mine: BTreeSet<_> = self.edges().collect();
        let theirs: BTreeSet<_> = other.edges().collect();
        mine == theirs
    }
}

impl Eq for Taxonomy {}

/// Incremental construction of a [`Taxonomy`].
#[derive(Debug, Clone)]
pub struct TaxonomyBuilder {
    namespace: String,
    top: ClassRef,
    classes: IndexSet<ClassRef>,
    edges: IndexSet<(ClassRef, ClassRef)>,
}

impl TaxonomyBuilder {
    pub fn new(namespace: impl Into<String>) -> Self {
        let namespace = namespace.into();
        let top = ClassRef::new(format!("{namespace}{TOP_NAME}")).expect("top name is non-empty");
        Self::with_top(namespace, top)
    }

    pub fn with_top(namespace: impl Into<String>, top: ClassRef) -> Self {
        let mut classes = IndexSet::new();
        classes.insert(top.clone());
        TaxonomyBuilder {
            namespace: namespace.into(),
            top,
            classes,
            edges: IndexSet::new(),
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn top(&self) -> &ClassRef {
        &self.top
    }

    /// Class with the given local name in this builder's namespace.
    pub fn named(&self, local: &str) -> Result<ClassRef, TaxonomyError> {
        ClassRef::new(format!("{}{}", self.namespace, normalize_local_name(local)))
    }

    pub fn contains(&self, class: &ClassRef) -> bool {
        self.classes.contains(class)
    }

    pub fn add_class(&mut self, class: ClassRef) -> &mut Self {
        self.classes.insert(class);
        self
    }

    pub fn add_subclass(&mut self, sub: ClassRef, sup: ClassRef) -> &mut Self {
        if sub != sup {
            self.edges.insert((sub, sup));
        }
        self
    }

    /// Convenience for `add_class` + `add_subclass` by local name.
    pub fn class(&mut self, local: &str, supers: &[&str]) -> Result<&mut Self, TaxonomyError> {
        let c = self.named(local)?;
        self.add_class(c.clone());
        for s in supers {
            let s = if *s == TOP_NAME { self.top.clone() } else { self.named(s)? };
            self.add_subclass(c.clone(), s);
        }
        Ok(self)
    }

    pub fn build(&self) -> Result<Taxonomy, TaxonomyError> {
        let classes: Vec<ClassRef> = self.classes.iter().cloned().collect();
        let by_iri: HashMap<Arc<str>, usize> =
            classes.iter().enumerate().map(|(i, c)| (c.iri.clone(), i)).collect();
        let mut by_local: HashMap<Arc<str>, usize> = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            by_local.entry(c.local_name.clone()).or_insert(i);
        }
        let top = by_iri[self.top.iri()];

        let mut parents = vec![Vec::new(); classes.len()];
        for (sub, sup) in &self.edges {
            let s = *by_iri
                .get(sub.iri())
                .ok_or_else(|| TaxonomyError::UnknownClass(sub.local_name().to_string()))?;
            let p = *by_iri
                .get(sup.iri())
                .ok_or_else(|| TaxonomyError::UnknownClass(sup.local_name().to_string()))?;
            if !parents[s].contains(&p) {
                parents[s].push(p);
            }
        }
        for (i, ps) in parents.iter_mut().enumerate() {
            if i != top && ps.is_empty() {
                ps.push(top);
            }
        }

        let order = topological_order(&parents).map_err(|cycle| TaxonomyError::Cycle {
            cycle: cycle.into_iter().map(|i| classes[i].local_name().to_string()).collect(),
        })?;

        // `order` lists every class after all of its parents.
        let n = classes.len();
        let mut up = vec![BitSet::new(n); n];
        for &c in &order {
            let mut set = BitSet::new(n);
            set.insert(c);
            for &p in &parents[c] {
                set.union_with(&up[p]);
            }
            up[c] = set;
        }
        let mut down = vec![BitSet::new(n); n];
        for (c, set) in up.iter().enumerate() {
            for a in set.ones() {
                down[a].insert(c);
            }
        }

        Ok(Taxonomy {
            namespace: self.namespace.clone(),
            classes,
            by_iri,
            by_local,
            parents,
            up,
            down,
            top,
        })
    }
}

/// Orders nodes so that every node follows all of its parents, or returns
/// one cycle as a list of nodes (first node repeated at the end).
fn topological_order(parents: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let n = parents.len();
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // (node, next parent index)
        let mut stack = vec![(root, 0usize)];
        mark[root] = Mark::Active;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if let Some(&p) = parents[node].get(*next) {
                *next += 1;
                match mark[p] {
                    Mark::New => {
                        mark[p] = Mark::Active;
                        stack.push((p, 0));
                    }
                    Mark::Active => {
                        let start = stack.iter().position(|&(v, _)| v == p).unwrap();
                        let mut cycle: Vec<usize> = stack[start..].iter().map(|&(v, _)| v).collect();
                        cycle.push(p);
                        return Err(cycle);
                    }
                    Mark::Done => {}
                }
            } else {
                mark[node] = Mark::Done;
                order.push(node);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// The bundled pattern-element taxonomy.
///
/// ```text
/// NeSy_Pattern_Element
/// ├── Instance: Data, Symbol
/// ├── Model: Statistical_Model, Semantic_Model
/// ├── Process: Training, Deduction, Transformation
/// └── Actor
/// ```
pub fn default_taxonomy() -> Taxonomy {
    default_taxonomy_shared().as_ref().clone()
}

/// Shared handle to the bundled taxonomy.
pub fn default_taxonomy_shared() -> Arc<Taxonomy> {
    static DEFAULT: OnceLock<Arc<Taxonomy>> = OnceLock::new();
    DEFAULT
        .get_or_init(|| {
            let mut b = TaxonomyBuilder::new(DEFAULT_NAMESPACE);
            let tree: &[(&str, &str)] = &[
                ("Instance", TOP_NAME),
                ("Model", TOP_NAME),
                ("Process", TOP_NAME),
                ("Actor", TOP_NAME),
                ("Data", "Instance"),
                ("Symbol", "Instance"),
                ("Statistical_Model", "Model"),
                ("Semantic_Model", "Model"),
                ("Training", "Process"),
                ("Deduction", "Process"),
                ("Transformation", "Process"),
            ];
            for (c, p) in tree {
                b.class(c, &[p]).expect("valid name");
            }
            Arc::new(b.build().expect("bundled taxonomy is acyclic"))
        })
        .clone()
}
