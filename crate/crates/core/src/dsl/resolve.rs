//! Name resolution: turns a parsed [`Document`] into a [`Library`].
//!
//! Declarations are resolved in order; a name may only refer to earlier
//! declarations. A failing declaration is reported once, and later
//! references to it are skipped silently so errors do not cascade.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use super::ast::*;
use super::{DeclKind, Library};
use crate::catalog::{CatalogError, OntologySource};
use crate::colimit::{materialize, CombineError};
use crate::diagnostics::{Diagnostic, Position};
use crate::network::{build_network, NetworkError};
use crate::pattern::{build_pattern, NodeId, Pattern, PatternError};
use crate::refinement::{infer_refinement, NodeMap, Refinement, RefinementError};
use crate::taxonomy::{ClassRef, Taxonomy, TaxonomyError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResolveErrorKind {
    UnknownName(String),
    DuplicateName(String),
    WrongKind { name: String, expected: &'static str },
    LabelMismatch { id: String, first: String, second: String },
    UnknownClass(String),
    UnknownNode { pattern: String, node: String },
    ConflictingMap(String),
    CatalogMiss(CatalogError),
    Catalog(CatalogError),
    Ontology(TaxonomyError),
    Pattern(PatternError),
    Refinement(RefinementError),
    Network(NetworkError),
    Combine(CombineError),
}

impl fmt::Display for ResolveErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ResolveErrorKind::*;
        match self {
            UnknownName(n) => write!(f, "unknown name `{n}`"),
            DuplicateName(n) => write!(f, "`{n}` is already declared"),
            WrongKind { name, expected } => write!(f, "`{name}` is not a {expected}"),
            LabelMismatch { id, first, second } => write!(
                f,
                "node `{id}` was declared as {first} and is used again as {second}"
            ),
            UnknownClass(c) => write!(f, "class `{c}` is not in the pattern's ontology"),
            UnknownNode { pattern, node } => write!(f, "pattern `{pattern}` has no node `{node}`"),
            ConflictingMap(n) => write!(f, "node `{n}` is mapped twice"),
            CatalogMiss(e) | Catalog(e) => e.fmt(f),
            Ontology(e) => write!(f, "in ontology: {e}"),
            Pattern(e) => e.fmt(f),
            Refinement(e) => e.fmt(f),
            Network(e) => e.fmt(f),
            Combine(e) => e.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolveError {
    pub pos: Position,
    pub kind: ResolveErrorKind,
}

impl ResolveError {
    fn new(pos: Position, kind: ResolveErrorKind) -> Self {
        ResolveError { pos, kind }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        Diagnostic::error(self.pos, self.kind.to_string())
    }

    /// Failures of the environment (catalog, I/O) rather than of the document.
    pub fn is_environmental(&self) -> bool {
        match &self.kind {
            ResolveErrorKind::CatalogMiss(_) => true,
            ResolveErrorKind::Catalog(e) => e.is_environmental(),
            _ => false,
        }
    }
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.kind)
    }
}

impl std::error::Error for ResolveError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub library: Library,
    pub warnings: Vec<Diagnostic>,
}

enum Fail {
    Reported(ResolveError),
    /// Depends on a declaration that already failed.
    Cascade,
}

impl From<ResolveError> for Fail {
    fn from(e: ResolveError) -> Self {
        Fail::Reported(e)
    }
}

struct Resolver<'a> {
    source: &'a dyn OntologySource,
    lib: Library,
    failed: HashSet<String>,
    loaded: HashMap<String, Option<Arc<Taxonomy>>>,
    errors: Vec<ResolveError>,
    warnings: Vec<Diagnostic>,
}

/// Resolves every declaration of `doc`. Refinements without `via` are
/// inferred; combine definitions are only computed when a later declaration
/// refers to them (see [`crate::colimit::evaluate_combines`]).
pub fn resolve(doc: &Document, source: &dyn OntologySource) -> Result<Resolved, Vec<ResolveError>> {
    let mut r = Resolver {
        source,
        lib: Library::default(),
        failed: HashSet::new(),
        loaded: HashMap::new(),
        errors: Vec::new(),
        warnings: Vec::new(),
    };
    for decl in &doc.declarations {
        let name = decl.name();
        if r.lib.declares(&name.text) || r.failed.contains(&name.text) {
            r.errors.push(ResolveError::new(name.pos, ResolveErrorKind::DuplicateName(name.text.clone())));
            continue;
        }
        let outcome = match decl {
            Decl::Pattern(p) => r.pattern(p),
            Decl::Refinement(d) => r.refinement(d),
            Decl::Network(n) => r.network(n),
        };
        match outcome {
            Ok(kind) => {
                r.lib.order.push((kind, name.text.clone()));
                r.lib.positions.insert(name.text.clone(), name.pos);
            }
            Err(fail) => {
                r.failed.insert(name.text.clone());
                if let Fail::Reported(e) = fail {
                    r.errors.push(e);
                }
            }
        }
    }
    if r.errors.is_empty() {
        Ok(Resolved {
            library: r.lib,
            warnings: r.warnings,
        })
    } else {
        Err(r.errors)
    }
}

impl Resolver<'_> {
    fn taxonomy(&mut self, ont: &OntRef) -> Result<(String, Arc<Taxonomy>), Fail> {
        let base_key = ont.base.text.clone();
        let base = match self.loaded.get(&base_key) {
            Some(Some(t)) => t.clone(),
            Some(None) => return Err(Fail::Cascade),
            None => match self.source.load(&base_key) {
                Ok(loaded) => {
                    for (origin, w) in loaded.warnings {
                        self.warnings.push(Diagnostic::warning(
                            ont.base.pos,
                            format!("{origin}:{}: {}", w.pos, w.message),
                        ));
                    }
                    self.loaded.insert(base_key.clone(), Some(loaded.taxonomy.clone()));
                    loaded.taxonomy
                }
                Err(e) => {
                    self.loaded.insert(base_key, None);
                    let kind = match e {
                        CatalogError::Miss(_) | CatalogError::UnknownPrefix { .. } => ResolveErrorKind::CatalogMiss(e),
                        other => ResolveErrorKind::Catalog(other),
                    };
                    return Err(ResolveError::new(ont.base.pos, kind).into());
                }
            },
        };
        let Some(ext) = &ont.extension else {
            self.lib.taxonomies.entry(base_key.clone()).or_insert(base.clone());
            return Ok((base_key, base));
        };
        let key = format!("{{ {} then {} }}", base_key, ext.text);
        match self.loaded.get(&key) {
            Some(Some(t)) => return Ok((key, t.clone())),
            Some(None) => return Err(Fail::Cascade),
            None => {}
        }
        match base.extend(&ext.text) {
            Ok((t, warnings)) => {
                let t = Arc::new(t);
                for w in warnings {
                    self.warnings.push(Diagnostic::warning(w.pos.relative_to(ext.pos), w.message));
                }
                self.loaded.insert(key.clone(), Some(t.clone()));
                self.lib.taxonomies.insert(key.clone(), t.clone());
                Ok((key, t))
            }
            Err(e) => {
                self.loaded.insert(key, None);
                let pos = match &e {
                    TaxonomyError::Syntax { pos, .. } => pos.relative_to(ext.pos),
                    _ => ext.pos,
                };
                let e = match e {
                    TaxonomyError::Syntax { message, .. } => TaxonomyError::Syntax { pos, message },
                    other => other,
                };
                Err(ResolveError::new(pos, ResolveErrorKind::Ontology(e)).into())
            }
        }
    }

    fn pattern(&mut self, decl: &PatternDecl) -> Result<DeclKind, Fail> {
        let name = &decl.name.text;
        match &decl.body {
            PatternBody::Combine(net) => {
                if !self.lib.networks.contains_key(&net.text) {
                    return Err(self.missing(net, "network"));
                }
                self.lib.combine_defs.insert(name.clone(), net.text.clone());
                Ok(DeclKind::Combine)
            }
            PatternBody::Data { ontology, chains } => {
                let (key, tax) = self.taxonomy(ontology)?;
                let pattern = self.build(name, tax, chains)?;
                self.lib.pattern_ontology.insert(name.clone(), key);
                self.lib.patterns.insert(name.clone(), Arc::new(pattern));
                Ok(DeclKind::Pattern)
            }
        }
    }

    fn build(&self, name: &str, tax: Arc<Taxonomy>, chains: &[Chain]) -> Result<Pattern, Fail> {
        let explicit: HashSet<&str> = chains
            .iter()
            .flat_map(|c| c.nodes.iter())
            .filter_map(|n| n.id.as_ref().map(|i| i.text.as_str()))
            .collect();
        let mut anon = 0;
        let mut fresh = || loop {
            anon += 1;
            let id = format!("anon{anon}");
            if !explicit.contains(id.as_str()) {
                return id;
            }
        };

        let mut labels: HashMap<String, ClassRef> = HashMap::new();
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        for chain in chains {
            let mut prev: Option<String> = None;
            for node in &chain.nodes {
                let class = tax
                    .lookup(&node.class.text)
                    .ok_or_else(|| {
                        ResolveError::new(node.class.pos, ResolveErrorKind::UnknownClass(node.class.text.clone()))
                    })?
                    .clone();
                let id = match &node.id {
                    Some(id) => {
                        match labels.get(&id.text) {
                            Some(first) if *first != class => {
                                return Err(ResolveError::new(
                                    id.pos,
                                    ResolveErrorKind::LabelMismatch {
                                        id: id.text.clone(),
                                        first: first.local_name().to_string(),
                                        second: class.local_name().to_string(),
                                    },
                                )
                                .into())
                            }
                            Some(_) => {}
                            None => {
                                labels.insert(id.text.clone(), class.clone());
                                nodes.push((NodeId::new(id.text.clone()), class));
                            }
                        }
                        id.text.clone()
                    }
                    None => {
                        let id = fresh();
                        nodes.push((NodeId::new(id.clone()), class));
                        id
                    }
                };
                if let Some(p) = prev {
                    if p == id {
                        return Err(ResolveError::new(
                            node.pos(),
                            ResolveErrorKind::Pattern(PatternError::SelfLoop(NodeId::new(id))),
                        )
                        .into());
                    }
                    edges.push((NodeId::new(p), NodeId::new(id.clone())));
                }
                prev = Some(id);
            }
        }
        let pos = chains.first().and_then(|c| c.nodes.first()).map(NodeRef::pos).unwrap_or_default();
        build_pattern(name, tax, nodes, edges)
            .map_err(|e| ResolveError::new(pos, ResolveErrorKind::Pattern(e)).into())
    }

    fn missing(&self, ident: &Ident, expected: &'static str) -> Fail {
        if self.failed.contains(&ident.text) {
            Fail::Cascade
        } else if self.lib.declares(&ident.text) {
            Fail::Reported(ResolveError::new(
                ident.pos,
                ResolveErrorKind::WrongKind {
                    name: ident.text.clone(),
                    expected,
                },
            ))
        } else {
            Fail::Reported(ResolveError::new(ident.pos, ResolveErrorKind::UnknownName(ident.text.clone())))
        }
    }

    /// A plain pattern, or a combine-defined one computed on first use.
    fn pattern_ref(&mut self, ident: &Ident) -> Result<Arc<Pattern>, Fail> {
        if let Some(p) = self.lib.patterns.get(&ident.text) {
            return Ok(p.clone());
        }
        if self.lib.combine_defs.contains_key(&ident.text) {
            return materialize(&mut self.lib, &ident.text)
                .map_err(|e| ResolveError::new(ident.pos, ResolveErrorKind::Combine(e)).into());
        }
        Err(self.missing(ident, "pattern"))
    }

    fn refinement(&mut self, decl: &RefinementDecl) -> Result<DeclKind, Fail> {
        let source = self.pattern_ref(&decl.source)?;
        let target = self.pattern_ref(&decl.target)?;
        let name = decl.name.text.clone();
        let result = match &decl.explicit_map {
            None => infer_refinement(name.clone(), source, target),
            Some(pairs) => {
                let mut map = NodeMap::new();
                for (from, to) in pairs {
                    for (ident, pattern) in [(from, &source), (to, &target)] {
                        if pattern.index_of(&NodeId::new(ident.text.clone())).is_none() {
                            return Err(ResolveError::new(
                                ident.pos,
                                ResolveErrorKind::UnknownNode {
                                    pattern: pattern.name().to_string(),
                                    node: ident.text.clone(),
                                },
                            )
                            .into());
                        }
                    }
                    let old = map.insert(NodeId::new(from.text.clone()), NodeId::new(to.text.clone()));
                    if old.is_some_and(|o| o.as_str() != to.text) {
                        return Err(ResolveError::new(from.pos, ResolveErrorKind::ConflictingMap(from.text.clone())).into());
                    }
                }
                Refinement::new(name.clone(), source, target, map)
            }
        };
        let refinement =
            result.map_err(|e| ResolveError::new(decl.name.pos, ResolveErrorKind::Refinement(e)))?;
        self.lib.refinements.insert(name, Arc::new(refinement));
        Ok(DeclKind::Refinement)
    }

    fn network(&mut self, decl: &NetworkDecl) -> Result<DeclKind, Fail> {
        for member in &decl.members {
            if self.failed.contains(&member.text) {
                return Err(Fail::Cascade);
            }
            if self.lib.combine_defs.contains_key(&member.text) {
                self.pattern_ref(member)?;
            }
        }
        let network = build_network(decl, &self.lib).map_err(|e| {
            let pos = match &e {
                NetworkError::UnknownName(n) => decl.members.iter().find(|m| &m.text == n).map_or(decl.name.pos, |m| m.pos),
                _ => decl.name.pos,
            };
            ResolveError::new(pos, ResolveErrorKind::Network(e))
        })?;
        self.lib.networks.insert(decl.name.text.clone(), network);
        Ok(DeclKind::Network)
    }
}
