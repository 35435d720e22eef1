//! Networks: diagrams of patterns (vertices) and refinements (edges).

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::dsl::{Library, NetworkDecl};
use crate::pattern::Pattern;
use crate::refinement::Refinement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("patterns `{0}` and `{1}` are written over different ontologies")]
    TaxonomyMismatch(String, String),
    #[error("{0}")]
    TypeError(String),
}

/// A refinement placed in a network, with the indices of its endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkEdge {
    pub refinement: Arc<Refinement>,
    pub source: usize,
    pub target: usize,
}

/// A type-correct network. Patterns and refinements are kept sorted by name,
/// so the same members in any listing order give the same network.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    name: String,
    patterns: Vec<Arc<Pattern>>,
    edges: Vec<NetworkEdge>,
}

impl Network {
    /// Builds a network from explicit members. Endpoints of the refinements
    /// are added to the pattern set when missing.
    pub fn new(
        name: impl Into<String>,
        patterns: impl IntoIterator<Item = Arc<Pattern>>,
        refinements: impl IntoIterator<Item = Arc<Refinement>>,
    ) -> Result<Self, NetworkError> {
        let name = name.into();
        let mut by_name: BTreeMap<String, Arc<Pattern>> = BTreeMap::new();
        let mut add = |p: &Arc<Pattern>| -> Result<(), NetworkError> {
            match by_name.get(p.name()) {
                Some(existing) if Arc::ptr_eq(existing, p) || **existing == **p => Ok(()),
                Some(_) => Err(NetworkError::TypeError(format!(
                    "network `{name}` contains two different patterns named `{}`",
                    p.name()
                ))),
                None => {
                    by_name.insert(p.name().to_string(), p.clone());
                    Ok(())
                }
            }
        };
        for p in patterns {
            add(&p)?;
        }
        let mut refs: BTreeMap<String, Arc<Refinement>> = BTreeMap::new();
        for r in refinements {
            add(r.source())?;
            add(r.target())?;
            if let Some(existing) = refs.get(r.name()) {
                if **existing != *r {
                    return Err(NetworkError::TypeError(format!(
                        "network `{name}` contains two different refinements named `{}`",
                        r.name()
                    )));
                }
            }
            refs.insert(r.name().to_string(), r);
        }
        if by_name.is_empty() {
            return Err(NetworkError::TypeError(format!("network `{name}` has no patterns")));
        }

        let patterns: Vec<Arc<Pattern>> = by_name.into_values().collect();
        let first = &patterns[0];
        if let Some(other) = patterns.iter().find(|p| !p.taxonomy().same_classes(first.taxonomy())) {
            return Err(NetworkError::TaxonomyMismatch(
                first.name().to_string(),
                other.name().to_string(),
            ));
        }
        let position = |p: &Pattern| patterns.iter().position(|q| q.name() == p.name()).expect("added above");
        let edges = refs
            .into_values()
            .map(|r| NetworkEdge {
                source: position(r.source()),
                target: position(r.target()),
                refinement: r,
            })
            .collect();
        Ok(Network { name, patterns, edges })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn patterns(&self) -> &[Arc<Pattern>] {
        &self.patterns
    }

    pub fn edges(&self) -> &[NetworkEdge] {
        &self.edges
    }

    pub fn pattern_index(&self, name: &str) -> Option<usize> {
        self.patterns.iter().position(|p| p.name() == name)
    }
}

/// Resolves a network declaration against the declarations before it.
pub fn build_network(decl: &NetworkDecl, lib: &Library) -> Result<Network, NetworkError> {
    let mut patterns = Vec::new();
    let mut refinements = Vec::new();
    for member in &decl.members {
        let m = member.text.as_str();
        if let Some(p) = lib.patterns.get(m) {
            patterns.push(p.clone());
        } else if let Some(r) = lib.refinements.get(m) {
            let expected = |p: &Arc<Pattern>| lib.patterns.get(p.name()).is_some_and(|q| **q == **p);
            if !expected(r.source()) || !expected(r.target()) {
                return Err(NetworkError::TypeError(format!(
                    "refinement `{m}` does not connect patterns of this library"
                )));
            }
            refinements.push(r.clone());
        } else if lib.networks.contains_key(m) {
            return Err(NetworkError::TypeError(format!(
                "`{m}` is a network; networks may only list patterns and refinements"
            )));
        } else {
            return Err(NetworkError::UnknownName(m.to_string()));
        }
    }
    Network::new(decl.name.text.clone(), patterns, refinements)
}
