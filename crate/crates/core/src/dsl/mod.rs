//! The pattern language: parsing, name resolution and pretty-printing.
//!
//! ```text
//! logic NeSyPatterns
//! pattern Train = data ontohub:NeSyPatterns.omn
//!   Symbol -> Training -> Model;
//! end
//! ```

mod ast;
mod emit;
mod parser;
mod resolve;

use std::collections::BTreeMap;
use std::sync::Arc;

use indexmap::IndexMap;

pub use ast::*;
pub use emit::emit_dsl;
pub use parser::{parse, ParseError};
pub use resolve::{resolve, ResolveError, ResolveErrorKind, Resolved};

use crate::diagnostics::Position;
use crate::network::Network;
use crate::pattern::Pattern;
use crate::refinement::Refinement;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Pattern,
    Combine,
    Refinement,
    Network,
}

/// Resolved contents of one document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Library {
    /// Keyed by the data clause as written, e.g. `ontohub:NeSyPatterns.omn`
    /// or `{ ontohub:NeSyPatterns.omn then ... }`.
    pub taxonomies: IndexMap<String, Arc<Taxonomy>>,
    pub patterns: IndexMap<String, Arc<Pattern>>,
    pub refinements: IndexMap<String, Arc<Refinement>>,
    pub networks: IndexMap<String, Network>,
    /// Combine-defined pattern name -> network name.
    pub combine_defs: IndexMap<String, String>,
    /// Pattern name -> key into `taxonomies`.
    pub pattern_ontology: IndexMap<String, String>,
    /// Declaration order.
    pub order: Vec<(DeclKind, String)>,
    pub positions: BTreeMap<String, Position>,
}

impl Library {
    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position(&self, name: &str) -> Position {
        self.positions.get(name).copied().unwrap_or_default()
    }

    pub fn declares(&self, name: &str) -> bool {
        self.patterns.contains_key(name)
            || self.refinements.contains_key(name)
            || self.networks.contains_key(name)
            || self.combine_defs.contains_key(name)
    }
}
