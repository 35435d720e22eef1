//! Neural-symbolic design patterns: taxonomies of pattern elements, labeled
//! graph patterns, refinements between them, networks and their combination
//! as colimits, plus a small specification language to write them down.
//!
//! With the default `parallel` feature, homomorphism search splits its first
//! branching level across a rayon pool. Without it everything runs on the
//! calling thread and produces identical results.

pub mod catalog;
pub mod colimit;
pub mod diagnostics;
pub mod dsl;
pub mod emit;
pub mod manchester;
pub mod network;
pub mod pattern;
pub mod refinement;
pub mod taxonomy;

pub use catalog::{load_catalog, Catalog, CatalogError, OntologySource};
pub use colimit::{combine, combine_named, evaluate_combines, CombinationResult, CombineError};
pub use diagnostics::{Diagnostic, Position, Severity};
pub use dsl::{emit_dsl, parse, resolve, Library};
pub use emit::{emit_abox, emit_dot, emit_json, AboxTriples};
pub use manchester::{emit_manchester, parse_taxonomy};
pub use network::{Network, NetworkError};
pub use pattern::{build_pattern, isomorphic, NodeId, Pattern, PatternError};
pub use refinement::{check_refinement, find_homomorphisms, infer_refinement, NodeMap, Refinement, RefinementError};
pub use taxonomy::{default_taxonomy, ClassRef, Taxonomy, TaxonomyError};
