//! Serializers for patterns, networks and combination results.

mod abox;
mod dot;
mod json;

pub use abox::{emit_abox, AboxTriples, Relation};
pub use dot::emit_dot;
pub use json::{
    combination_to_json, emit_json, network_to_json, pattern_to_json, read_pattern_json, Emit, JsonError,
};
