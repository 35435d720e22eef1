use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::colimit::CombinationResult;
use crate::network::Network;
use crate::pattern::{build_pattern, NodeId, Pattern, PatternError};
use crate::refinement::NodeMap;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("invalid JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Values with a JSON rendering.
pub trait Emit {
    fn to_json(&self) -> Value;
}

impl Emit for Pattern {
    fn to_json(&self) -> Value {
        pattern_to_json(self)
    }
}

impl Emit for CombinationResult {
    fn to_json(&self) -> Value {
        combination_to_json(self)
    }
}

impl Emit for Network {
    fn to_json(&self) -> Value {
        network_to_json(self)
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn emit_json<T: Emit + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(&value.to_json()).expect("values are serializable");
    s.push('\n');
    s
}

pub fn pattern_to_json(p: &Pattern) -> Value {
    let nodes: Vec<Value> = p
        .nodes()
        .iter()
        .map(|n| json!({"id": n.id.as_str(), "label": n.label.local_name()}))
        .collect();
    let edges: Vec<Value> = p.edges().map(|(a, b)| json!([a.as_str(), b.as_str()])).collect();
    json!({"name": p.name(), "nodes": nodes, "edges": edges})
}

fn map_to_json(map: &NodeMap) -> Value {
    Value::Object(
        map.iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
            .collect(),
    )
}

pub fn combination_to_json(r: &CombinationResult) -> Value {
    let mut v = pattern_to_json(&r.pattern);
    let obj = v.as_object_mut().expect("object");
    let injections: Map<String, Value> = r.injections.iter().map(|(k, m)| (k.clone(), map_to_json(m))).collect();
    let classes: Map<String, Value> = r
        .classes
        .iter()
        .map(|(node, members)| {
            let members = members.iter().map(|(p, n)| json!([p, n.as_str()])).collect();
            (node.to_string(), Value::Array(members))
        })
        .collect();
    obj.insert("injections".into(), Value::Object(injections));
    obj.insert("classes".into(), Value::Object(classes));
    v
}

pub fn network_to_json(n: &Network) -> Value {
    let patterns: Vec<Value> = n.patterns().iter().map(|p| pattern_to_json(p)).collect();
    let refinements: Vec<Value> = n
        .edges()
        .iter()
        .map(|e| {
            let r = &e.refinement;
            json!({
                "name": r.name(),
                "source": r.source().name(),
                "target": r.target().name(),
                "map": map_to_json(r.node_map()),
            })
        })
        .collect();
    json!({"name": n.name(), "patterns": patterns, "refinements": refinements})
}

/// Reads a pattern written by [`emit_json`]; labels are looked up by local
/// name or full IRI in `taxonomy`.
pub fn read_pattern_json(text: &str, taxonomy: Arc<Taxonomy>) -> Result<Pattern, JsonError> {
    let v: Value = serde_json::from_str(text)?;
    let shape = |what: &str| JsonError::Shape(format!("expected {what}"));
    let name = v.get("name").and_then(Value::as_str).ok_or_else(|| shape("string `name`"))?;
    let mut nodes = Vec::new();
    for n in v.get("nodes").and_then(Value::as_array).ok_or_else(|| shape("array `nodes`"))? {
        let id = n.get("id").and_then(Value::as_str).ok_or_else(|| shape("string `id` in node"))?;
        let label = n.get("label").and_then(Value::as_str).ok_or_else(|| shape("string `label` in node"))?;
        let class = taxonomy
            .lookup(label)
            .or_else(|| taxonomy.by_iri(label))
            .ok_or_else(|| PatternError::UnknownLabel(label.to_string()))?
            .clone();
        nodes.push((NodeId::new(id), class));
    }
    let mut edges = Vec::new();
    for e in v.get("edges").and_then(Value::as_array).ok_or_else(|| shape("array `edges`"))? {
        match e.as_array().map(Vec::as_slice) {
            Some([Value::String(a), Value::String(b)]) => edges.push((NodeId::new(a.as_str()), NodeId::new(b.as_str()))),
            _ => return Err(shape("edge pair [from, to]")),
        }
    }
    Ok(build_pattern(name, taxonomy, nodes, edges)?)
}
