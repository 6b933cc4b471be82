//! One-graph-per-line JSON.
//!
//! ```text
//! {"id":"d0","framework":"drg","encoding":"fork-bnode-cnode","tops":[0],
//!  "nodes":[{"id":0},{"id":1,"label":"house.n.05","anchors":[{"from":4,"to":9}]}],
//!  "edges":[{"source":1,"target":0,"label":"in"}]}
//! ```
//!
//! A document whose conversion failed is written with empty `nodes`/`edges`
//! and an `error` field so that files stay aligned by id.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use super::{Drg, Edge, GraphError, Node, NodeKind};
use crate::clausal_form::Span;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("schema error at `{path}`: {reason}")]
pub struct SchemaError {
    pub path: String,
    pub reason: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        SchemaError { path: path.into(), reason: reason.into() }
    }
}

/// One line of a graph file: a graph, or a null graph with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphRecord {
    pub id: String,
    pub encoding: String,
    pub graph: Option<Drg>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct OutGraph<'a> {
    id: &'a str,
    framework: &'static str,
    encoding: &'a str,
    tops: &'a [usize],
    nodes: Vec<OutNode<'a>>,
    edges: Vec<OutEdge<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

#[derive(Serialize)]
struct OutNode<'a> {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    anchors: Vec<OutSpan>,
}

#[derive(Serialize)]
struct OutSpan {
    from: usize,
    to: usize,
}

#[derive(Serialize)]
struct OutEdge<'a> {
    source: usize,
    target: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

pub fn to_interchange(g: &Drg) -> String {
    let out = OutGraph {
        id: &g.id,
        framework: "drg",
        encoding: &g.encoding,
        tops: &g.tops,
        nodes: g
            .nodes
            .iter()
            .map(|n| OutNode {
                id: n.id,
                label: n.label.as_deref(),
                anchors: n.anchors.iter().map(|s| OutSpan { from: s.from, to: s.to }).collect(),
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|e| OutEdge { source: e.source, target: e.target, label: e.label.as_deref() })
            .collect(),
        error: None,
    };
    serde_json::to_string(&out).expect("graph serializes")
}

/// The line written for a document that could not be converted.
pub fn null_record(id: &str, encoding: &str, error: &str) -> String {
    let out = OutGraph { id, framework: "drg", encoding, tops: &[], nodes: vec![], edges: vec![], error: Some(error) };
    serde_json::to_string(&out).expect("graph serializes")
}

/// Reads a graph line; null records are an error here (see [`read_record`]).
pub fn from_interchange(line: &str) -> Result<Drg, SchemaError> {
    let rec = read_record(line)?;
    match rec.graph {
        Some(g) => Ok(g),
        None => Err(SchemaError::new("error", rec.error.unwrap_or_default())),
    }
}

pub fn read_record(line: &str) -> Result<GraphRecord, SchemaError> {
    let value: Value = serde_json::from_str(line).map_err(|e| SchemaError::new("", e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| SchemaError::new("", "expected a JSON object"))?;
    let id = string_field(obj, "id", "id")?;
    if let Some(f) = obj.get("framework") {
        if f.as_str() != Some("drg") {
            return Err(SchemaError::new("framework", "expected \"drg\""));
        }
    }
    let encoding = string_field(obj, "encoding", "encoding")?;
    let error = match obj.get("error") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(SchemaError::new("error", "expected a string")),
    };
    let tops_v = array_field(obj, "tops", "tops")?;
    let nodes_v = array_field(obj, "nodes", "nodes")?;
    let edges_v = array_field(obj, "edges", "edges")?;
    if error.is_some() {
        return Ok(GraphRecord { id, encoding, graph: None, error });
    }

    let mut slots: Vec<Option<Node>> = vec![None; nodes_v.len()];
    for (k, nv) in nodes_v.iter().enumerate() {
        let path = format!("nodes[{k}]");
        let no = nv.as_object().ok_or_else(|| SchemaError::new(&path, "expected an object"))?;
        let nid = index_field(no, "id", &format!("{path}.id"))?;
        let id_path = format!("{path}.id");
        if nid >= slots.len() {
            return Err(SchemaError::new(id_path, format!("id {nid} out of range 0..{}", slots.len())));
        }
        if slots[nid].is_some() {
            return Err(SchemaError::new(id_path, format!("duplicate node id {nid}")));
        }
        let label = optional_string(no, "label", &format!("{path}.label"))?;
        let mut node = Node::new(nid, label, NodeKind::Box);
        if let Some(av) = no.get("anchors") {
            let arr = av.as_array().ok_or_else(|| SchemaError::new(format!("{path}.anchors"), "expected an array"))?;
            for (j, sv) in arr.iter().enumerate() {
                let sp = format!("{path}.anchors[{j}]");
                let so = sv.as_object().ok_or_else(|| SchemaError::new(&sp, "expected an object"))?;
                let from = index_field(so, "from", &format!("{sp}.from"))?;
                let to = index_field(so, "to", &format!("{sp}.to"))?;
                node.add_anchor(Span::new(from, to));
            }
        }
        slots[nid] = Some(node);
    }
    // ids are in range and unique, so every slot is filled
    let nodes: Vec<Node> = slots.into_iter().map(|n| n.expect("dense ids")).collect();

    let mut edges = Vec::with_capacity(edges_v.len());
    for (k, ev) in edges_v.iter().enumerate() {
        let path = format!("edges[{k}]");
        let eo = ev.as_object().ok_or_else(|| SchemaError::new(&path, "expected an object"))?;
        let source = index_field(eo, "source", &format!("{path}.source"))?;
        let target = index_field(eo, "target", &format!("{path}.target"))?;
        for (end, name) in [(source, "source"), (target, "target")] {
            if end >= nodes.len() {
                return Err(SchemaError::new(format!("{path}.{name}"), format!("no node {end}")));
            }
        }
        let label = optional_string(eo, "label", &format!("{path}.label"))?;
        edges.push((k, Edge { source, target, label }));
    }
    let mut tops = Vec::with_capacity(tops_v.len());
    for (j, tv) in tops_v.iter().enumerate() {
        tops.push(as_index(tv).ok_or_else(|| SchemaError::new(format!("tops[{j}]"), "expected a node id"))?);
    }

    let plain: Vec<Edge> = edges.iter().map(|(_, e)| e.clone()).collect();
    let mut g = match Drg::new(id.clone(), encoding.clone(), nodes, plain, tops.clone()) {
        Ok(g) => g,
        Err(GraphError::SelfLoop(n)) => {
            let k = edges.iter().find(|(_, e)| e.source == n && e.target == n).map_or(0, |(k, _)| *k);
            return Err(SchemaError::new(format!("edges[{k}]"), "self-loop"));
        }
        Err(GraphError::ParallelEdge { from, to, label }) => {
            let e = Edge { source: from, target: to, label };
            let k = edges.iter().filter(|(_, x)| *x == e).nth(1).map_or(0, |(k, _)| *k);
            return Err(SchemaError::new(format!("edges[{k}]"), "duplicate edge"));
        }
        Err(GraphError::MissingTop(t)) => {
            let j = tops.iter().position(|&x| x == t).unwrap_or(0);
            return Err(SchemaError::new(format!("tops[{j}]"), format!("no node {t}")));
        }
        Err(e) => return Err(SchemaError::new("", e.to_string())),
    };
    g.guess_kinds();
    Ok(GraphRecord { id, encoding, graph: Some(g), error: None })
}

fn string_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, SchemaError> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(SchemaError::new(path, "expected a string")),
        None => Err(SchemaError::new(path, "missing field")),
    }
}

fn optional_string(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<String>, SchemaError> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(SchemaError::new(path, "expected a string")),
    }
}

fn array_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Vec<Value>, SchemaError> {
    match obj.get(key) {
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(SchemaError::new(path, "expected an array")),
        None => Err(SchemaError::new(path, "missing field")),
    }
}

fn as_index(v: &Value) -> Option<usize> {
    v.as_u64().and_then(|n| usize::try_from(n).ok())
}

fn index_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize, SchemaError> {
    match obj.get(key) {
        Some(v) => as_index(v).ok_or_else(|| SchemaError::new(path, "expected a non-negative integer")),
        None => Err(SchemaError::new(path, "missing field")),
    }
}
