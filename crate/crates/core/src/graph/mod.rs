//! Discourse representation graphs: a directed graph with optionally labeled
//! nodes and edges, plus a list of top nodes.

mod dot;
mod interchange;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::clausal_form::Span;

pub use dot::to_dot;
pub use interchange::{from_interchange, null_record, read_record, to_interchange, GraphRecord, SchemaError};

/// What a node stands for. Used by the matcher's scheduling and by the dot
/// renderer; it is not part of a node's identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Box,
    Referent,
    Constant,
    Predicate,
    Reified,
}

#[derive(Debug, Clone, Eq)]
pub struct Node {
    pub id: usize,
    pub label: Option<String>,
    pub kind: NodeKind,
    /// Sorted and deduplicated.
    pub anchors: Vec<Span>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.label == other.label && self.anchors == other.anchors
    }
}

impl Node {
    pub fn new(id: usize, label: Option<String>, kind: NodeKind) -> Self {
        Node { id, label, kind, anchors: Vec::new() }
    }

    pub fn add_anchor(&mut self, span: Span) {
        if let Err(pos) = self.anchors.binary_search(&span) {
            self.anchors.insert(pos, span);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: Option<String>,
}

impl Edge {
    pub fn new(source: usize, target: usize, label: Option<&str>) -> Self {
        Edge { source, target, label: label.map(str::to_string) }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node at position {position} has id {id}")]
    NonDenseId { position: usize, id: usize },
    #[error("edge {from}->{to} refers to a missing node")]
    MissingEndpoint { from: usize, to: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("parallel edge {from}->{to} ({label:?})")]
    ParallelEdge { from: usize, to: usize, label: Option<String> },
    #[error("top {0} is not a node")]
    MissingTop(usize),
    #[error("constant node {0} has no label")]
    UnlabeledConstant(usize),
}

/// A validated graph. Edges are kept sorted by (source, target, label) and
/// tops sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Drg {
    id: String,
    encoding: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    tops: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    pub labeled_node_count: usize,
    pub unlabeled_node_count: usize,
    pub labeled_edge_count: usize,
}

impl Drg {
    pub fn new(
        id: impl Into<String>,
        encoding: impl Into<String>,
        nodes: Vec<Node>,
        mut edges: Vec<Edge>,
        mut tops: Vec<usize>,
    ) -> Result<Self, GraphError> {
        for (position, n) in nodes.iter().enumerate() {
            if n.id != position {
                return Err(GraphError::NonDenseId { position, id: n.id });
            }
            if n.kind == NodeKind::Constant && n.label.is_none() {
                return Err(GraphError::UnlabeledConstant(n.id));
            }
        }
        edges.sort();
        for (i, e) in edges.iter().enumerate() {
            if e.source >= nodes.len() || e.target >= nodes.len() {
                return Err(GraphError::MissingEndpoint { from: e.source, to: e.target });
            }
            if e.source == e.target {
                return Err(GraphError::SelfLoop(e.source));
            }
            if i > 0 && edges[i - 1] == *e {
                return Err(GraphError::ParallelEdge { from: e.source, to: e.target, label: e.label.clone() });
            }
        }
        tops.sort_unstable();
        tops.dedup();
        if let Some(&t) = tops.iter().find(|&&t| t >= nodes.len()) {
            return Err(GraphError::MissingTop(t));
        }
        Ok(Drg { id: id.into(), encoding: encoding.into(), nodes, edges, tops })
    }

    pub fn empty(id: impl Into<String>, encoding: impl Into<String>) -> Self {
        Drg { id: id.into(), encoding: encoding.into(), nodes: Vec::new(), edges: Vec::new(), tops: Vec::new() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn encoding(&self) -> &str {
        &self.encoding
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tops(&self) -> &[usize] {
        &self.tops
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }

    /// Replaces node kinds; the graph's identity is unaffected.
    pub fn set_kinds(&mut self, kinds: impl IntoIterator<Item = NodeKind>) {
        for (n, k) in self.nodes.iter_mut().zip(kinds) {
            n.kind = k;
        }
    }

    pub fn outgoing(&self, id: usize) -> impl Iterator<Item = &Edge> {
        // edges are sorted by source
        let start = self.edges.partition_point(|e| e.source < id);
        self.edges[start..].iter().take_while(move |e| e.source == id)
    }

    pub fn incoming(&self, id: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.target == id)
    }

    pub fn stats(&self) -> GraphStats {
        let labeled_node_count = self.nodes.iter().filter(|n| n.label.is_some()).count();
        GraphStats {
            node_count: self.nodes.len(),
            edge_count: self.edges.len(),
            labeled_node_count,
            unlabeled_node_count: self.nodes.len() - labeled_node_count,
            labeled_edge_count: self.edges.iter().filter(|e| e.label.is_some()).count(),
        }
    }

    /// True when the underlying undirected graph is connected (the empty
    /// graph counts as connected).
    pub fn is_weakly_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            adj[e.source].push(e.target);
            adj[e.target].push(e.source);
        }
        let mut seen = BTreeSet::from([0]);
        let mut stack = vec![0];
        while let Some(n) = stack.pop() {
            for &m in &adj[n] {
                if seen.insert(m) {
                    stack.push(m);
                }
            }
        }
        seen.len() == self.nodes.len()
    }

    /// Best-effort kinds for graphs read from files, where kinds are not
    /// stored.
    pub fn guess_kinds(&mut self) {
        let kinds: Vec<NodeKind> = (0..self.nodes.len())
            .map(|i| {
                let n = &self.nodes[i];
                match &n.label {
                    Some(l) if l.starts_with('"') => NodeKind::Constant,
                    Some(_) => NodeKind::Predicate,
                    None => {
                        let out: Vec<_> = self.outgoing(i).filter_map(|e| e.label.as_deref()).collect();
                        if out.contains(&"a1") {
                            NodeKind::Reified
                        } else if out.iter().any(|l| matches!(*l, "in" | "referent" | "condition")) {
                            NodeKind::Referent
                        } else {
                            NodeKind::Box
                        }
                    }
                }
            })
            .collect();
        self.set_kinds(kinds);
    }
}
