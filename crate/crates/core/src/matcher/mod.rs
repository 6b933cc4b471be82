//! Graph scoring by maximum common edge subgraph.
//!
//! A graph is a multiset of items: one per node label, one per top, one per
//! anchor span (optional) and one per edge. A partial injective map from
//! system nodes to gold nodes preserves an item when its image is an item of
//! the gold graph. The matcher searches for the map preserving the most
//! items; precision and recall divide that count by the item totals.

mod clause;
mod corpus;
mod schedule;
mod search;

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Drg, NodeKind};

pub use clause::{clause_match, ClauseMatch};
pub use corpus::{score_corpus, CorpusScore, DocScore, ScoreConfig, ScoreError};
pub use schedule::{schedule_candidates, schedule_candidates_with, CandidatePair};
pub use search::{mces, mces_with};

/// Which items besides labels and edges earn credit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchOptions {
    pub tops: bool,
    pub anchors: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        MatchOptions { tops: true, anchors: false }
    }
}

/// Limits on the exact search. When any is hit, the best map found so far is
/// returned with `exact = false`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    /// Candidate pairs used to build the greedy starting map.
    pub max_candidate_pairs: usize,
    /// Search-tree nodes (one per tentative assignment).
    pub max_expansions: u64,
    /// Wall-clock limit. Results under a clock limit are not reproducible.
    pub wall_clock_ms: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_candidate_pairs: 10_000, max_expansions: 500_000, wall_clock_ms: None }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("budget field `{0}` must be positive")]
pub struct InvalidBudget(pub &'static str);

impl SearchBudget {
    pub fn new(max_candidate_pairs: usize, max_expansions: u64, wall_clock_ms: Option<u64>) -> Result<Self, InvalidBudget> {
        if max_candidate_pairs == 0 {
            return Err(InvalidBudget("max_candidate_pairs"));
        }
        if max_expansions == 0 {
            return Err(InvalidBudget("max_expansions"));
        }
        if wall_clock_ms == Some(0) {
            return Err(InvalidBudget("wall_clock_ms"));
        }
        Ok(SearchBudget { max_candidate_pairs, max_expansions, wall_clock_ms })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    /// `mapping[s]` is the gold node matched to system node `s`.
    pub mapping: Vec<Option<usize>>,
    pub matched: usize,
    pub system_items: usize,
    pub gold_items: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// The search finished within budget, so `matched` is maximal.
    pub exact: bool,
    pub expansions: u64,
}

/// Precision, recall and F1 from counts. Two empty graphs score 1.0.
pub fn prf(matched: usize, system_items: usize, gold_items: usize) -> (f64, f64, f64) {
    if system_items == 0 && gold_items == 0 {
        return (1.0, 1.0, 1.0);
    }
    let p = if system_items == 0 { 0.0 } else { matched as f64 / system_items as f64 };
    let r = if gold_items == 0 { 0.0 } else { matched as f64 / gold_items as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

/// Number of items of a graph.
pub fn item_count(g: &Drg, options: &MatchOptions) -> usize {
    let tops = if options.tops { g.tops().len() } else { 0 };
    let anchors = if options.anchors { g.nodes().iter().map(|n| n.anchors.len()).sum() } else { 0 };
    g.nodes().iter().filter(|n| n.label.is_some()).count() + tops + anchors + g.edges().len()
}

/// Both graphs flattened to integer features and labeled edges.
pub(crate) struct Problem {
    pub ns: usize,
    pub ng: usize,
    pub sys_kind: Vec<NodeKind>,
    pub gold_kind: Vec<NodeKind>,
    pub sys_feats: Vec<Vec<u32>>,
    pub gold_feats: Vec<Vec<u32>>,
    pub n_feats: usize,
    pub n_labels: usize,
    pub sys_edges: Vec<(usize, usize, u32)>,
    pub gold_edges: Vec<(usize, usize, u32)>,
    pub gold_edge_set: HashSet<(usize, usize, u32)>,
    /// Per node: (edge index, other endpoint, node is the source).
    pub sys_adj: Vec<Vec<(usize, usize, bool)>>,
    pub gold_adj: Vec<Vec<(usize, usize, bool)>>,
    /// `node_score[s * ng + g]`: features shared by `s` and `g`.
    pub node_score: Vec<u32>,
    /// Upper bound on the items `s -> g` can ever contribute.
    pub potential: Vec<u32>,
    pub sys_items: usize,
    pub gold_items: usize,
}

impl Problem {
    pub fn new(sys: &Drg, gold: &Drg, options: &MatchOptions) -> Self {
        let mut feat_ids: HashMap<String, u32> = HashMap::new();
        let mut label_ids: HashMap<Option<String>, u32> = HashMap::new();
        let mut features = |g: &Drg| -> Vec<Vec<u32>> {
            g.nodes()
                .iter()
                .map(|n| {
                    let mut keys = Vec::new();
                    if let Some(l) = &n.label {
                        keys.push(format!("label\t{l}"));
                    }
                    if options.tops && g.tops().contains(&n.id) {
                        keys.push("top".to_string());
                    }
                    if options.anchors {
                        keys.extend(n.anchors.iter().map(|a| format!("anchor\t{a}")));
                    }
                    let mut ids: Vec<u32> = keys
                        .into_iter()
                        .map(|k| {
                            let next = feat_ids.len() as u32;
                            *feat_ids.entry(k).or_insert(next)
                        })
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    ids
                })
                .collect()
        };
        let sys_feats = features(sys);
        let gold_feats = features(gold);
        let mut edges = |g: &Drg| -> Vec<(usize, usize, u32)> {
            g.edges()
                .iter()
                .map(|e| {
                    let next = label_ids.len() as u32;
                    (e.source, e.target, *label_ids.entry(e.label.clone()).or_insert(next))
                })
                .collect()
        };
        let sys_edges = edges(sys);
        let gold_edges = edges(gold);
        let n_labels = label_ids.len();
        let n_feats = feat_ids.len();
        let (ns, ng) = (sys.nodes().len(), gold.nodes().len());

        let adj = |n: usize, es: &[(usize, usize, u32)]| {
            let mut adj = vec![Vec::new(); n];
            for (i, &(s, t, _)) in es.iter().enumerate() {
                adj[s].push((i, t, true));
                adj[t].push((i, s, false));
            }
            adj
        };
        let sys_adj = adj(ns, &sys_edges);
        let gold_adj = adj(ng, &gold_edges);

        let profile = |adj: &[(usize, usize, bool)], es: &[(usize, usize, u32)]| {
            let mut p: Vec<(bool, u32)> = adj.iter().map(|&(i, _, out)| (out, es[i].2)).collect();
            p.sort_unstable();
            p
        };
        let sys_prof: Vec<_> = sys_adj.iter().map(|a| profile(a, &sys_edges)).collect();
        let gold_prof: Vec<_> = gold_adj.iter().map(|a| profile(a, &gold_edges)).collect();

        let mut node_score = vec![0u32; ns * ng];
        let mut potential = vec![0u32; ns * ng];
        for s in 0..ns {
            for g in 0..ng {
                let shared = sorted_overlap(&sys_feats[s], &gold_feats[g]);
                node_score[s * ng + g] = shared;
                potential[s * ng + g] = shared + sorted_overlap(&sys_prof[s], &gold_prof[g]);
            }
        }
        let sys_items = sys_feats.iter().map(Vec::len).sum::<usize>() + sys_edges.len();
        let gold_items = gold_feats.iter().map(Vec::len).sum::<usize>() + gold_edges.len();
        Problem {
            ns,
            ng,
            sys_kind: sys.nodes().iter().map(|n| n.kind).collect(),
            gold_kind: gold.nodes().iter().map(|n| n.kind).collect(),
            sys_feats,
            gold_feats,
            n_feats,
            n_labels,
            gold_edge_set: gold_edges.iter().copied().collect(),
            sys_edges,
            gold_edges,
            sys_adj,
            gold_adj,
            node_score,
            potential,
            sys_items,
            gold_items,
        }
    }

    pub fn node_score(&self, s: usize, g: usize) -> u32 {
        self.node_score[s * self.ng + g]
    }

    pub fn potential(&self, s: usize, g: usize) -> u32 {
        self.potential[s * self.ng + g]
    }

    /// Items preserved by a complete or partial map.
    pub fn matched(&self, mapping: &[Option<usize>]) -> usize {
        let nodes: u32 = mapping.iter().enumerate().filter_map(|(s, m)| m.map(|g| self.node_score(s, g))).sum();
        let edges = self
            .sys_edges
            .iter()
            .filter(|&&(s, t, l)| match (mapping[s], mapping[t]) {
                (Some(a), Some(b)) => self.gold_edge_set.contains(&(a, b, l)),
                _ => false,
            })
            .count();
        nodes as usize + edges
    }
}

/// Size of the multiset intersection of two sorted slices.
fn sorted_overlap<T: Ord>(a: &[T], b: &[T]) -> u32 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}
