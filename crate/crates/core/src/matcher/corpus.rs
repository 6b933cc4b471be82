use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::GraphRecord;

use super::{item_count, mces_with, MatchOptions, SearchBudget};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("DocIdMismatch: system documents without gold counterpart: {}", ids.join(", "))]
    DocIdMismatch { ids: Vec<String> },
    #[error("duplicate document id `{id}` in {side} graphs")]
    DuplicateId { id: String, side: &'static str },
    #[error("cannot start {workers} workers: {reason}")]
    Workers { workers: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DocScore {
    pub id: String,
    pub p: f64,
    pub r: f64,
    pub f1: f64,
    pub exact: bool,
    pub matched: usize,
    pub system_items: usize,
    pub gold_items: usize,
    /// Set when the system graph is missing or null.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusScore {
    pub macro_f1: f64,
    pub docs: Vec<DocScore>,
    pub approx_rate: f64,
    pub budget: SearchBudget,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoreConfig {
    pub budget: SearchBudget,
    pub seed: u64,
    pub options: MatchOptions,
    /// Documents scored concurrently; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig { budget: SearchBudget::default(), seed: 0, options: MatchOptions::default(), workers: None }
    }
}

fn index<'a>(records: &'a [GraphRecord], side: &'static str) -> Result<BTreeMap<&'a str, &'a GraphRecord>, ScoreError> {
    let mut map = BTreeMap::new();
    for r in records {
        if map.insert(r.id.as_str(), r).is_some() {
            return Err(ScoreError::DuplicateId { id: r.id.clone(), side });
        }
    }
    Ok(map)
}

/// Scores system graphs against gold graphs aligned by id. Gold documents
/// whose graph is null are left out; a missing or null system graph scores 0.
/// Documents are reported in gold order.
pub fn score_corpus(system: &[GraphRecord], gold: &[GraphRecord], config: &ScoreConfig) -> Result<CorpusScore, ScoreError> {
    let sys = index(system, "system")?;
    let gold_ids = index(gold, "gold")?;
    let stray: Vec<String> = sys.keys().filter(|id| !gold_ids.contains_key(*id)).map(|id| id.to_string()).collect();
    if !stray.is_empty() {
        return Err(ScoreError::DocIdMismatch { ids: stray });
    }

    let jobs: Vec<&GraphRecord> = gold.iter().filter(|g| g.graph.is_some()).collect();
    let score_one = |g: &&GraphRecord| -> (DocScore, bool) {
        let gold_graph = g.graph.as_ref().expect("filtered");
        let gold_items = item_count(gold_graph, &config.options);
        let missing = |note: String| DocScore {
            id: g.id.clone(),
            p: 0.0,
            r: 0.0,
            f1: 0.0,
            exact: true,
            matched: 0,
            system_items: 0,
            gold_items,
            note: Some(note),
        };
        match sys.get(g.id.as_str()) {
            None => (missing("missing system graph".into()), false),
            Some(s) => match &s.graph {
                None => (missing(format!("null system graph: {}", s.error.as_deref().unwrap_or("no reason given"))), false),
                Some(sg) => {
                    let m = mces_with(sg, gold_graph, &config.budget, config.seed, &config.options);
                    let doc = DocScore {
                        id: g.id.clone(),
                        p: m.precision,
                        r: m.recall,
                        f1: m.f1,
                        exact: m.exact,
                        matched: m.matched,
                        system_items: m.system_items,
                        gold_items: m.gold_items,
                        note: None,
                    };
                    (doc, true)
                }
            },
        }
    };
    let results: Vec<(DocScore, bool)> = match config.workers {
        Some(1) => jobs.iter().map(score_one).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ScoreError::Workers { workers: n, reason: e.to_string() })?
            .install(|| jobs.par_iter().map(score_one).collect()),
        None => jobs.par_iter().map(score_one).collect(),
    };

    let mut by_id: Vec<(&str, f64)> = results.iter().map(|(d, _)| (d.id.as_str(), d.f1)).collect();
    by_id.sort_by(|a, b| a.0.cmp(b.0));
    let macro_f1 = if by_id.is_empty() { 0.0 } else { by_id.iter().map(|(_, f)| f).sum::<f64>() / by_id.len() as f64 };
    let paired = results.iter().filter(|(_, both)| *both).count();
    let approximate = results.iter().filter(|(d, both)| *both && !d.exact).count();
    let approx_rate = if paired == 0 { 0.0 } else { approximate as f64 / paired as f64 };
    Ok(CorpusScore {
        macro_f1,
        docs: results.into_iter().map(|(d, _)| d).collect(),
        approx_rate,
        budget: config.budget,
        seed: config.seed,
    })
}
