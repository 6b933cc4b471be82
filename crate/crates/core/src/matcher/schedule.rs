use serde::Serialize;

use crate::graph::Drg;

use super::{MatchOptions, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CandidatePair {
    pub sys: usize,
    pub gold: usize,
    pub score: u64,
}

/// Node pairs worth trying, best first, under the default item options.
pub fn schedule_candidates(sys: &Drg, gold: &Drg) -> Vec<CandidatePair> {
    schedule_candidates_with(sys, gold, &MatchOptions::default())
}

pub fn schedule_candidates_with(sys: &Drg, gold: &Drg, options: &MatchOptions) -> Vec<CandidatePair> {
    schedule(&Problem::new(sys, gold, options))
}

/// Score layers, most significant first: shared node features, shared
/// incident edge labels, equal kind, closeness of in/out degree.
pub(crate) fn schedule(p: &Problem) -> Vec<CandidatePair> {
    let degree = |adj: &[(usize, usize, bool)]| {
        let out = adj.iter().filter(|a| a.2).count() as i64;
        (adj.len() as i64 - out, out)
    };
    let mut pairs = Vec::new();
    for s in 0..p.ns {
        let (si, so) = degree(&p.sys_adj[s]);
        for g in 0..p.ng {
            let potential = p.potential(s, g) as u64;
            if potential == 0 {
                continue;
            }
            let shared = p.node_score(s, g) as u64;
            let (gi, go) = degree(&p.gold_adj[g]);
            let closeness = 9 - ((si - gi).abs() + (so - go).abs()).min(9) as u64;
            let kind = u64::from(p.sys_kind[s] == p.gold_kind[g]);
            let score = shared * 1_000_000 + (potential - shared) * 1_000 + kind * 10 + closeness;
            pairs.push(CandidatePair { sys: s, gold: g, score });
        }
    }
    pairs.sort_by(|a, b| b.score.cmp(&a.score).then(a.sys.cmp(&b.sys)).then(a.gold.cmp(&b.gold)));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node, NodeKind};

    fn node(id: usize, label: Option<&str>) -> Node {
        Node::new(id, label.map(str::to_string), NodeKind::Predicate)
    }

    #[test]
    fn identity_pairs_score_highest() {
        let g = Drg::new(
            "g",
            "x",
            vec![node(0, None), node(1, Some("a")), node(2, Some("b"))],
            vec![Edge::new(0, 1, Some("in")), Edge::new(1, 2, Some("a1"))],
            vec![0],
        )
        .unwrap();
        let pairs = schedule_candidates(&g, &g);
        for s in 0..3 {
            let best = pairs.iter().filter(|p| p.sys == s).max_by_key(|p| p.score).unwrap();
            assert_eq!(best.gold, s);
        }
    }

    #[test]
    fn nothing_shared_nothing_scheduled() {
        let a = Drg::new("a", "x", vec![node(0, Some("p")), node(1, Some("q"))], vec![Edge::new(0, 1, Some("in"))], vec![0]).unwrap();
        let b = Drg::new("b", "x", vec![node(0, Some("r")), node(1, Some("s"))], vec![Edge::new(1, 0, Some("Agent"))], vec![1]).unwrap();
        let opts = MatchOptions { tops: false, anchors: false };
        assert!(schedule_candidates_with(&a, &b, &opts).is_empty());
    }
}
