#![allow(dead_code)]

use drgkit::clausal_form::{parse_clf, ClausalDrs, Clause, Head, Term};
use drgkit::graph::{Drg, Edge, Node, NodeKind};
use drgkit::lattice::ConceptLattice;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const NODE_LABELS: [Option<&str>; 5] = [None, None, Some("a"), Some("b"), Some("c")];
const EDGE_LABELS: [Option<&str>; 4] = [None, Some("in"), Some("a1"), Some("a2")];

/// Connected graph: a random spanning tree plus a few extra edges.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Drg {
    let labels: Vec<Option<String>> = (0..n).map(|_| NODE_LABELS.choose(rng).unwrap().map(str::to_string)).collect();
    let mut edges: Vec<(usize, usize, Option<String>)> = Vec::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let l = EDGE_LABELS.choose(rng).unwrap().map(str::to_string);
        if rng.gen_bool(0.5) {
            edges.push((u, v, l));
        } else {
            edges.push((v, u, l));
        }
    }
    if n > 1 {
        for _ in 0..rng.gen_range(0..=n) {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let l = EDGE_LABELS.choose(rng).unwrap().map(str::to_string);
            if s != t && !edges.iter().any(|e| e.0 == s && e.1 == t && e.2 == l) {
                edges.push((s, t, l));
            }
        }
    }
    let tops = if n > 0 { vec![rng.gen_range(0..n)] } else { vec![] };
    build(labels, edges, tops)
}

pub fn build(labels: Vec<Option<String>>, edges: Vec<(usize, usize, Option<String>)>, tops: Vec<usize>) -> Drg {
    let nodes = labels.into_iter().enumerate().map(|(i, l)| Node::new(i, l, NodeKind::Predicate)).collect();
    let edges = edges.iter().map(|(s, t, l)| Edge::new(*s, *t, l.as_deref())).collect();
    let mut g = Drg::new("g", "test", nodes, edges, tops).unwrap();
    g.guess_kinds();
    g
}

pub fn parts(g: &Drg) -> (Vec<Option<String>>, Vec<(usize, usize, Option<String>)>, Vec<usize>) {
    (
        g.nodes().iter().map(|n| n.label.clone()).collect(),
        g.edges().iter().map(|e| (e.source, e.target, e.label.clone())).collect(),
        g.tops().to_vec(),
    )
}

/// The same graph with node ids permuted.
pub fn shuffled(rng: &mut ChaCha8Rng, g: &Drg) -> Drg {
    let n = g.nodes().len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let (labels, edges, tops) = parts(g);
    let mut new_labels = vec![None; n];
    for (old, l) in labels.into_iter().enumerate() {
        new_labels[perm[old]] = l;
    }
    build(
        new_labels,
        edges.into_iter().map(|(s, t, l)| (perm[s], perm[t], l)).collect(),
        tops.into_iter().map(|t| perm[t]).collect(),
    )
}

/// Relabels some nodes, drops some edges and adds some, keeping ids.
pub fn perturbed(rng: &mut ChaCha8Rng, g: &Drg) -> Drg {
    let (mut labels, mut edges, tops) = parts(g);
    let n = labels.len();
    for l in labels.iter_mut() {
        if rng.gen_bool(0.2) {
            *l = NODE_LABELS.choose(rng).unwrap().map(str::to_string);
        }
    }
    edges.retain(|_| rng.gen_bool(0.8));
    if n > 1 {
        for _ in 0..2 {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let l = EDGE_LABELS.choose(rng).unwrap().map(str::to_string);
            if s != t && !edges.iter().any(|e| e.0 == s && e.1 == t && e.2 == l) {
                edges.push((s, t, l));
            }
        }
    }
    build(labels, edges, tops)
}

/// Items preserved by a partial map from `a` into `b`, counted from the raw
/// graphs. Panics unless the map is injective.
pub fn recount(a: &Drg, b: &Drg, map: &[Option<usize>]) -> usize {
    let mut seen = std::collections::HashSet::new();
    assert!(map.iter().flatten().all(|g| seen.insert(*g)), "map is not injective");
    let mut n = 0;
    for (i, node) in a.nodes().iter().enumerate() {
        let Some(g) = map[i] else { continue };
        if node.label.is_some() && node.label == b.nodes()[g].label {
            n += 1;
        }
        if a.tops().contains(&i) && b.tops().contains(&g) {
            n += 1;
        }
    }
    for e in a.edges() {
        if let (Some(s), Some(t)) = (map[e.source], map[e.target]) {
            n += usize::from(b.edges().iter().any(|f| f.source == s && f.target == t && f.label == e.label));
        }
    }
    n
}

fn preserved(a: &Drg, b: &Drg, map: &[usize]) -> usize {
    let map: Vec<Option<usize>> = map.iter().copied().map(Some).collect();
    recount(a, b, &map)
}

fn permute(a: &Drg, b: &Drg, map: &mut Vec<usize>, used: &mut [bool], best: &mut usize) {
    if map.len() == a.nodes().len() {
        *best = (*best).max(preserved(a, b, map));
        return;
    }
    for g in 0..b.nodes().len() {
        if !used[g] {
            used[g] = true;
            map.push(g);
            permute(a, b, map, used, best);
            map.pop();
            used[g] = false;
        }
    }
}

/// Maximum preserved items over every injective map of the smaller graph
/// into the larger one. Preserved items only grow as a map is extended, so
/// total maps of the smaller graph cover every partial map.
pub fn brute_force(sys: &Drg, gold: &Drg) -> usize {
    let (a, b) = if sys.nodes().len() <= gold.nodes().len() { (sys, gold) } else { (gold, sys) };
    let mut best = 0;
    permute(a, b, &mut Vec::new(), &mut vec![false; b.nodes().len()], &mut best);
    best
}

/// Item total with tops on and anchors off.
pub fn items(g: &Drg) -> usize {
    g.nodes().iter().filter(|n| n.label.is_some()).count() + g.tops().len() + g.edges().len()
}

/// The bundled well-formed corpus. It includes the house-senate document and
/// the SZP fragment.
pub fn corpus() -> Vec<ClausalDrs> {
    parse_clf(include_str!("../../fixtures/corpus.clf")).unwrap()
}

/// The document with every concept clause except the most specific one per
/// referent removed, concept clauses moved to the referent's box.
pub fn most_specific_only(d: &ClausalDrs, lat: &ConceptLattice) -> ClausalDrs {
    let mut clauses: Vec<Clause> = d.clauses().iter().filter(|c| !matches!(c.head, Head::Concept(_))).cloned().collect();
    for r in d.referents() {
        if let Some(set) = d.concepts_of(r) {
            let symbols: Vec<String> = set.iter().map(|c| c.symbol()).collect();
            let best = lat.most_specific(symbols.iter().map(String::as_str)).unwrap();
            let c = set.iter().find(|c| c.symbol() == best).unwrap().clone();
            clauses.push(Clause::new(d.introducer(r).unwrap(), Head::Concept(c), vec![Term::Referent(r.to_string())]));
        }
    }
    ClausalDrs::new(d.doc_id(), None, clauses)
}
