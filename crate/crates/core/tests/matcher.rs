mod common;

use std::time::Instant;

use common::{brute_force, build, items, parts, perturbed, random_graph, recount, shuffled};
use drgkit::clausal_form::parse_clf;
use drgkit::encoder::{encode, EncodingSpec};
use drgkit::graph::{Drg, GraphRecord};
use drgkit::lattice::ConceptLattice;
use drgkit::matcher::{mces, schedule_candidates, score_corpus, ScoreConfig, ScoreError, SearchBudget};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair(rng: &mut ChaCha8Rng, max_nodes: usize) -> (Drg, Drg) {
    let a = { let n = rng.gen_range(1..=max_nodes); random_graph(rng, n) };
    let b = match rng.gen_range(0..3) {
        0 => { let n = rng.gen_range(1..=max_nodes); random_graph(rng, n) },
        1 => shuffled(rng, &a),
        _ => {
            let p = perturbed(rng, &a);
            shuffled(rng, &p)
        }
    };
    (a, b)
}

#[test]
fn exact_search_agrees_with_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let start = Instant::now();
    for i in 0..200 {
        let (a, b) = pair(&mut rng, 8);
        let r = mces(&a, &b, &SearchBudget::default(), 0);
        assert!(r.exact, "pair {i}");
        assert_eq!(r.matched, brute_force(&a, &b), "pair {i}");
        assert_eq!((r.system_items, r.gold_items), (items(&a), items(&b)));
    }
    assert!(start.elapsed().as_secs() < 60);
}

/// Pairs whose optimum is known: a shuffled copy (every item), a shuffled
/// subgraph (every system item), or a small gold graph the brute-force oracle
/// can enumerate.
fn checkable_pair(rng: &mut ChaCha8Rng, kind: usize) -> (Drg, Drg, usize) {
    let a = random_graph(rng, 12);
    match kind {
        0 => {
            let b = shuffled(rng, &a);
            let n = items(&a);
            (a, b, n)
        }
        1 => {
            let (mut labels, mut edges, tops) = parts(&a);
            edges.retain(|_| rng.gen_bool(0.7));
            for l in labels.iter_mut() {
                if rng.gen_bool(0.3) {
                    *l = None;
                }
            }
            let sub = build(labels, edges, tops);
            let b = shuffled(rng, &a);
            let n = items(&sub);
            (sub, b, n)
        }
        _ => {
            let n = rng.gen_range(2..=6);
            let b = random_graph(rng, n);
            let best = brute_force(&a, &b);
            (a, b, best)
        }
    }
}

#[test]
fn truncated_search_never_overshoots() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let budget = SearchBudget::new(10_000, 100, None).unwrap();
    let mut truncated = 0;
    for i in 0..60 {
        let (a, b, truth) = checkable_pair(&mut rng, i % 3);
        let r = mces(&a, &b, &budget, 0);
        assert!(r.matched <= truth, "pair {i}");
        assert_eq!(r.matched, recount(&a, &b, &r.mapping), "pair {i}");
        assert!(r.expansions <= 100);
        if r.exact {
            assert_eq!(r.matched, truth, "pair {i}");
        } else {
            truncated += 1;
        }
    }
    assert!(truncated > 0);
}

#[test]
fn symmetric_when_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let (a, b) = pair(&mut rng, 8);
        let ab = mces(&a, &b, &SearchBudget::default(), 0);
        let ba = mces(&b, &a, &SearchBudget::default(), 0);
        assert!(ab.exact && ba.exact);
        assert_eq!(ab.matched, ba.matched);
    }
}

#[test]
fn more_budget_never_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (a, b) = pair(&mut rng, 12);
        let mut last = 0;
        for exp in [1, 3, 10, 30, 100, 1_000, 10_000, 500_000] {
            let m = mces(&a, &b, &SearchBudget::new(10_000, exp, None).unwrap(), 5).matched;
            assert!(m >= last, "expansions {exp}");
            last = m;
        }
        let mut last = 0;
        for pairs in [1, 2, 5, 20, 100, 10_000] {
            let m = mces(&a, &b, &SearchBudget::new(pairs, 20, None).unwrap(), 5).matched;
            assert!(m >= last, "pairs {pairs}");
            last = m;
        }
    }
}

#[test]
fn deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (a, b) = pair(&mut rng, 12);
        let budget = SearchBudget::new(50, 40, None).unwrap();
        assert_eq!(mces(&a, &b, &budget, 3), mces(&a, &b, &budget, 3));
    }
}

#[test]
fn renaming_node_ids_keeps_f1() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let (a, b) = pair(&mut rng, 8);
        let before = mces(&a, &b, &SearchBudget::default(), 0).f1;
        let after = mces(&shuffled(&mut rng, &a), &shuffled(&mut rng, &b), &SearchBudget::default(), 0).f1;
        assert_eq!(before, after);
    }
}

#[test]
fn relabeled_concept_still_scheduled_against_its_counterpart() {
    let lat = ConceptLattice::bundled();
    let doc = parse_clf(include_str!("../fixtures/house_senate.clf")).unwrap().remove(0);
    let g = encode(&doc, &EncodingSpec::from_name("fork-bnode-cref").unwrap(), &lat).unwrap();
    let (mut labels, edges, tops) = parts(&g);
    let target = labels.iter().position(|l| l.as_deref().is_some_and(|l| l.contains(".n."))).unwrap();
    labels[target] = Some("elephant.n.01".into());
    let h = build(labels, edges, tops);
    let pairs = schedule_candidates(&g, &h);
    for s in 0..g.nodes().len() {
        assert!(pairs.iter().any(|p| p.sys == s && p.gold == s), "node {s}");
    }
    let top = pairs.iter().filter(|p| p.sys == target).map(|p| p.score).max().unwrap();
    assert!(pairs.iter().any(|p| p.sys == target && p.gold == target && p.score == top));
}

fn record(id: &str, graph: Option<Drg>) -> GraphRecord {
    let error = graph.is_none().then(|| "failed".to_string());
    GraphRecord { id: id.into(), encoding: "test".into(), graph, error }
}

fn corpus(rng: &mut ChaCha8Rng, n: usize) -> Vec<GraphRecord> {
    (0..n).map(|i| record(&format!("d{i}"), Some({ let n = rng.gen_range(2..=8); random_graph(rng, n) }))).collect()
}

#[test]
fn self_score_is_perfect() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let gold = corpus(&mut rng, 10);
    let s = score_corpus(&gold, &gold, &ScoreConfig::default()).unwrap();
    assert_eq!(s.macro_f1, 1.0);
    assert_eq!(s.approx_rate, 0.0);
    assert_eq!(s.docs.len(), 10);
}

#[test]
fn missing_and_null_system_graphs_score_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let gold = corpus(&mut rng, 2);
    let only_first = vec![gold[0].clone()];
    let s = score_corpus(&only_first, &gold, &ScoreConfig::default()).unwrap();
    assert_eq!(s.macro_f1, 0.5);
    let with_null = vec![gold[0].clone(), record("d1", None)];
    assert_eq!(score_corpus(&with_null, &gold, &ScoreConfig::default()).unwrap().macro_f1, 0.5);
}

#[test]
fn null_gold_documents_are_left_out() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut gold = corpus(&mut rng, 3);
    let system = gold.clone();
    gold[1] = record("d1", None);
    let s = score_corpus(&system, &gold, &ScoreConfig::default()).unwrap();
    assert_eq!(s.docs.len(), 2);
    assert_eq!(s.macro_f1, 1.0);
}

#[test]
fn unknown_system_ids_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let gold = corpus(&mut rng, 2);
    let mut system = gold.clone();
    system.push(record("stray", Some(random_graph(&mut rng, 3))));
    assert_eq!(score_corpus(&system, &gold, &ScoreConfig::default()), Err(ScoreError::DocIdMismatch { ids: vec!["stray".into()] }));
}

#[test]
fn perturbed_corpus_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let gold = corpus(&mut rng, 12);
    let system: Vec<GraphRecord> = gold
        .iter()
        .map(|r| {
            let g = r.graph.as_ref().unwrap();
            let (labels, mut edges, tops) = parts(g);
            edges.remove(rng.gen_range(0..edges.len()));
            record(&r.id, Some(build(labels, edges, tops)))
        })
        .collect();
    let s = score_corpus(&system, &gold, &ScoreConfig::default()).unwrap();
    assert!(s.macro_f1 > 0.0 && s.macro_f1 < 1.0);
    for (d, (sys, gold)) in s.docs.iter().zip(system.iter().zip(&gold)) {
        assert_eq!(d.matched, brute_force(sys.graph.as_ref().unwrap(), gold.graph.as_ref().unwrap()));
    }
}

#[test]
fn document_order_does_not_change_the_score() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let gold = corpus(&mut rng, 15);
    let system: Vec<GraphRecord> =
        gold.iter().map(|r| record(&r.id, Some(perturbed(&mut rng, r.graph.as_ref().unwrap())))).collect();
    let config = ScoreConfig { workers: Some(3), ..ScoreConfig::default() };
    let base = score_corpus(&system, &gold, &config).unwrap().macro_f1;
    for _ in 0..5 {
        let (mut s, mut g) = (system.clone(), gold.clone());
        s.shuffle(&mut rng);
        g.shuffle(&mut rng);
        assert_eq!(score_corpus(&s, &g, &config).unwrap().macro_f1.to_bits(), base.to_bits());
    }
}
