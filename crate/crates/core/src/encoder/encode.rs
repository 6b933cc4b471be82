use std::collections::{BTreeSet, HashMap};

use super::{ArgStyle, BinaryStyle, ConceptStyle, EncodeError, EncodingSpec, Membership};
use crate::clausal_form::{validate, ClausalDrs, Clause, Concept, Head, Span, Term};
use crate::graph::{Drg, Edge, Node, NodeKind};
use crate::lattice::ConceptLattice;

struct Builder {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

impl Builder {
    fn node(&mut self, label: Option<String>, kind: NodeKind) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::new(id, label, kind));
        id
    }

    fn edge(&mut self, source: usize, target: usize, label: Option<&str>) {
        self.edges.push(Edge::new(source, target, label));
    }

    fn anchor(&mut self, node: usize, span: Option<Span>) {
        if let Some(s) = span {
            self.nodes[node].add_anchor(s);
        }
    }
}

/// Picks the most specific concept of every referent that has concepts.
fn referent_concepts(drs: &ClausalDrs, lattice: &ConceptLattice) -> Result<HashMap<String, Concept>, EncodeError> {
    let mut chosen = HashMap::new();
    for r in drs.referents() {
        let Some(set) = drs.concepts_of(r) else { continue };
        let symbols: Vec<String> = set.iter().map(Concept::symbol).collect();
        match lattice.most_specific(symbols.iter().map(String::as_str)) {
            Ok(best) => {
                let c = set.iter().find(|c| c.symbol() == best).expect("minimum is a member").clone();
                chosen.insert(r.to_string(), c);
            }
            Err(e) => {
                return Err(EncodeError::NoMostSpecificConcept {
                    doc_id: drs.doc_id().to_string(),
                    referent: r.to_string(),
                    concepts: e.concepts,
                })
            }
        }
    }
    Ok(chosen)
}

/// Builds the graph of a well-formed DRS under `spec`.
pub fn encode(drs: &ClausalDrs, spec: &EncodingSpec, lattice: &ConceptLattice) -> Result<Drg, EncodeError> {
    let issues = validate(drs);
    if !issues.is_empty() {
        return Err(EncodeError::IllFormedInput { doc_id: drs.doc_id().to_string(), issues });
    }
    let on_referent = spec.concept() == ConceptStyle::OnReferent;
    let chosen = if on_referent { referent_concepts(drs, lattice)? } else { HashMap::new() };

    let mut g = Builder { nodes: Vec::new(), edges: Vec::new() };
    let mut box_id = HashMap::new();
    for b in drs.boxes() {
        box_id.insert(b, g.node(None, NodeKind::Box));
    }
    let mut ref_id = HashMap::new();
    for r in drs.referents() {
        let label = chosen.get(r).map(Concept::symbol);
        ref_id.insert(r, g.node(label, NodeKind::Referent));
    }
    // (clause index, argument index) -> constant node
    let mut const_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut shared: HashMap<&str, usize> = HashMap::new();
    for (ci, c) in drs.clauses().iter().enumerate() {
        for (ai, a) in c.args.iter().enumerate() {
            if let Term::Constant(v) = a {
                let id = if spec.per_occurrence_constants() {
                    g.node(Some(format!("\"{v}\"")), NodeKind::Constant)
                } else {
                    *shared.entry(v.as_str()).or_insert_with(|| g.node(Some(format!("\"{v}\"")), NodeKind::Constant))
                };
                const_id.insert((ci, ai), id);
            }
        }
    }
    let term_node = |ci: usize, ai: usize, t: &Term| -> usize {
        match t {
            Term::BoxLabel(b) => box_id[b.as_str()],
            Term::Referent(r) => ref_id[r.as_str()],
            Term::Constant(_) => const_id[&(ci, ai)],
        }
    };

    let referent_label = spec.referent_label();
    let condition_label = spec.condition_label();
    for (ci, c) in drs.clauses().iter().enumerate() {
        let b = box_id[c.box_label.as_str()];
        for (ai, a) in c.args.iter().enumerate() {
            if matches!(a, Term::Constant(_)) {
                g.anchor(term_node(ci, ai, a), c.anchor);
            }
        }
        match &c.head {
            Head::Ref => {
                let x = term_node(ci, 0, &c.args[0]);
                g.edge(x, b, Some(referent_label));
                g.anchor(x, c.anchor);
            }
            Head::Concept(con) => {
                let x = term_node(ci, 0, &c.args[0]);
                let sym = con.symbol();
                match spec.concept() {
                    ConceptStyle::AsLabeledNode => {
                        let n = g.node(Some(sym), NodeKind::Predicate);
                        g.edge(n, x, Some("a1"));
                        g.edge(n, b, Some(condition_label));
                        g.anchor(n, c.anchor);
                    }
                    ConceptStyle::AsReified => {
                        let n = g.node(None, NodeKind::Reified);
                        g.edge(b, n, Some(&sym));
                        g.edge(n, x, Some("a1"));
                        g.anchor(n, c.anchor);
                    }
                    ConceptStyle::AsEdge => g.edge(b, x, Some(&sym)),
                    ConceptStyle::OnReferent => {
                        let r = c.args[0].as_referent().expect("concept argument is a referent");
                        if chosen.get(r) == Some(con) {
                            g.anchor(x, c.anchor);
                        }
                    }
                }
            }
            Head::Role(label) | Head::Comparison(label) => {
                let a1 = term_node(ci, 0, &c.args[0]);
                let a2 = term_node(ci, 1, &c.args[1]);
                let p = match spec.binary() {
                    BinaryStyle::AsLabeledNode => {
                        let p = g.node(Some(label.clone()), NodeKind::Predicate);
                        if !implied_membership(drs, c, spec) {
                            g.edge(p, b, Some(condition_label));
                        }
                        p
                    }
                    BinaryStyle::AsReified => {
                        let p = g.node(None, NodeKind::Reified);
                        g.edge(b, p, Some(label));
                        p
                    }
                };
                match spec.args() {
                    ArgStyle::Fork => {
                        g.edge(p, a1, Some("a1"));
                        g.edge(p, a2, Some("a2"));
                    }
                    ArgStyle::Chain => {
                        g.edge(a1, p, None);
                        g.edge(p, a2, None);
                    }
                    ArgStyle::ChainLabeled => {
                        g.edge(a1, p, Some("a1"));
                        g.edge(p, a2, Some("a2"));
                    }
                }
                g.anchor(p, c.anchor);
            }
            Head::Operator(label) | Head::Relation(label) => {
                let target = term_node(ci, 0, &c.args[0]);
                g.edge(b, target, Some(label));
                g.anchor(b, c.anchor);
            }
        }
    }

    let tops = tops(drs, &box_id);
    Ok(Drg::new(drs.doc_id(), spec.name(), g.nodes, g.edges, tops).expect("well-formed DRSs give valid graphs"))
}

/// Under implicit membership, a binary predicate's box edge is left out when
/// the box is the one introducing its first argument.
pub(super) fn implied_membership(drs: &ClausalDrs, c: &Clause, spec: &EncodingSpec) -> bool {
    spec.membership() == Membership::ImplicitA1
        && c.args.first().and_then(Term::as_referent).and_then(|r| drs.introducer(r)) == Some(c.box_label.as_str())
}

/// Boxes that no other box dominates. A connective `b R c` puts `b` above
/// `c`, except presupposition, where the presupposed box `c` is above the
/// box `b` that depends on it. Boxes used as predicate arguments are below
/// their predicate's box.
fn tops(drs: &ClausalDrs, box_id: &HashMap<&str, usize>) -> Vec<usize> {
    let mut dominated = BTreeSet::new();
    for c in drs.clauses() {
        match &c.head {
            Head::Operator(op) if op == "PRESUPPOSITION" || op == "PRP" => {
                dominated.insert(c.box_label.as_str());
            }
            Head::Operator(_) | Head::Relation(_) => {
                if let Some(b) = c.args[0].as_box() {
                    dominated.insert(b);
                }
            }
            Head::Role(_) | Head::Comparison(_) => {
                dominated.extend(c.args.iter().filter_map(Term::as_box));
            }
            _ => {}
        }
    }
    let boxes = drs.boxes();
    let mut tops: Vec<usize> = boxes.iter().filter(|b| !dominated.contains(*b)).map(|b| box_id[b]).collect();
    if tops.is_empty() {
        tops.extend(boxes.first().map(|b| box_id[b]));
    }
    tops
}

/// Relative edge saving of encoding `b` over encoding `a` on one document.
pub fn edge_reduction(
    drs: &ClausalDrs,
    a: &EncodingSpec,
    b: &EncodingSpec,
    lattice: &ConceptLattice,
) -> Result<f64, EncodeError> {
    let ea = encode(drs, a, lattice)?.stats().edge_count;
    let eb = encode(drs, b, lattice)?.stats().edge_count;
    if ea == 0 {
        return Ok(0.0);
    }
    Ok((ea as f64 - eb as f64) / ea as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal_form::parse_clf;
    use crate::graph::to_interchange;

    fn doc(text: &str) -> ClausalDrs {
        parse_clf(text).unwrap().remove(0)
    }

    fn spec(name: &str) -> EncodingSpec {
        EncodingSpec::from_name(name).unwrap()
    }

    fn labels(g: &Drg) -> Vec<(Option<&str>, Option<&str>, Option<&str>)> {
        g.edges()
            .iter()
            .map(|e| (g.node(e.source).label.as_deref(), e.label.as_deref(), g.node(e.target).label.as_deref()))
            .collect()
    }

    #[test]
    fn name_fragment_implicit() {
        let d = doc("b1 REF x1\nb1 Name x1 \"house\"\nb1 house \"n.05\" x1\n");
        let g = encode(&d, &spec("chain-bnode-cref-implicit"), &ConceptLattice::empty()).unwrap();
        let nodes: Vec<_> = g.nodes().iter().map(|n| (n.label.as_deref(), n.kind)).collect();
        assert_eq!(
            nodes,
            [
                (None, NodeKind::Box),
                (Some("house.n.05"), NodeKind::Referent),
                (Some("\"house\""), NodeKind::Constant),
                (Some("Name"), NodeKind::Predicate),
            ]
        );
        let mut e = labels(&g);
        e.sort();
        assert_eq!(
            e,
            [
                (Some("Name"), None, Some("\"house\"")),
                (Some("house.n.05"), None, Some("Name")),
                (Some("house.n.05"), Some("in"), None),
            ]
        );
        let s = g.stats();
        assert_eq!((s.node_count, s.edge_count), (4, 3));
    }

    #[test]
    fn szp_keeps_its_box_edge() {
        let d = doc(include_str!("../../fixtures/szp.clf"));
        let g = encode(&d, &spec("chain-bnode-cref-implicit"), &ConceptLattice::bundled()).unwrap();
        let szp = g.nodes().iter().position(|n| n.label.as_deref() == Some("SZP")).unwrap();
        let outs: Vec<_> = g.outgoing(szp).map(|e| e.label.as_deref()).collect();
        assert!(outs.contains(&Some("in")));
        let in_target = g.outgoing(szp).find(|e| e.label.as_deref() == Some("in")).unwrap().target;
        // b2 is the first box mentioned
        assert_eq!(in_target, 0);
        // Location e1 x3 lives in b2, which introduces e1: no box edge
        let loc = g.nodes().iter().position(|n| n.label.as_deref() == Some("Location")).unwrap();
        assert!(g.outgoing(loc).all(|e| e.label.is_none()));
    }

    #[test]
    fn house_senate_labeled_concept_node() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let g = encode(&d, &spec("fork-bnode-cnode"), &ConceptLattice::bundled()).unwrap();
        let house = g.nodes().iter().position(|n| n.label.as_deref() == Some("house.n.05")).unwrap();
        let outs: Vec<_> = g.outgoing(house).map(|e| (e.label.as_deref(), e.target)).collect();
        // b1 is node 0, x1 is the first referent
        let x1 = d.boxes().len();
        assert_eq!(outs, [(Some("in"), 0), (Some("a1"), x1)]);
        assert_eq!(g.tops(), [1]);
        assert!(g.is_weakly_connected());
    }

    #[test]
    fn bb_star_uses_typed_membership() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let g = encode(&d, &spec("bb-star"), &ConceptLattice::bundled()).unwrap();
        let used: BTreeSet<_> = g.edges().iter().filter_map(|e| e.label.as_deref()).collect();
        assert!(used.contains("referent") && used.contains("condition"));
        assert!(!used.contains("in"));
    }

    #[test]
    fn measure_and_book_fail() {
        let d = doc(include_str!("../../fixtures/measure_book.clf"));
        let err = encode(&d, &spec("fork-bnode-cref"), &ConceptLattice::bundled()).unwrap_err();
        match err {
            EncodeError::NoMostSpecificConcept { referent, concepts, .. } => {
                assert_eq!(referent, "x2");
                assert_eq!(concepts, ["book.n.01", "measure.n.02"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(encode(&d, &spec("fork-bnode-cedge"), &ConceptLattice::bundled()).is_ok());
    }

    #[test]
    fn ill_formed_input_is_rejected() {
        let d = doc("b1 REF x1\nb1 Agent x1 x9\n");
        assert!(matches!(
            encode(&d, &spec("fork-bnode-cnode"), &ConceptLattice::empty()),
            Err(EncodeError::IllFormedInput { .. })
        ));
    }

    #[test]
    fn constants_shared_or_not() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        let shared = encode(&d, &spec("fork-bnode-cedge"), &lat).unwrap();
        let split = encode(&d, &spec("fork-bnode-cedge").with_per_occurrence_constants(true), &lat).unwrap();
        let count = |g: &Drg| g.nodes().iter().filter(|n| n.label.as_deref() == Some("\"now\"")).count();
        assert_eq!((count(&shared), count(&split)), (1, 2));
    }

    #[test]
    fn chain_encodings_have_no_argument_labels() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        for name in ["chain-bnode-cedge", "chain-bnode-cref", "chain-bnode-cref-implicit"] {
            let g = encode(&d, &spec(name), &ConceptLattice::bundled()).unwrap();
            assert!(g.edges().iter().all(|e| !matches!(e.label.as_deref(), Some("a1" | "a2"))), "{name}");
        }
    }

    #[test]
    fn reductions() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        let a = spec("fork-bnode-cedge");
        assert_eq!(edge_reduction(&d, &a, &a, &lat).unwrap(), 0.0);
        assert!(edge_reduction(&d, &a, &spec("fork-bnode-cref"), &lat).unwrap() > 0.0);
        assert!(edge_reduction(&d, &spec("chainlab-bnode-cref"), &spec("chainlab-bnode-cref-implicit"), &lat).unwrap() > 0.0);
    }

    #[test]
    fn deterministic_output() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        for s in EncodingSpec::all() {
            assert_eq!(to_interchange(&encode(&d, &s, &lat).unwrap()), to_interchange(&encode(&d, &s, &lat).unwrap()));
        }
    }
}
