use super::{ArgStyle, BinaryStyle, ConceptStyle, EncodeError, EncodingSpec, Membership};
use crate::clausal_form::{ClausalDrs, Clause, Concept, Head, Inventory, SymbolClass, Term, TokenContext};
use crate::graph::{Drg, Edge, NodeKind};

fn is_concept_label(label: &str) -> bool {
    Concept::from_symbol(label).is_some()
}

/// Node kinds as implied by the graph structure under `spec`.
pub fn node_kinds(g: &Drg, spec: &EncodingSpec) -> Vec<NodeKind> {
    let referent_label = spec.referent_label();
    let reified = spec.binary() == BinaryStyle::AsReified || spec.concept() == ConceptStyle::AsReified;
    g.nodes()
        .iter()
        .map(|n| {
            let out_labels: Vec<&str> = g.outgoing(n.id).filter_map(|e| e.label.as_deref()).collect();
            match n.label.as_deref() {
                Some(l) if l.starts_with('"') => NodeKind::Constant,
                Some(l) => {
                    if spec.concept() == ConceptStyle::OnReferent
                        && is_concept_label(l)
                        && out_labels.contains(&referent_label)
                    {
                        NodeKind::Referent
                    } else {
                        NodeKind::Predicate
                    }
                }
                None => {
                    if out_labels.contains(&referent_label) {
                        NodeKind::Referent
                    } else if reified && out_labels.contains(&"a1") && g.incoming(n.id).any(|e| e.label.is_some()) {
                        NodeKind::Reified
                    } else {
                        NodeKind::Box
                    }
                }
            }
        })
        .collect()
}

/// Sets node kinds from the structure of the graph.
pub fn assign_kinds(g: &mut Drg, spec: &EncodingSpec) {
    let kinds = node_kinds(g, spec);
    g.set_kinds(kinds);
}

/// [`decode_with`] using the bundled symbol inventory.
pub fn decode(g: &Drg, spec: &EncodingSpec) -> Result<ClausalDrs, EncodeError> {
    decode_with(g, spec, &Inventory::bundled())
}

struct Reader<'a> {
    g: &'a Drg,
    spec: &'a EncodingSpec,
    inventory: &'a Inventory,
    kinds: Vec<NodeKind>,
    names: Vec<Option<String>>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    used: Vec<bool>,
}

impl<'a> Reader<'a> {
    fn fail(&self, reason: impl Into<String>) -> EncodeError {
        EncodeError::NonConformingGraph {
            graph_id: self.g.id().to_string(),
            encoding: self.spec.name().to_string(),
            reason: reason.into(),
        }
    }

    fn edge(&self, i: usize) -> &'a Edge {
        &self.g.edges()[i]
    }

    /// The single outgoing (or incoming) edge of `node` with `label`.
    fn single(&mut self, node: usize, label: Option<&str>, outgoing: bool) -> Result<usize, EncodeError> {
        let list = if outgoing { &self.out[node] } else { &self.inc[node] };
        let found: Vec<usize> = list.iter().copied().filter(|&i| self.edge(i).label.as_deref() == label).collect();
        match found.as_slice() {
            [i] => {
                self.used[*i] = true;
                Ok(*i)
            }
            _ => Err(self.fail(format!(
                "node {node} needs exactly one {} edge labeled {label:?}, found {}",
                if outgoing { "outgoing" } else { "incoming" },
                found.len()
            ))),
        }
    }

    fn term(&self, node: usize) -> Result<Term, EncodeError> {
        match self.kinds[node] {
            NodeKind::Box => Ok(Term::BoxLabel(self.name(node))),
            NodeKind::Referent => Ok(Term::Referent(self.name(node))),
            NodeKind::Constant => {
                let l = self.g.node(node).label.as_deref().unwrap_or_default();
                Ok(Term::Constant(l.trim_matches('"').to_string()))
            }
            _ => Err(self.fail(format!("node {node} cannot be a predicate argument"))),
        }
    }

    fn name(&self, node: usize) -> String {
        self.names[node].clone().unwrap_or_default()
    }

    fn box_name(&self, node: usize) -> Result<String, EncodeError> {
        match self.kinds[node] {
            NodeKind::Box => Ok(self.name(node)),
            _ => Err(self.fail(format!("node {node} is not a box"))),
        }
    }

    /// Box that introduces referent `node`.
    fn introducer(&self, node: usize) -> Option<usize> {
        let l = self.spec.referent_label();
        self.out[node]
            .iter()
            .map(|&i| self.edge(i))
            .find(|e| e.label.as_deref() == Some(l) && self.kinds[e.target] == NodeKind::Box)
            .map(|e| e.target)
    }

    fn binary_head(&self, label: &str) -> Result<Head, EncodeError> {
        match self.inventory.classify(label, TokenContext::Head { next: None }) {
            Ok(SymbolClass::ComparisonRelation) => Ok(Head::Comparison(label.to_string())),
            Ok(SymbolClass::SemanticRole) => Ok(Head::Role(label.to_string())),
            _ => Err(self.fail(format!("`{label}` is not a role or comparison"))),
        }
    }

    fn connective_head(&self, label: &str) -> Result<Head, EncodeError> {
        match self.inventory.classify(label, TokenContext::Head { next: None }) {
            Ok(SymbolClass::DrsOperator) => Ok(Head::Operator(label.to_string())),
            Ok(SymbolClass::DiscourseRelation) => Ok(Head::Relation(label.to_string())),
            _ => Err(self.fail(format!("`{label}` is not a discourse relation or operator"))),
        }
    }

    fn concept(&self, label: &str) -> Result<Concept, EncodeError> {
        Concept::from_symbol(label).ok_or_else(|| self.fail(format!("`{label}` is not a concept")))
    }

    /// Argument nodes of a binary predicate node `p`.
    fn arguments(&mut self, p: usize, style: ArgStyle) -> Result<(usize, usize), EncodeError> {
        Ok(match style {
            ArgStyle::Fork => {
                let a1 = self.single(p, Some("a1"), true)?;
                let a2 = self.single(p, Some("a2"), true)?;
                (self.edge(a1).target, self.edge(a2).target)
            }
            ArgStyle::Chain => {
                let a1 = self.single(p, None, false)?;
                let a2 = self.single(p, None, true)?;
                (self.edge(a1).source, self.edge(a2).target)
            }
            ArgStyle::ChainLabeled => {
                let a1 = self.single(p, Some("a1"), false)?;
                let a2 = self.single(p, Some("a2"), true)?;
                (self.edge(a1).source, self.edge(a2).target)
            }
        })
    }
}

/// Reads a DRS back from a graph built with `spec`.
///
/// Boxes are named `b1, b2, ...` and referents `x1, x2, ...` in node order;
/// anchors are not recovered. A binary predicate without a box edge under
/// implicit membership goes to the box introducing its first argument.
/// Concept-on-referent encodings yield one concept clause per labeled
/// referent, placed in the referent's box.
pub fn decode_with(g: &Drg, spec: &EncodingSpec, inventory: &Inventory) -> Result<ClausalDrs, EncodeError> {
    let kinds = node_kinds(g, spec);
    let mut names = vec![None; g.nodes().len()];
    let (mut nb, mut nx) = (0, 0);
    for (i, k) in kinds.iter().enumerate() {
        match k {
            NodeKind::Box => {
                nb += 1;
                names[i] = Some(format!("b{nb}"));
            }
            NodeKind::Referent => {
                nx += 1;
                names[i] = Some(format!("x{nx}"));
            }
            _ => {}
        }
    }
    let mut out = vec![Vec::new(); g.nodes().len()];
    let mut inc = vec![Vec::new(); g.nodes().len()];
    for (i, e) in g.edges().iter().enumerate() {
        out[e.source].push(i);
        inc[e.target].push(i);
    }
    let mut r = Reader { g, spec, inventory, kinds, names, out, inc, used: vec![false; g.edges().len()] };
    let referent_label = spec.referent_label();
    let condition_label = spec.condition_label();
    let mut clauses = Vec::new();

    for n in g.nodes() {
        let id = n.id;
        match r.kinds[id] {
            NodeKind::Referent => {
                let e = r.single(id, Some(referent_label), true)?;
                let b = r.box_name(r.edge(e).target)?;
                clauses.push(Clause::new(b.clone(), Head::Ref, vec![Term::Referent(r.name(id))]));
                if let Some(l) = &n.label {
                    clauses.push(Clause::new(b, Head::Concept(r.concept(l)?), vec![Term::Referent(r.name(id))]));
                }
            }
            NodeKind::Predicate => {
                let label = n.label.as_deref().unwrap_or_default();
                if spec.concept() == ConceptStyle::AsLabeledNode && is_concept_label(label) {
                    let a = r.single(id, Some("a1"), true)?;
                    let m = r.single(id, Some(condition_label), true)?;
                    let b = r.box_name(r.edge(m).target)?;
                    let x = r.term(r.edge(a).target)?;
                    clauses.push(Clause::new(b, Head::Concept(r.concept(label)?), vec![x]));
                    continue;
                }
                let head = r.binary_head(label)?;
                let (a1, a2) = r.arguments(id, spec.args())?;
                let members: Vec<usize> = r.out[id]
                    .iter()
                    .copied()
                    .filter(|&i| r.edge(i).label.as_deref() == Some(condition_label))
                    .collect();
                let b = match members.as_slice() {
                    [m] => {
                        r.used[*m] = true;
                        r.box_name(r.edge(*m).target)?
                    }
                    [] if spec.membership() == Membership::ImplicitA1 => {
                        let owner = (r.kinds[a1] == NodeKind::Referent).then(|| r.introducer(a1)).flatten();
                        match owner {
                            Some(b) => r.box_name(b)?,
                            None => return Err(r.fail(format!("predicate {id} has no box and no referent first argument"))),
                        }
                    }
                    _ => return Err(r.fail(format!("predicate {id} has {} box edges", members.len()))),
                };
                clauses.push(Clause::new(b, head, vec![r.term(a1)?, r.term(a2)?]));
            }
            NodeKind::Reified => {
                let incoming: Vec<usize> = r.inc[id].iter().copied().filter(|&i| r.edge(i).label.is_some()).collect();
                let [e] = incoming.as_slice() else {
                    return Err(r.fail(format!("reified node {id} needs exactly one labeled incoming edge")));
                };
                r.used[*e] = true;
                let b = r.box_name(r.edge(*e).source)?;
                let label = r.edge(*e).label.as_deref().unwrap_or_default();
                let is_binary = r.out[id].iter().any(|&i| r.edge(i).label.as_deref() == Some("a2"));
                if !is_binary && spec.concept() == ConceptStyle::AsReified {
                    let a = r.single(id, Some("a1"), true)?;
                    let x = r.term(r.edge(a).target)?;
                    clauses.push(Clause::new(b, Head::Concept(r.concept(label)?), vec![x]));
                } else if is_binary && spec.binary() == BinaryStyle::AsReified {
                    let head = r.binary_head(label)?;
                    let (a1, a2) = r.arguments(id, ArgStyle::Fork)?;
                    clauses.push(Clause::new(b, head, vec![r.term(a1)?, r.term(a2)?]));
                } else {
                    return Err(r.fail(format!("unexpected reified node {id}")));
                }
            }
            NodeKind::Box | NodeKind::Constant => {}
        }
    }

    for (i, e) in g.edges().iter().enumerate() {
        if r.used[i] || r.kinds[e.source] != NodeKind::Box {
            continue;
        }
        let Some(label) = e.label.as_deref() else { continue };
        match r.kinds[e.target] {
            NodeKind::Box => {
                let head = r.connective_head(label)?;
                clauses.push(Clause::new(r.name(e.source), head, vec![Term::BoxLabel(r.name(e.target))]));
            }
            NodeKind::Referent if spec.concept() == ConceptStyle::AsEdge => {
                let c = r.concept(label)?;
                clauses.push(Clause::new(r.name(e.source), Head::Concept(c), vec![Term::Referent(r.name(e.target))]));
            }
            _ => return Err(r.fail(format!("unexpected edge {}->{} ({label})", e.source, e.target))),
        }
        r.used[i] = true;
    }
    if let Some(i) = r.used.iter().position(|u| !u) {
        let e = r.edge(i);
        return Err(r.fail(format!("edge {}->{} ({:?}) does not fit the encoding", e.source, e.target, e.label)));
    }
    Ok(ClausalDrs::new(g.id(), None, clauses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clausal_form::{equivalent_modulo_renaming, parse_clf, validate};
    use crate::encoder::encode;
    use crate::lattice::ConceptLattice;

    fn doc(text: &str) -> ClausalDrs {
        parse_clf(text).unwrap().remove(0)
    }

    #[test]
    fn lossless_roundtrip_house_senate() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        for spec in EncodingSpec::all().into_iter().filter(EncodingSpec::is_lossless) {
            let g = encode(&d, &spec, &lat).unwrap();
            let back = decode(&g, &spec).unwrap();
            assert!(validate(&back).is_empty(), "{spec}");
            assert!(equivalent_modulo_renaming(&d, &back), "{spec}");
        }
    }

    #[test]
    fn implicit_recovery_reattaches_szp() {
        let d = doc(include_str!("../../fixtures/szp.clf"));
        let spec = EncodingSpec::from_name("chain-bnode-cref-implicit").unwrap();
        let g = encode(&d, &spec, &ConceptLattice::bundled()).unwrap();
        let back = decode(&g, &spec).unwrap();
        let szp = back.clauses().iter().find(|c| c.head == Head::Comparison("SZP".into())).unwrap();
        let bed = back.clauses().iter().find(|c| matches!(&c.head, Head::Concept(k) if k.lemma == "bed")).unwrap();
        let bed_ref = bed.args[0].as_referent().unwrap();
        assert_eq!(szp.args[0].as_referent(), Some(bed_ref));
        // SZP stays in the box of `hide`, not the box introducing the bed
        let hide = back.clauses().iter().find(|c| matches!(&c.head, Head::Concept(k) if k.lemma == "hide")).unwrap();
        assert_eq!(szp.box_label, hide.box_label);
        assert_ne!(szp.box_label, bed.box_label);
    }

    #[test]
    fn most_specific_concept_survives() {
        let d = doc("b1 REF x1\nb1 male \"n.02\" x1\nb1 person \"n.01\" x1\nb1 REF e1\nb1 sing \"v.01\" e1\nb1 Agent e1 x1\n");
        let spec = EncodingSpec::from_name("chain-bnode-cref-implicit").unwrap();
        let g = encode(&d, &spec, &ConceptLattice::bundled()).unwrap();
        let back = decode(&g, &spec).unwrap();
        let concepts: Vec<String> = back
            .clauses()
            .iter()
            .filter_map(|c| if let Head::Concept(k) = &c.head { Some(k.symbol()) } else { None })
            .collect();
        assert_eq!(concepts, ["male.n.02", "sing.v.01"]);
    }

    #[test]
    fn nonconforming_graphs() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        let chain = EncodingSpec::from_name("chain-bnode-cedge").unwrap();
        let fork = EncodingSpec::from_name("fork-bnode-cedge").unwrap();
        let g = encode(&d, &fork, &lat).unwrap();
        assert!(matches!(decode(&g, &chain), Err(EncodeError::NonConformingGraph { .. })));
    }

    #[test]
    fn kinds_match_encoder() {
        let d = doc(include_str!("../../fixtures/house_senate.clf"));
        let lat = ConceptLattice::bundled();
        for spec in EncodingSpec::all() {
            let g = encode(&d, &spec, &lat).unwrap();
            let expected: Vec<NodeKind> = g.nodes().iter().map(|n| n.kind).collect();
            assert_eq!(node_kinds(&g, &spec), expected, "{spec}");
        }
    }
}
