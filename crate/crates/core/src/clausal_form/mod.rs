//! Clausal-form DRSs: data model, symbol classification, parsing and validation.
//!
//! A clausal-form DRS is a flat list of clauses. Each clause starts with the
//! label of the box it belongs to, followed by a head symbol and one or two
//! arguments:
//!
//! ```text
//! b1 REF x1 % 0:3
//! b2 Agent e1 x1 % 14:19
//! b1 house "n.05" x1 % 4:9
//! b4 NEGATION b5 % 39:42
//! ```
//!
//! Concept clauses spell their head as a lemma followed by a quoted sense;
//! the two fields together form one symbol (`house.n.05`).

mod compare;
mod inventory;
mod parse;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use compare::equivalent_modulo_renaming;
pub use inventory::{Inventory, TokenContext};
pub use parse::{parse_clf, parse_clf_documents, parse_clf_with, serialize_clf, ParsedDocument};
pub use validate::{validate, WellFormednessIssue};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClfError {
    #[error("line {line}: malformed clause: {reason}")]
    MalformedClause { line: usize, reason: String },
    #[error("unclassifiable token `{0}`")]
    Unclassifiable(String),
    #[error("document {doc_id}: ill-formed DRS: {reason}")]
    IllFormed { doc_id: String, reason: String },
    #[error("inventory line {line}: {reason}")]
    Inventory { line: usize, reason: String },
}

/// The type of a symbol of the DRS signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolClass {
    BoxLabel,
    DiscourseReferent,
    Constant,
    SemanticRole,
    ComparisonRelation,
    Concept,
    DiscourseRelation,
    DrsOperator,
    RefIntroducer,
}

/// Character span `from:to` taken from a clause comment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub from: usize,
    pub to: usize,
}

impl Span {
    pub fn new(from: usize, to: usize) -> Self {
        Span { from, to }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.from, self.to)
    }
}

/// A WordNet-style concept: lemma plus `pos.NN` sense.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept {
    pub lemma: String,
    pub sense: String,
}

impl Concept {
    pub fn new(lemma: impl Into<String>, sense: impl Into<String>) -> Self {
        Concept { lemma: lemma.into(), sense: sense.into() }
    }

    /// Splits a `lemma.pos.NN` symbol. Returns `None` if the trailing sense
    /// is not of the form `pos.digits`.
    pub fn from_symbol(symbol: &str) -> Option<Self> {
        let (rest, num) = symbol.rsplit_once('.')?;
        let (lemma, pos) = rest.rsplit_once('.')?;
        let sense = format!("{pos}.{num}");
        if lemma.is_empty() || !is_sense(&sense) {
            return None;
        }
        Some(Concept::new(lemma, sense))
    }

    pub fn symbol(&self) -> String {
        format!("{}.{}", self.lemma, self.sense)
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.lemma, self.sense)
    }
}

/// `pos.digits`, e.g. `n.05`.
pub(crate) fn is_sense(s: &str) -> bool {
    match s.split_once('.') {
        Some((pos, num)) => {
            pos.len() == 1
                && pos.chars().all(|c| c.is_ascii_lowercase())
                && !num.is_empty()
                && num.chars().all(|c| c.is_ascii_digit())
        }
        None => false,
    }
}

pub(crate) fn is_box_label(s: &str) -> bool {
    prefixed_digits(s, &['b'])
}

pub(crate) fn is_referent(s: &str) -> bool {
    prefixed_digits(s, &['x', 'e', 's', 't', 'p'])
}

fn prefixed_digits(s: &str, prefixes: &[char]) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if prefixes.contains(&c) => {
            let rest = chars.as_str();
            !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

/// The head symbol of a clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Ref,
    Operator(String),
    Relation(String),
    Role(String),
    Comparison(String),
    Concept(Concept),
}

impl Head {
    pub fn class(&self) -> SymbolClass {
        match self {
            Head::Ref => SymbolClass::RefIntroducer,
            Head::Operator(_) => SymbolClass::DrsOperator,
            Head::Relation(_) => SymbolClass::DiscourseRelation,
            Head::Role(_) => SymbolClass::SemanticRole,
            Head::Comparison(_) => SymbolClass::ComparisonRelation,
            Head::Concept(_) => SymbolClass::Concept,
        }
    }

    /// The symbol as it appears in graphs (`REF`, `Agent`, `house.n.05`, ...).
    pub fn symbol(&self) -> String {
        match self {
            Head::Ref => "REF".to_string(),
            Head::Operator(s) | Head::Relation(s) | Head::Role(s) | Head::Comparison(s) => s.clone(),
            Head::Concept(c) => c.symbol(),
        }
    }

    /// Roles and comparison relations: the binary predicates.
    pub fn is_binary_predicate(&self) -> bool {
        matches!(self, Head::Role(_) | Head::Comparison(_))
    }

    /// Discourse relations and DRS operators.
    pub fn is_connective(&self) -> bool {
        matches!(self, Head::Operator(_) | Head::Relation(_))
    }
}

/// An argument of a clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    BoxLabel(String),
    Referent(String),
    /// Constant value without the surrounding quotes.
    Constant(String),
}

impl Term {
    pub fn class(&self) -> SymbolClass {
        match self {
            Term::BoxLabel(_) => SymbolClass::BoxLabel,
            Term::Referent(_) => SymbolClass::DiscourseReferent,
            Term::Constant(_) => SymbolClass::Constant,
        }
    }

    pub fn as_referent(&self) -> Option<&str> {
        match self {
            Term::Referent(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_box(&self) -> Option<&str> {
        match self {
            Term::BoxLabel(b) => Some(b),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::BoxLabel(s) | Term::Referent(s) => f.write_str(s),
            Term::Constant(s) => write!(f, "\"{s}\""),
        }
    }
}

/// One line of clausal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pub box_label: String,
    pub head: Head,
    pub args: Vec<Term>,
    pub anchor: Option<Span>,
    /// Comment text other than the anchor span, kept verbatim.
    pub comment: Option<String>,
}

impl Clause {
    pub fn new(box_label: impl Into<String>, head: Head, args: Vec<Term>) -> Self {
        Clause { box_label: box_label.into(), head, args, anchor: None, comment: None }
    }

    pub fn with_anchor(mut self, from: usize, to: usize) -> Self {
        self.anchor = Some(Span::new(from, to));
        self
    }

    /// Checks that the arguments fit the head; returns a reason otherwise.
    pub fn arity_problem(&self) -> Option<String> {
        let args = &self.args;
        match &self.head {
            Head::Ref => match args.as_slice() {
                [Term::Referent(_)] => None,
                [_] => Some("REF introduces a discourse referent".into()),
                _ => Some(format!("REF takes 1 argument, found {}", args.len())),
            },
            Head::Concept(c) => match args.as_slice() {
                [Term::Referent(_)] => None,
                [_] => Some(format!("concept {c} applies to a discourse referent")),
                _ => Some(format!("concept {c} takes 1 argument, found {}", args.len())),
            },
            Head::Operator(s) | Head::Relation(s) => match args.as_slice() {
                [Term::BoxLabel(_)] => None,
                [_] => Some(format!("{s} relates two boxes")),
                _ => Some(format!("{s} takes 1 box argument, found {}", args.len())),
            },
            Head::Role(s) | Head::Comparison(s) => {
                if args.len() == 2 {
                    None
                } else {
                    Some(format!("{s} takes 2 arguments, found {}", args.len()))
                }
            }
        }
    }

    /// Same clause ignoring anchor and comment.
    pub fn same_content(&self, other: &Clause) -> bool {
        self.box_label == other.box_label && self.head == other.head && self.args == other.args
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.box_label)?;
        match &self.head {
            Head::Concept(c) => write!(f, " {} \"{}\"", c.lemma, c.sense)?,
            other => write!(f, " {}", other.symbol())?,
        }
        for a in &self.args {
            write!(f, " {a}")?;
        }
        match (&self.anchor, &self.comment) {
            (Some(a), Some(c)) => write!(f, " % {a} {c}"),
            (Some(a), None) => write!(f, " % {a}"),
            (None, Some(c)) => write!(f, " % {c}"),
            (None, None) => Ok(()),
        }
    }
}

/// One document's DRS in clausal form, with a derived signature index.
#[derive(Debug, Clone)]
pub struct ClausalDrs {
    doc_id: String,
    raw_text: Option<String>,
    clauses: Vec<Clause>,
    introduced: BTreeMap<String, Vec<String>>,
    introducer: BTreeMap<String, String>,
    concepts: BTreeMap<String, BTreeSet<Concept>>,
}

impl PartialEq for ClausalDrs {
    fn eq(&self, other: &Self) -> bool {
        self.doc_id == other.doc_id && self.raw_text == other.raw_text && self.clauses == other.clauses
    }
}

impl Eq for ClausalDrs {}

impl ClausalDrs {
    /// Builds the DRS and its index. Well-formedness is not checked here; see
    /// [`validate`]. When a referent is introduced more than once, the first
    /// introduction wins in the index.
    pub fn new(doc_id: impl Into<String>, raw_text: Option<String>, clauses: Vec<Clause>) -> Self {
        let mut introduced: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut introducer = BTreeMap::new();
        let mut concepts: BTreeMap<String, BTreeSet<Concept>> = BTreeMap::new();
        for c in &clauses {
            match (&c.head, c.args.as_slice()) {
                (Head::Ref, [Term::Referent(r)]) => {
                    if !introducer.contains_key(r) {
                        introducer.insert(r.clone(), c.box_label.clone());
                        introduced.entry(c.box_label.clone()).or_default().push(r.clone());
                    }
                }
                (Head::Concept(con), [Term::Referent(r)]) => {
                    concepts.entry(r.clone()).or_default().insert(con.clone());
                }
                _ => {}
            }
        }
        ClausalDrs { doc_id: doc_id.into(), raw_text, clauses, introduced, introducer, concepts }
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn raw_text(&self) -> Option<&str> {
        self.raw_text.as_deref()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Referents introduced by `REF` clauses of box `b`, in clause order.
    pub fn introduced_in(&self, b: &str) -> &[String] {
        self.introduced.get(b).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The box whose `REF` clause introduces `r`.
    pub fn introducer(&self, r: &str) -> Option<&str> {
        self.introducer.get(r).map(String::as_str)
    }

    /// Concepts applied to `r` (deduplicated).
    pub fn concepts_of(&self, r: &str) -> Option<&BTreeSet<Concept>> {
        self.concepts.get(r)
    }

    pub fn concept_index(&self) -> &BTreeMap<String, BTreeSet<Concept>> {
        &self.concepts
    }

    /// Box labels in first-mention order (box field first, then box arguments).
    pub fn boxes(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.clauses {
            let boxes = std::iter::once(c.box_label.as_str()).chain(c.args.iter().filter_map(Term::as_box));
            for b in boxes {
                if seen.insert(b) {
                    out.push(b);
                }
            }
        }
        out
    }

    /// Referents in first-mention order.
    pub fn referents(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for r in self.clauses.iter().flat_map(|c| c.args.iter().filter_map(Term::as_referent)) {
            if seen.insert(r) {
                out.push(r);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concept_symbol_split() {
        let c = Concept::from_symbol("house.n.05").unwrap();
        assert_eq!(c, Concept::new("house", "n.05"));
        assert_eq!(c.symbol(), "house.n.05");
        let dotted = Concept::from_symbol("a.m.n.01").unwrap();
        assert_eq!(dotted.lemma, "a.m");
        assert!(Concept::from_symbol("Agent").is_none());
        assert!(Concept::from_symbol("house.noun.5").is_none());
    }

    #[test]
    fn variable_prefixes() {
        assert!(is_box_label("b12"));
        assert!(!is_box_label("b"));
        assert!(!is_box_label("x1"));
        for r in ["x1", "e2", "s3", "t10", "p4"] {
            assert!(is_referent(r), "{r}");
        }
        assert!(!is_referent("y1"));
        assert!(!is_referent("x1a"));
    }

    #[test]
    fn index_is_consistent() {
        let drs = parse_clf(include_str!("../../fixtures/house_senate.clf")).unwrap().remove(0);
        for (r, b) in &drs.introducer {
            assert!(drs.introduced_in(b).contains(r));
        }
        for (b, rs) in &drs.introduced {
            for r in rs {
                assert_eq!(drs.introducer(r), Some(b.as_str()));
            }
        }
        assert_eq!(drs.introducer("t2"), Some("b4"));
        assert_eq!(drs.boxes(), vec!["b1", "b2", "b4", "b3", "b5"]);
        assert_eq!(drs.concepts_of("x1").unwrap().len(), 1);
    }

    #[test]
    fn clause_display_normalizes() {
        let c = Clause::new("b1", Head::Concept(Concept::new("house", "n.05")), vec![Term::Referent("x1".into())])
            .with_anchor(4, 9);
        assert_eq!(c.to_string(), "b1 house \"n.05\" x1 % 4:9");
    }
}
