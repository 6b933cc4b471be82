//! Encodings of clausal-form DRSs as graphs.
//!
//! An encoding is a point on four axes:
//!
//! * how the two arguments of a binary predicate (role or comparison) are
//!   attached: forking `a1`/`a2` edges out of the predicate, or a chain
//!   `arg1 -> P -> arg2`, optionally with `a1`/`a2` labels;
//! * whether binary predicates are labeled nodes or unlabeled nodes behind a
//!   labeled edge from their box;
//! * whether concepts are labeled nodes, unlabeled nodes behind a labeled
//!   edge, a labeled edge from the box straight to the referent, or the label
//!   of the referent node itself (most specific concept only);
//! * whether every box member gets an explicit `in` edge, or a binary
//!   predicate living in the box that introduces its first argument leaves
//!   that edge out.
//!
//! Thirteen named combinations are supported, see [`EncodingSpec::all`].

mod decode;
mod encode;

use std::fmt;

use thiserror::Error;

use crate::clausal_form::WellFormednessIssue;

pub use decode::{assign_kinds, decode, decode_with, node_kinds};
pub use encode::{edge_reduction, encode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArgStyle {
    /// `P -a1-> x`, `P -a2-> y`
    Fork,
    /// `x -> P -> y`
    Chain,
    /// `x -a1-> P -a2-> y`
    ChainLabeled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryStyle {
    /// A node labeled with the role.
    AsLabeledNode,
    /// `box -Role-> (unlabeled)`
    AsReified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConceptStyle {
    /// `(house.n.05) -a1-> x`
    AsLabeledNode,
    /// `box -house.n.05-> (unlabeled) -a1-> x`
    AsReified,
    /// `box -house.n.05-> x`
    AsEdge,
    /// The referent node is labeled with its most specific concept.
    OnReferent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Membership {
    Explicit,
    /// No `in` edge for a binary predicate whose box introduces its first
    /// argument.
    ImplicitA1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingSpec {
    args: ArgStyle,
    binary: BinaryStyle,
    concept: ConceptStyle,
    membership: Membership,
    /// Typed membership labels (`referent` / `condition`) instead of `in`.
    bb_star: bool,
    /// One constant node per clause argument instead of one per distinct
    /// value.
    per_occurrence_constants: bool,
}

const NAMES: [&str; 13] = [
    "bb-star",
    "fork-bnode-cnode",
    "fork-breif-creif",
    "fork-breif-cedge",
    "fork-bnode-cedge",
    "chain-bnode-cedge",
    "chainlab-bnode-cedge",
    "fork-breif-cref",
    "fork-bnode-cref",
    "chain-bnode-cref",
    "chainlab-bnode-cref",
    "chain-bnode-cref-implicit",
    "chainlab-bnode-cref-implicit",
];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("unknown encoding `{0}`")]
    UnknownEncoding(String),
    #[error("document {doc_id}: ill-formed DRS: {}", issues.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    IllFormedInput { doc_id: String, issues: Vec<WellFormednessIssue> },
    #[error("document {doc_id}: NoMostSpecificConcept for {referent}: {}", concepts.join(", "))]
    NoMostSpecificConcept { doc_id: String, referent: String, concepts: Vec<String> },
    #[error("graph {graph_id}: does not conform to {encoding}: {reason}")]
    NonConformingGraph { graph_id: String, encoding: String, reason: String },
}

impl EncodingSpec {
    pub fn from_name(name: &str) -> Result<Self, EncodeError> {
        use ArgStyle::*;
        use BinaryStyle::AsLabeledNode as BNode;
        use BinaryStyle::AsReified as BReif;
        use ConceptStyle::*;
        use Membership::*;
        let (args, binary, concept, membership, bb_star) = match name {
            "bb-star" => (Fork, BNode, AsLabeledNode, Explicit, true),
            "fork-bnode-cnode" => (Fork, BNode, AsLabeledNode, Explicit, false),
            "fork-breif-creif" => (Fork, BReif, AsReified, Explicit, false),
            "fork-breif-cedge" => (Fork, BReif, AsEdge, Explicit, false),
            "fork-bnode-cedge" => (Fork, BNode, AsEdge, Explicit, false),
            "chain-bnode-cedge" => (Chain, BNode, AsEdge, Explicit, false),
            "chainlab-bnode-cedge" => (ChainLabeled, BNode, AsEdge, Explicit, false),
            "fork-breif-cref" => (Fork, BReif, OnReferent, Explicit, false),
            "fork-bnode-cref" => (Fork, BNode, OnReferent, Explicit, false),
            "chain-bnode-cref" => (Chain, BNode, OnReferent, Explicit, false),
            "chainlab-bnode-cref" => (ChainLabeled, BNode, OnReferent, Explicit, false),
            "chain-bnode-cref-implicit" => (Chain, BNode, OnReferent, ImplicitA1, false),
            "chainlab-bnode-cref-implicit" => (ChainLabeled, BNode, OnReferent, ImplicitA1, false),
            other => return Err(EncodeError::UnknownEncoding(other.to_string())),
        };
        Ok(EncodingSpec { args, binary, concept, membership, bb_star, per_occurrence_constants: false })
    }

    /// All thirteen encodings in their canonical order.
    pub fn all() -> Vec<EncodingSpec> {
        NAMES.iter().map(|n| Self::from_name(n).expect("canonical name")).collect()
    }

    pub fn names() -> &'static [&'static str] {
        &NAMES
    }

    pub fn name(&self) -> &'static str {
        use ArgStyle::*;
        use BinaryStyle::AsLabeledNode as BNode;
        use BinaryStyle::AsReified as BReif;
        use ConceptStyle::*;
        use Membership::*;
        match (self.args, self.binary, self.concept, self.membership, self.bb_star) {
            (Fork, BNode, AsLabeledNode, Explicit, true) => "bb-star",
            (Fork, BNode, AsLabeledNode, Explicit, false) => "fork-bnode-cnode",
            (Fork, BReif, AsReified, Explicit, false) => "fork-breif-creif",
            (Fork, BReif, AsEdge, Explicit, false) => "fork-breif-cedge",
            (Fork, BNode, AsEdge, Explicit, false) => "fork-bnode-cedge",
            (Chain, BNode, AsEdge, Explicit, false) => "chain-bnode-cedge",
            (ChainLabeled, BNode, AsEdge, Explicit, false) => "chainlab-bnode-cedge",
            (Fork, BReif, OnReferent, Explicit, false) => "fork-breif-cref",
            (Fork, BNode, OnReferent, Explicit, false) => "fork-bnode-cref",
            (Chain, BNode, OnReferent, Explicit, false) => "chain-bnode-cref",
            (ChainLabeled, BNode, OnReferent, Explicit, false) => "chainlab-bnode-cref",
            (Chain, BNode, OnReferent, ImplicitA1, false) => "chain-bnode-cref-implicit",
            (ChainLabeled, BNode, OnReferent, ImplicitA1, false) => "chainlab-bnode-cref-implicit",
            _ => unreachable!("specs are only built by from_name"),
        }
    }

    pub fn args(&self) -> ArgStyle {
        self.args
    }

    pub fn binary(&self) -> BinaryStyle {
        self.binary
    }

    pub fn concept(&self) -> ConceptStyle {
        self.concept
    }

    pub fn membership(&self) -> Membership {
        self.membership
    }

    pub fn bb_star(&self) -> bool {
        self.bb_star
    }

    pub fn per_occurrence_constants(&self) -> bool {
        self.per_occurrence_constants
    }

    pub fn with_per_occurrence_constants(mut self, on: bool) -> Self {
        self.per_occurrence_constants = on;
        self
    }

    /// False only for concept-on-referent encodings, which keep just the most
    /// specific concept of each referent.
    pub fn is_lossless(&self) -> bool {
        self.concept != ConceptStyle::OnReferent
    }

    /// The same encoding with explicit membership, if this one is implicit.
    pub fn explicit_counterpart(&self) -> Option<EncodingSpec> {
        (self.membership == Membership::ImplicitA1).then(|| EncodingSpec { membership: Membership::Explicit, ..*self })
    }

    pub(crate) fn referent_label(&self) -> &'static str {
        if self.bb_star {
            "referent"
        } else {
            "in"
        }
    }

    pub(crate) fn condition_label(&self) -> &'static str {
        if self.bb_star {
            "condition"
        } else {
            "in"
        }
    }

    /// One-line description of the four axes.
    pub fn axes(&self) -> String {
        let args = match self.args {
            ArgStyle::Fork => "fork (a1/a2 edges)",
            ArgStyle::Chain => "chain (unlabeled)",
            ArgStyle::ChainLabeled => "chain (a1/a2 labels)",
        };
        let binary = match self.binary {
            BinaryStyle::AsLabeledNode => "labeled node",
            BinaryStyle::AsReified => "reified node",
        };
        let concept = match self.concept {
            ConceptStyle::AsLabeledNode => "labeled node",
            ConceptStyle::AsReified => "reified node",
            ConceptStyle::AsEdge => "labeled edge",
            ConceptStyle::OnReferent => "on referent",
        };
        let membership = match (self.membership, self.bb_star) {
            (Membership::Explicit, true) => "explicit, typed labels",
            (Membership::Explicit, false) => "explicit",
            (Membership::ImplicitA1, _) => "implicit from first argument",
        };
        format!("args: {args}; binary: {binary}; concept: {concept}; membership: {membership}")
    }
}

impl fmt::Display for EncodingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for EncodingSpec {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_name(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_names_roundtrip() {
        let all = EncodingSpec::all();
        assert_eq!(all.len(), 13);
        for (spec, name) in all.iter().zip(NAMES) {
            assert_eq!(spec.name(), name);
        }
        let mut distinct = all.clone();
        distinct.dedup();
        assert_eq!(distinct.len(), 13);
        assert!(matches!(EncodingSpec::from_name("chain-breif-cref"), Err(EncodeError::UnknownEncoding(_))));
    }

    #[test]
    fn implicit_only_with_chains_and_referent_concepts() {
        for s in EncodingSpec::all() {
            if s.membership == Membership::ImplicitA1 {
                assert_ne!(s.args, ArgStyle::Fork);
                assert_eq!(s.concept, ConceptStyle::OnReferent);
                assert_eq!(s.explicit_counterpart().unwrap().membership, Membership::Explicit);
            }
        }
    }
}
