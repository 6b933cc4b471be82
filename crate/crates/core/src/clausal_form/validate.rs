use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::{ClausalDrs, Head, Term};

/// A reason why a DRS cannot be turned into a graph.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum WellFormednessIssue {
    UnintroducedReferent(String),
    DuplicateRef(String),
    /// A box that is mentioned but holds no clause.
    DanglingBox(String),
    WrongArity { clause: usize, reason: String },
    /// The clause at this index repeats an earlier one.
    DuplicateClause(usize),
    /// A discourse connective relating a box to itself.
    BoxSelfRelation(usize),
    /// The clauses fall apart into several unrelated groups.
    Disconnected { components: usize },
}

impl fmt::Display for WellFormednessIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnintroducedReferent(r) => write!(f, "referent {r} is never introduced by REF"),
            Self::DuplicateRef(r) => write!(f, "referent {r} is introduced more than once"),
            Self::DanglingBox(b) => write!(f, "box {b} has no content"),
            Self::WrongArity { clause, reason } => write!(f, "clause {clause}: {reason}"),
            Self::DuplicateClause(i) => write!(f, "clause {i} is a duplicate"),
            Self::BoxSelfRelation(i) => write!(f, "clause {i} relates a box to itself"),
            Self::Disconnected { components } => write!(f, "DRS splits into {components} disconnected parts"),
        }
    }
}

/// Lists everything that keeps `drs` from being well-formed. Empty means
/// well-formed.
pub fn validate(drs: &ClausalDrs) -> Vec<WellFormednessIssue> {
    let mut issues = Vec::new();
    let clauses = drs.clauses();

    let mut ref_count: BTreeMap<&str, usize> = BTreeMap::new();
    for c in clauses {
        if let (Head::Ref, [Term::Referent(r)]) = (&c.head, c.args.as_slice()) {
            *ref_count.entry(r).or_default() += 1;
        }
    }
    for (r, n) in &ref_count {
        if *n > 1 {
            issues.push(WellFormednessIssue::DuplicateRef(r.to_string()));
        }
    }
    let mut reported = BTreeSet::new();
    for r in drs.referents() {
        if !ref_count.contains_key(r) && reported.insert(r) {
            issues.push(WellFormednessIssue::UnintroducedReferent(r.to_string()));
        }
    }

    let with_content: BTreeSet<&str> = clauses.iter().map(|c| c.box_label.as_str()).collect();
    for b in drs.boxes() {
        if !with_content.contains(b) {
            issues.push(WellFormednessIssue::DanglingBox(b.to_string()));
        }
    }

    let mut seen = Vec::new();
    for (i, c) in clauses.iter().enumerate() {
        if let Some(reason) = c.arity_problem() {
            issues.push(WellFormednessIssue::WrongArity { clause: i, reason });
        }
        if c.head.is_connective() && c.args.first().and_then(Term::as_box) == Some(c.box_label.as_str()) {
            issues.push(WellFormednessIssue::BoxSelfRelation(i));
        }
        // a repeated REF is already reported as DuplicateRef
        if c.head != Head::Ref && seen.iter().any(|&j: &usize| clauses[j].same_content(c)) {
            issues.push(WellFormednessIssue::DuplicateClause(i));
        }
        seen.push(i);
    }

    let components = count_components(drs);
    if components > 1 {
        issues.push(WellFormednessIssue::Disconnected { components });
    }
    issues
}

/// Connected components over boxes and referents; two symbols are connected
/// when they occur in the same clause. Constants do not connect anything.
fn count_components(drs: &ClausalDrs) -> usize {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in drs.clauses() {
        let vars = std::iter::once(c.box_label.as_str())
            .chain(c.args.iter().filter_map(|a| a.as_box().or_else(|| a.as_referent())));
        let mut first = None;
        for v in vars {
            let id = *ids.entry(v).or_insert_with(|| {
                parent.push(parent.len());
                parent.len() - 1
            });
            match first {
                None => first = Some(id),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, id));
                    parent[a] = b;
                }
            }
        }
    }
    (0..parent.len()).filter(|&x| find(&mut parent, x) == x).count()
}
