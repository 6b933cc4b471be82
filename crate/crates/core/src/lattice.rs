//! Hypernym relation between concepts and most-specific-concept lookup.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use thiserror::Error;

const BUNDLED: &str = include_str!("../data/hypernyms.tsv");

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("cyclic hypernymy: {}", .0.join(" -> "))]
    CyclicHypernymy(Vec<String>),
    #[error("line {0}: expected `child<TAB>parent`")]
    MalformedLine(usize),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

/// The concept set has no member below all the others.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("no most specific concept among {}", .concepts.join(", "))]
pub struct NoUniqueMinimum {
    pub concepts: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct ConceptLattice {
    index: HashMap<String, usize>,
    names: Vec<String>,
    parents: Vec<Vec<usize>>,
    /// Reflexive-transitive closure: every node's ancestors including itself.
    ancestors: Vec<BTreeSet<usize>>,
}

impl ConceptLattice {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The small lattice shipped with the crate, covering the bundled fixtures.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled hypernym file is valid")
    }

    pub fn load(path: &Path) -> Result<Self, LatticeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LatticeError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        Self::parse(&text)
    }

    /// Reads `child<TAB>parent` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, LatticeError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(c), Some(p), None) if !c.trim().is_empty() && !p.trim().is_empty() => {
                    pairs.push((c.trim().to_string(), p.trim().to_string()))
                }
                _ => return Err(LatticeError::MalformedLine(i + 1)),
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs<I, S>(pairs: I) -> Result<Self, LatticeError>
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        let mut lat = ConceptLattice::default();
        for (child, parent) in pairs {
            let c = lat.intern(child.into());
            let p = lat.intern(parent.into());
            if !lat.parents[c].contains(&p) {
                lat.parents[c].push(p);
            }
        }
        if let Some(cycle) = lat.find_cycle() {
            return Err(LatticeError::CyclicHypernymy(cycle.into_iter().map(|i| lat.names[i].clone()).collect()));
        }
        lat.close();
        Ok(lat)
    }

    fn intern(&mut self, name: String) -> usize {
        if let Some(&i) = self.index.get(&name) {
            return i;
        }
        let i = self.names.len();
        self.index.insert(name.clone(), i);
        self.names.push(name);
        self.parents.push(Vec::new());
        i
    }

    /// Returns the nodes of some cycle, first node repeated at the end.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let n = self.names.len();
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // iterative DFS; the stack holds (node, next parent index)
            let mut stack = vec![(root, 0usize)];
            mark[root] = Mark::Open;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&p) = self.parents[node].get(*next) {
                    *next += 1;
                    match mark[p] {
                        Mark::New => {
                            mark[p] = Mark::Open;
                            stack.push((p, 0));
                        }
                        Mark::Open => {
                            let start = stack.iter().position(|&(x, _)| x == p).expect("open node is on the stack");
                            let mut cycle: Vec<usize> = stack[start..].iter().map(|&(x, _)| x).collect();
                            cycle.push(p);
                            return Some(cycle);
                        }
                        Mark::Done => {}
                    }
                } else {
                    mark[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        None
    }

    fn close(&mut self) {
        let n = self.names.len();
        let mut done: Vec<Option<BTreeSet<usize>>> = vec![None; n];
        for root in 0..n {
            let mut stack = vec![root];
            while let Some(&node) = stack.last() {
                if done[node].is_some() {
                    stack.pop();
                    continue;
                }
                let pending: Vec<usize> = self.parents[node].iter().copied().filter(|&p| done[p].is_none()).collect();
                if pending.is_empty() {
                    let mut set = BTreeSet::from([node]);
                    for &p in &self.parents[node] {
                        set.extend(done[p].as_ref().expect("parent closed").iter().copied());
                    }
                    done[node] = Some(set);
                    stack.pop();
                } else {
                    stack.extend(pending);
                }
            }
        }
        self.ancestors = done.into_iter().map(|s| s.expect("all nodes closed")).collect();
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, concept: &str) -> bool {
        self.index.contains_key(concept)
    }

    /// Direct parents of `concept` as listed in the source file.
    pub fn parents(&self, concept: &str) -> Vec<&str> {
        match self.index.get(concept) {
            Some(&i) => self.parents[i].iter().map(|&p| self.names[p].as_str()).collect(),
            None => Vec::new(),
        }
    }

    /// Strict: `hyper` is a proper (transitive) hypernym of `hypo`.
    pub fn is_hypernym(&self, hyper: &str, hypo: &str) -> bool {
        hyper != hypo && self.subsumes(hyper, hypo)
    }

    /// Reflexive version of [`is_hypernym`](Self::is_hypernym).
    pub fn subsumes(&self, hyper: &str, hypo: &str) -> bool {
        if hyper == hypo {
            return true;
        }
        match (self.index.get(hyper), self.index.get(hypo)) {
            (Some(&h), Some(&c)) => self.ancestors[c].contains(&h),
            _ => false,
        }
    }

    /// The member of `concepts` that every other member is a hypernym of.
    /// Duplicates are ignored; concepts unknown to the lattice have no
    /// hypernyms.
    pub fn most_specific<'a, I>(&self, concepts: I) -> Result<String, NoUniqueMinimum>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let set: BTreeSet<&str> = concepts.into_iter().collect();
        let found = set.iter().find(|&&c| set.iter().all(|&o| self.subsumes(o, c)));
        match found {
            Some(c) => Ok(c.to_string()),
            None => Err(NoUniqueMinimum { concepts: set.into_iter().map(str::to_string).collect() }),
        }
    }
}
