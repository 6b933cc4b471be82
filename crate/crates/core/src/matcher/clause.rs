use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clausal_form::{ClausalDrs, Head, Term};

use super::prf;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseMatch {
    pub matched: usize,
    pub system_clauses: usize,
    pub gold_clauses: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Slot {
    Box(usize),
    Referent(usize),
    Constant(usize),
}

/// Clauses over numbered variables. Variables are numbered per sort in order
/// of first appearance; constants share one numbering across both documents.
struct Numbered {
    clauses: Vec<(Head, Vec<Slot>)>,
    boxes: usize,
    referents: usize,
}

fn number(d: &ClausalDrs, constants: &mut HashMap<String, usize>) -> Numbered {
    let mut boxes: HashMap<&str, usize> = HashMap::new();
    let mut referents: HashMap<&str, usize> = HashMap::new();
    let mut clauses = Vec::with_capacity(d.len());
    for c in d.clauses() {
        let mut slots = Vec::with_capacity(c.args.len() + 1);
        let next = boxes.len();
        slots.push(Slot::Box(*boxes.entry(c.box_label.as_str()).or_insert(next)));
        for a in &c.args {
            slots.push(match a {
                Term::BoxLabel(b) => {
                    let next = boxes.len();
                    Slot::Box(*boxes.entry(b.as_str()).or_insert(next))
                }
                Term::Referent(r) => {
                    let next = referents.len();
                    Slot::Referent(*referents.entry(r.as_str()).or_insert(next))
                }
                Term::Constant(v) => {
                    let next = constants.len();
                    Slot::Constant(*constants.entry(v.clone()).or_insert(next))
                }
            });
        }
        clauses.push((c.head.clone(), slots));
    }
    Numbered { clauses, boxes: boxes.len(), referents: referents.len() }
}

/// A partial injective renaming of system variables into gold variables.
#[derive(Clone)]
struct Renaming {
    boxes: Vec<Option<usize>>,
    referents: Vec<Option<usize>>,
}

impl Renaming {
    fn image(&self, slot: Slot) -> Option<Slot> {
        match slot {
            Slot::Box(i) => self.boxes[i].map(Slot::Box),
            Slot::Referent(i) => self.referents[i].map(Slot::Referent),
            Slot::Constant(_) => Some(slot),
        }
    }

    fn sort(&mut self, boxes: bool) -> &mut Vec<Option<usize>> {
        if boxes {
            &mut self.boxes
        } else {
            &mut self.referents
        }
    }
}

struct Scorer<'a> {
    sys: &'a Numbered,
    gold: &'a Numbered,
    gold_counts: HashMap<(&'a Head, Vec<Slot>), usize>,
}

impl<'a> Scorer<'a> {
    fn new(sys: &'a Numbered, gold: &'a Numbered) -> Self {
        let mut gold_counts = HashMap::new();
        for (h, s) in &gold.clauses {
            *gold_counts.entry((h, s.clone())).or_insert(0) += 1;
        }
        Scorer { sys, gold, gold_counts }
    }

    fn score(&self, r: &Renaming) -> usize {
        let mut left = self.gold_counts.clone();
        let mut n = 0;
        for (h, slots) in &self.sys.clauses {
            let Some(image) = slots.iter().map(|&s| r.image(s)).collect::<Option<Vec<Slot>>>() else { continue };
            if let Some(c) = left.get_mut(&(h, image)) {
                if *c > 0 {
                    *c -= 1;
                    n += 1;
                }
            }
        }
        n
    }

    /// Maps variables along the first gold clause each system clause can be
    /// unified with.
    fn unify_greedily(&self) -> Renaming {
        let mut r = Renaming { boxes: vec![None; self.sys.boxes], referents: vec![None; self.sys.referents] };
        let mut box_used = vec![false; self.gold.boxes];
        let mut ref_used = vec![false; self.gold.referents];
        for (h, slots) in &self.sys.clauses {
            for (gh, gslots) in &self.gold.clauses {
                if h != gh || slots.len() != gslots.len() {
                    continue;
                }
                let mut trial = r.clone();
                let (mut bu, mut ru) = (box_used.clone(), ref_used.clone());
                let fits = slots.iter().zip(gslots).all(|(&s, &g)| match (s, g) {
                    (Slot::Constant(a), Slot::Constant(b)) => a == b,
                    (Slot::Box(a), Slot::Box(b)) => bind(&mut trial.boxes[a], &mut bu, b),
                    (Slot::Referent(a), Slot::Referent(b)) => bind(&mut trial.referents[a], &mut ru, b),
                    _ => false,
                });
                if fits {
                    r = trial;
                    box_used = bu;
                    ref_used = ru;
                    break;
                }
            }
        }
        r
    }

    fn random(&self, rng: &mut ChaCha8Rng) -> Renaming {
        let pick = |n_sys: usize, n_gold: usize, rng: &mut ChaCha8Rng| {
            let mut targets: Vec<Option<usize>> = (0..n_gold).map(Some).collect();
            targets.resize(n_gold.max(n_sys), None);
            targets.shuffle(rng);
            targets.truncate(n_sys);
            targets
        };
        Renaming {
            boxes: pick(self.sys.boxes, self.gold.boxes, rng),
            referents: pick(self.sys.referents, self.gold.referents, rng),
        }
    }

    /// Steepest ascent over single reassignments and swaps.
    fn climb(&self, mut r: Renaming) -> (Renaming, usize) {
        let mut best = self.score(&r);
        loop {
            let mut step: Option<(Renaming, usize)> = None;
            for boxes in [true, false] {
                let n_gold = if boxes { self.gold.boxes } else { self.gold.referents };
                let n_sys = if boxes { r.boxes.len() } else { r.referents.len() };
                for v in 0..n_sys {
                    for w in 0..n_gold {
                        let mut t = r.clone();
                        let slots = t.sort(boxes);
                        if slots[v] == Some(w) {
                            continue;
                        }
                        let old = slots[v];
                        if let Some(holder) = slots.iter().position(|&x| x == Some(w)) {
                            slots[holder] = old;
                        }
                        slots[v] = Some(w);
                        let s = self.score(&t);
                        if s > step.as_ref().map_or(best, |x| x.1) {
                            step = Some((t, s));
                        }
                    }
                }
            }
            match step {
                Some((t, s)) => {
                    r = t;
                    best = s;
                }
                None => return (r, best),
            }
        }
    }
}

fn bind(slot: &mut Option<usize>, used: &mut [bool], target: usize) -> bool {
    match *slot {
        Some(t) => t == target,
        None if used[target] => false,
        None => {
            *slot = Some(target);
            used[target] = true;
            true
        }
    }
}

/// Clause-level F1: the most identical clauses under a renaming of boxes and
/// referents, found by hill climbing from a unification-based start and
/// `restarts` random starts.
pub fn clause_match(sys: &ClausalDrs, gold: &ClausalDrs, restarts: usize, seed: u64) -> ClauseMatch {
    let mut constants = HashMap::new();
    let s = number(sys, &mut constants);
    let g = number(gold, &mut constants);
    let scorer = Scorer::new(&s, &g);
    let (_, mut matched) = scorer.climb(scorer.unify_greedily());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        if matched == s.clauses.len().min(g.clauses.len()) {
            break;
        }
        let (_, m) = scorer.climb(scorer.random(&mut rng));
        matched = matched.max(m);
    }
    let (precision, recall, f1) = prf(matched, s.clauses.len(), g.clauses.len());
    ClauseMatch { matched, system_clauses: s.clauses.len(), gold_clauses: g.clauses.len(), precision, recall, f1 }
}
