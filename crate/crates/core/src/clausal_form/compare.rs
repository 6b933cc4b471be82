use std::collections::HashMap;

use super::{ClausalDrs, Head, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Sort {
    Box,
    Referent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Slot {
    Var(usize),
    Constant(String),
}

/// A clause with variables replaced by dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Shape {
    head: Head,
    slots: Vec<Slot>,
}

struct Indexed {
    sorts: Vec<Sort>,
    shapes: Vec<Shape>,
    /// Per variable: sorted list of (head, position) occurrences.
    profiles: Vec<Vec<(Head, usize)>>,
}

fn index<'a>(drs: &'a ClausalDrs) -> Indexed {
    let mut ids: HashMap<&str, usize> = HashMap::new();
    let mut sorts = Vec::new();
    let mut var = |s: &'a str| -> usize {
        *ids.entry(s).or_insert_with(|| {
            sorts.push(if super::is_box_label(s) { Sort::Box } else { Sort::Referent });
            sorts.len() - 1
        })
    };
    let mut shapes = Vec::with_capacity(drs.len());
    for c in drs.clauses() {
        let mut slots = vec![Slot::Var(var(&c.box_label))];
        for a in &c.args {
            slots.push(match a {
                Term::BoxLabel(s) | Term::Referent(s) => Slot::Var(var(s)),
                Term::Constant(s) => Slot::Constant(s.clone()),
            });
        }
        shapes.push(Shape { head: c.head.clone(), slots });
    }
    let mut profiles = vec![Vec::new(); sorts.len()];
    for s in &shapes {
        for (pos, slot) in s.slots.iter().enumerate() {
            if let Slot::Var(v) = slot {
                profiles[*v].push((s.head.clone(), pos));
            }
        }
    }
    for p in &mut profiles {
        p.sort();
    }
    Indexed { sorts, shapes, profiles }
}

/// True when the two DRSs contain the same multiset of clauses after a
/// one-to-one renaming of box labels and referents. Anchors, comments,
/// clause order and document ids are ignored. Referents may be renamed
/// across prefixes (`e1` to `x3`).
pub fn equivalent_modulo_renaming(a: &ClausalDrs, b: &ClausalDrs) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ia = index(a);
    let ib = index(b);
    if ia.sorts.len() != ib.sorts.len() {
        return false;
    }
    let mut target: HashMap<Shape, usize> = HashMap::new();
    for s in &ib.shapes {
        *target.entry(s.clone()).or_default() += 1;
    }
    // clauses of `a` grouped by the last variable they mention, so each can be
    // checked as soon as it is fully mapped
    let mut ready: Vec<Vec<usize>> = vec![Vec::new(); ia.sorts.len()];
    let mut constant_only = Vec::new();
    for (i, s) in ia.shapes.iter().enumerate() {
        match s.slots.iter().filter_map(|x| if let Slot::Var(v) = x { Some(*v) } else { None }).max() {
            Some(v) => ready[v].push(i),
            None => constant_only.push(i),
        }
    }
    let mut state = Search {
        a: &ia,
        b: &ib,
        ready: &ready,
        map: vec![usize::MAX; ia.sorts.len()],
        used: vec![false; ib.sorts.len()],
        remaining: target,
    };
    for &i in &constant_only {
        if !state.take(&ia.shapes[i]) {
            return false;
        }
    }
    state.assign(0)
}

struct Search<'a> {
    a: &'a Indexed,
    b: &'a Indexed,
    ready: &'a [Vec<usize>],
    map: Vec<usize>,
    used: Vec<bool>,
    remaining: HashMap<Shape, usize>,
}

impl<'a> Search<'a> {
    fn image(&self, s: &Shape) -> Shape {
        let slots = s
            .slots
            .iter()
            .map(|x| match x {
                Slot::Var(v) => Slot::Var(self.map[*v]),
                c => c.clone(),
            })
            .collect();
        Shape { head: s.head.clone(), slots }
    }

    fn take(&mut self, s: &Shape) -> bool {
        let img = self.image(s);
        match self.remaining.get_mut(&img) {
            Some(n) if *n > 0 => {
                *n -= 1;
                true
            }
            _ => false,
        }
    }

    fn give_back(&mut self, s: &Shape) {
        let img = self.image(s);
        if let Some(n) = self.remaining.get_mut(&img) {
            *n += 1;
        }
    }

    fn assign(&mut self, v: usize) -> bool {
        if v == self.a.sorts.len() {
            return true;
        }
        for w in 0..self.b.sorts.len() {
            if self.used[w] || self.a.sorts[v] != self.b.sorts[w] || self.a.profiles[v] != self.b.profiles[w] {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            let mut taken = Vec::new();
            let mut ok = true;
            for &i in &self.ready[v] {
                if self.take(&self.a.shapes[i]) {
                    taken.push(i);
                } else {
                    ok = false;
                    break;
                }
            }
            if ok && self.assign(v + 1) {
                return true;
            }
            for &i in &taken {
                self.give_back(&self.a.shapes[i]);
            }
            self.used[w] = false;
            self.map[v] = usize::MAX;
        }
        false
    }
}
