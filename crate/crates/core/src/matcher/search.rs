use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Drg;

use super::schedule::schedule;
use super::{prf, CandidatePair, MatchOptions, MatchResult, Problem, SearchBudget};

const RESTARTS: usize = 4;
const MAX_SWEEPS: usize = 50;

pub fn mces(sys: &Drg, gold: &Drg, budget: &SearchBudget, seed: u64) -> MatchResult {
    mces_with(sys, gold, budget, seed, &MatchOptions::default())
}

/// Exact search for the map preserving the most items. The search starts
/// from a greedy map over the best scheduled pairs, then runs depth-first
/// branch and bound. If the budget runs out, seeded hill climbing from the
/// full greedy map and from random maps may still improve on the best map
/// seen, and the result carries `exact = false`.
pub fn mces_with(sys: &Drg, gold: &Drg, budget: &SearchBudget, seed: u64, options: &MatchOptions) -> MatchResult {
    let p = Problem::new(sys, gold, options);
    let mut search = Search::new(&p, budget);

    let pairs = schedule(&p);
    let seed_map = greedy(&p, &pairs[..pairs.len().min(budget.max_candidate_pairs)]);
    search.offer(&seed_map, p.matched(&seed_map));
    search.run();

    let truncated = search.truncated;
    let expansions = search.expansions;
    let mut mapping = search.best_map;
    let mut matched = search.best;
    if truncated {
        let (m, v) = hill_climb(&p, &search.cands, greedy(&p, &pairs), seed);
        if v > matched {
            mapping = m;
            matched = v;
        }
    }
    let (precision, recall, f1) = prf(matched, p.sys_items, p.gold_items);
    MatchResult {
        mapping,
        matched,
        system_items: p.sys_items,
        gold_items: p.gold_items,
        precision,
        recall,
        f1,
        exact: !truncated,
        expansions,
    }
}

/// Takes pairs in order whenever both nodes are still free.
fn greedy(p: &Problem, pairs: &[CandidatePair]) -> Vec<Option<usize>> {
    let mut map = vec![None; p.ns];
    let mut taken = vec![false; p.ng];
    for c in pairs {
        if map[c.sys].is_none() && !taken[c.gold] {
            map[c.sys] = Some(c.gold);
            taken[c.gold] = true;
        }
    }
    map
}

struct Search<'a> {
    p: &'a Problem,
    order: Vec<usize>,
    cands: Vec<Vec<usize>>,
    map: Vec<Option<usize>>,
    decided: Vec<bool>,
    used: Vec<bool>,
    current: usize,
    sys_feat: Vec<u32>,
    gold_feat: Vec<u32>,
    feat_bound: usize,
    sys_open: Vec<u32>,
    gold_open: Vec<u32>,
    edge_bound: usize,
    root_bound: usize,
    best: usize,
    best_map: Vec<Option<usize>>,
    expansions: u64,
    max_expansions: u64,
    deadline: Option<Instant>,
    stop: bool,
    truncated: bool,
}

fn shrink(mine: &mut [u32], other: &[u32], i: usize, bound: &mut usize) {
    let before = mine[i].min(other[i]);
    mine[i] -= 1;
    *bound -= (before - mine[i].min(other[i])) as usize;
}

fn grow(mine: &mut [u32], other: &[u32], i: usize, bound: &mut usize) {
    let before = mine[i].min(other[i]);
    mine[i] += 1;
    *bound += (mine[i].min(other[i]) - before) as usize;
}

impl<'a> Search<'a> {
    fn new(p: &'a Problem, budget: &SearchBudget) -> Self {
        let cands: Vec<Vec<usize>> = (0..p.ns)
            .map(|s| {
                let mut c: Vec<usize> = (0..p.ng).filter(|&g| p.potential(s, g) > 0).collect();
                c.sort_by(|&a, &b| p.potential(s, b).cmp(&p.potential(s, a)).then(a.cmp(&b)));
                c
            })
            .collect();

        let mut sys_feat = vec![0u32; p.n_feats];
        let mut gold_feat = vec![0u32; p.n_feats];
        p.sys_feats.iter().flatten().for_each(|&f| sys_feat[f as usize] += 1);
        p.gold_feats.iter().flatten().for_each(|&f| gold_feat[f as usize] += 1);
        let mut sys_open = vec![0u32; p.n_labels];
        let mut gold_open = vec![0u32; p.n_labels];
        p.sys_edges.iter().for_each(|e| sys_open[e.2 as usize] += 1);
        p.gold_edges.iter().for_each(|e| gold_open[e.2 as usize] += 1);
        let feat_bound = sys_feat.iter().zip(&gold_feat).map(|(a, b)| a.min(b)).sum::<u32>() as usize;
        let edge_bound = sys_open.iter().zip(&gold_open).map(|(a, b)| a.min(b)).sum::<u32>() as usize;

        let mut s = Search {
            p,
            order: Vec::new(),
            cands,
            map: vec![None; p.ns],
            decided: vec![false; p.ns],
            used: vec![false; p.ng],
            current: 0,
            sys_feat,
            gold_feat,
            feat_bound,
            sys_open,
            gold_open,
            edge_bound,
            root_bound: 0,
            best: 0,
            best_map: vec![None; p.ns],
            expansions: 0,
            max_expansions: budget.max_expansions,
            deadline: budget.wall_clock_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
            stop: false,
            truncated: false,
        };
        for n in 0..p.ns {
            if s.cands[n].is_empty() {
                s.decide_none(n);
            }
        }
        s.order = s.search_order();
        s.root_bound = s.feat_bound + s.edge_bound;
        s
    }

    /// Start from the richest node, then always take the node with the most
    /// edges into the already ordered part.
    fn search_order(&self) -> Vec<usize> {
        let p = self.p;
        let mut left: Vec<usize> = (0..p.ns).filter(|&n| !self.decided[n]).collect();
        let mut placed = vec![false; p.ns];
        let mut order = Vec::with_capacity(left.len());
        while !left.is_empty() {
            let key = |n: usize| {
                let linked = p.sys_adj[n].iter().filter(|a| placed[a.1]).count();
                (linked, p.sys_adj[n].len() + p.sys_feats[n].len())
            };
            let (i, _) = left
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| key(a).cmp(&key(b)).then(b.cmp(&a)))
                .expect("non-empty");
            let n = left.remove(i);
            placed[n] = true;
            order.push(n);
        }
        order
    }

    fn offer(&mut self, map: &[Option<usize>], value: usize) {
        if value > self.best {
            self.best = value;
            self.best_map = map.to_vec();
        }
    }

    fn gain(&self, s: usize, g: usize) -> usize {
        let p = self.p;
        let mut gain = p.node_score(s, g) as usize;
        for &(e, u, out) in &p.sys_adj[s] {
            if let Some(h) = self.map[u] {
                let key = if out { (g, h, p.sys_edges[e].2) } else { (h, g, p.sys_edges[e].2) };
                gain += usize::from(p.gold_edge_set.contains(&key));
            }
        }
        gain
    }

    fn decide_none(&mut self, s: usize) {
        let p = self.p;
        for &f in &p.sys_feats[s] {
            shrink(&mut self.sys_feat, &self.gold_feat, f as usize, &mut self.feat_bound);
        }
        for &(e, u, _) in &p.sys_adj[s] {
            if !self.decided[u] || self.map[u].is_some() {
                shrink(&mut self.sys_open, &self.gold_open, p.sys_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        self.decided[s] = true;
    }

    fn undo_none(&mut self, s: usize) {
        let p = self.p;
        self.decided[s] = false;
        for &(e, u, _) in &p.sys_adj[s] {
            if !self.decided[u] || self.map[u].is_some() {
                grow(&mut self.sys_open, &self.gold_open, p.sys_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        for &f in &p.sys_feats[s] {
            grow(&mut self.sys_feat, &self.gold_feat, f as usize, &mut self.feat_bound);
        }
    }

    fn decide(&mut self, s: usize, g: usize) {
        let p = self.p;
        for &f in &p.sys_feats[s] {
            shrink(&mut self.sys_feat, &self.gold_feat, f as usize, &mut self.feat_bound);
        }
        for &f in &p.gold_feats[g] {
            shrink(&mut self.gold_feat, &self.sys_feat, f as usize, &mut self.feat_bound);
        }
        for &(e, u, _) in &p.sys_adj[s] {
            if self.map[u].is_some() {
                shrink(&mut self.sys_open, &self.gold_open, p.sys_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        for &(e, h, _) in &p.gold_adj[g] {
            if self.used[h] {
                shrink(&mut self.gold_open, &self.sys_open, p.gold_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        self.decided[s] = true;
        self.map[s] = Some(g);
        self.used[g] = true;
    }

    fn undo(&mut self, s: usize, g: usize) {
        let p = self.p;
        self.used[g] = false;
        self.map[s] = None;
        self.decided[s] = false;
        for &(e, h, _) in &p.gold_adj[g] {
            if self.used[h] {
                grow(&mut self.gold_open, &self.sys_open, p.gold_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        for &(e, u, _) in &p.sys_adj[s] {
            if self.map[u].is_some() {
                grow(&mut self.sys_open, &self.gold_open, p.sys_edges[e].2 as usize, &mut self.edge_bound);
            }
        }
        for &f in &p.gold_feats[g] {
            grow(&mut self.gold_feat, &self.sys_feat, f as usize, &mut self.feat_bound);
        }
        for &f in &p.sys_feats[s] {
            grow(&mut self.sys_feat, &self.gold_feat, f as usize, &mut self.feat_bound);
        }
    }

    /// Counts one expansion; false once the budget is spent.
    fn tick(&mut self) -> bool {
        if self.expansions >= self.max_expansions {
            self.stop = true;
            self.truncated = true;
            return false;
        }
        self.expansions += 1;
        if let Some(deadline) = self.deadline {
            if self.expansions % 256 == 0 && Instant::now() >= deadline {
                self.stop = true;
                self.truncated = true;
                return false;
            }
        }
        true
    }

    fn run(&mut self) {
        if self.best < self.root_bound {
            self.dfs(0);
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.current > self.best {
            self.best = self.current;
            self.best_map = self.map.clone();
            if self.best >= self.root_bound {
                self.stop = true;
                return;
            }
        }
        if depth == self.order.len() || self.current + self.feat_bound + self.edge_bound <= self.best {
            return;
        }
        let s = self.order[depth];
        let mut options: Vec<(usize, u32, usize)> = self.cands[s]
            .iter()
            .filter(|&&g| !self.used[g])
            .map(|&g| (self.gain(s, g), self.p.potential(s, g), g))
            .collect();
        options.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
        for (gain, _, g) in options {
            if self.stop || !self.tick() {
                return;
            }
            self.decide(s, g);
            self.current += gain;
            self.dfs(depth + 1);
            self.current -= gain;
            self.undo(s, g);
        }
        if self.stop || !self.tick() {
            return;
        }
        self.decide_none(s);
        self.dfs(depth + 1);
        self.undo_none(s);
    }
}

/// Items touching `s` preserved under `map`.
fn contribution(p: &Problem, map: &[Option<usize>], s: usize) -> usize {
    let Some(g) = map[s] else { return 0 };
    let mut n = p.node_score(s, g) as usize;
    for &(e, u, out) in &p.sys_adj[s] {
        if let Some(h) = map[u] {
            let key = if out { (g, h, p.sys_edges[e].2) } else { (h, g, p.sys_edges[e].2) };
            n += usize::from(p.gold_edge_set.contains(&key));
        }
    }
    n
}

/// Preserved edges running between `a` and `b`.
fn shared_edges(p: &Problem, map: &[Option<usize>], a: usize, b: usize) -> usize {
    let (Some(ga), Some(gb)) = (map[a], map[b]) else { return 0 };
    p.sys_adj[a]
        .iter()
        .filter(|&&(_, u, _)| u == b)
        .filter(|&&(e, _, out)| {
            let key = if out { (ga, gb, p.sys_edges[e].2) } else { (gb, ga, p.sys_edges[e].2) };
            p.gold_edge_set.contains(&key)
        })
        .count()
}

/// Moves a system node to a free candidate or swaps targets with the system
/// node holding it; keeps any strictly improving move.
fn climb(p: &Problem, cands: &[Vec<usize>], map: &mut [Option<usize>], rng: &mut ChaCha8Rng) {
    let mut owner: Vec<Option<usize>> = vec![None; p.ng];
    for (s, m) in map.iter().enumerate() {
        if let Some(g) = m {
            owner[*g] = Some(s);
        }
    }
    let mut nodes: Vec<usize> = (0..p.ns).filter(|&s| !cands[s].is_empty()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut improved = false;
        nodes.shuffle(rng);
        for &s in &nodes {
            for &g in &cands[s] {
                if map[s] == Some(g) {
                    continue;
                }
                let old = map[s];
                match owner[g] {
                    None => {
                        let before = contribution(p, map, s);
                        map[s] = Some(g);
                        if contribution(p, map, s) > before {
                            if let Some(o) = old {
                                owner[o] = None;
                            }
                            owner[g] = Some(s);
                            improved = true;
                        } else {
                            map[s] = old;
                        }
                    }
                    Some(t) => {
                        let value = |map: &[Option<usize>]| contribution(p, map, s) + contribution(p, map, t) - shared_edges(p, map, s, t);
                        let before = value(map);
                        map[s] = Some(g);
                        map[t] = old;
                        if value(map) > before {
                            owner[g] = Some(s);
                            if let Some(o) = old {
                                owner[o] = Some(t);
                            }
                            improved = true;
                        } else {
                            map[s] = old;
                            map[t] = Some(g);
                        }
                    }
                }
            }
        }
        if !improved {
            break;
        }
    }
}

fn hill_climb(p: &Problem, cands: &[Vec<usize>], start: Vec<Option<usize>>, seed: u64) -> (Vec<Option<usize>>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = start.clone();
    climb(p, cands, &mut best, &mut rng);
    let mut best_value = p.matched(&best);
    for _ in 0..RESTARTS {
        let mut map = vec![None; p.ns];
        let mut used = vec![false; p.ng];
        let mut nodes: Vec<usize> = (0..p.ns).filter(|&s| !cands[s].is_empty()).collect();
        nodes.shuffle(&mut rng);
        for s in nodes {
            let free: Vec<usize> = cands[s].iter().copied().filter(|&g| !used[g]).collect();
            if !free.is_empty() {
                let g = free[rng.gen_range(0..free.len())];
                map[s] = Some(g);
                used[g] = true;
            }
        }
        climb(p, cands, &mut map, &mut rng);
        let v = p.matched(&map);
        if v > best_value {
            best_value = v;
            best = map;
        }
    }
    (best, best_value)
}
