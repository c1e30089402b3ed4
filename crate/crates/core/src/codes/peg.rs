//! Bipartite graph construction with prescribed degree sequences.
//!
//! The primary builder is progressive edge growth (PEG) with per-check
//! capacities, so both degree sequences are met exactly. Each new edge of a
//! variable node goes to a check that is as far away as possible in the
//! current graph, preferring checks with the most unused sockets. If PEG
//! cannot place an edge, construction restarts with random socket matching.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Builds variable-side adjacency lists meeting both degree sequences.
pub(crate) fn build_graph<R: Rng>(
    var_degrees: &[usize],
    check_degrees: &[usize],
    girth_avoidance: bool,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    debug_assert_eq!(var_degrees.iter().sum::<usize>(), check_degrees.iter().sum::<usize>());
    if girth_avoidance {
        if let Some(adj) = Peg::new(var_degrees, check_degrees).run(rng) {
            return Ok(adj);
        }
    }
    socket_matching(var_degrees, check_degrees, rng)
}

struct Peg {
    var_degrees: Vec<usize>,
    cap: Vec<usize>,
    with_cap: usize,
    var_adj: Vec<Vec<usize>>,
    check_adj: Vec<Vec<usize>>,
    var_mark: Vec<u32>,
    check_mark: Vec<u32>,
    epoch: u32,
}

impl Peg {
    fn new(var_degrees: &[usize], check_degrees: &[usize]) -> Self {
        Self {
            var_degrees: var_degrees.to_vec(),
            cap: check_degrees.to_vec(),
            with_cap: check_degrees.iter().filter(|&&d| d > 0).count(),
            var_adj: var_degrees.iter().map(|&d| Vec::with_capacity(d)).collect(),
            check_adj: check_degrees.iter().map(|&d| Vec::with_capacity(d)).collect(),
            var_mark: vec![0; var_degrees.len()],
            check_mark: vec![0; check_degrees.len()],
            epoch: 0,
        }
    }

    fn run<R: Rng>(mut self, rng: &mut R) -> Option<Vec<Vec<usize>>> {
        let mut order: Vec<usize> = (0..self.var_degrees.len()).collect();
        order.sort_by_key(|&v| self.var_degrees[v]);
        let mut candidates = Vec::new();
        for v in order {
            for _ in 0..self.var_degrees[v] {
                self.candidates(v, &mut candidates);
                let c = pick_max_cap(&candidates, &self.cap, rng)?;
                self.connect(v, c);
            }
        }
        for adj in &mut self.var_adj {
            adj.sort_unstable();
        }
        Some(self.var_adj)
    }

    fn connect(&mut self, v: usize, c: usize) {
        self.var_adj[v].push(c);
        self.check_adj[c].push(v);
        self.cap[c] -= 1;
        if self.cap[c] == 0 {
            self.with_cap -= 1;
        }
    }

    /// Fills `out` with the checks at maximal distance from `v` that still
    /// have free sockets.
    fn candidates(&mut self, v: usize, out: &mut Vec<usize>) {
        out.clear();
        if self.var_adj[v].is_empty() {
            out.extend((0..self.cap.len()).filter(|&c| self.cap[c] > 0));
            return;
        }
        self.epoch += 1;
        let epoch = self.epoch;
        self.var_mark[v] = epoch;
        let mut frontier = vec![v];
        let mut reached_with_cap = 0;
        let mut new_checks = Vec::new();
        loop {
            new_checks.clear();
            for &u in &frontier {
                for &c in &self.var_adj[u] {
                    if self.check_mark[c] != epoch {
                        self.check_mark[c] = epoch;
                        new_checks.push(c);
                        if self.cap[c] > 0 {
                            reached_with_cap += 1;
                        }
                    }
                }
            }
            if new_checks.is_empty() {
                break;
            }
            if reached_with_cap == self.with_cap {
                // Everything with capacity is reachable: use the newest layer,
                // excluding the node's own neighbours.
                out.extend(
                    new_checks
                        .iter()
                        .copied()
                        .filter(|&c| self.cap[c] > 0 && !self.var_adj[v].contains(&c)),
                );
                if out.is_empty() {
                    self.fallback_candidates(v, out);
                }
                return;
            }
            let mut next = Vec::new();
            for &c in &new_checks {
                for &u in &self.check_adj[c] {
                    if self.var_mark[u] != epoch {
                        self.var_mark[u] = epoch;
                        next.push(u);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        out.extend((0..self.cap.len()).filter(|&c| self.cap[c] > 0 && self.check_mark[c] != epoch));
        if out.is_empty() {
            self.fallback_candidates(v, out);
        }
    }

    fn fallback_candidates(&self, v: usize, out: &mut Vec<usize>) {
        out.extend((0..self.cap.len()).filter(|&c| self.cap[c] > 0 && !self.var_adj[v].contains(&c)));
    }
}

fn pick_max_cap<R: Rng>(candidates: &[usize], cap: &[usize], rng: &mut R) -> Option<usize> {
    let best = candidates.iter().map(|&c| cap[c]).max()?;
    let ties: Vec<usize> = candidates.iter().copied().filter(|&c| cap[c] == best).collect();
    ties.choose(rng).copied()
}

fn socket_matching<R: Rng>(var_degrees: &[usize], check_degrees: &[usize], rng: &mut R) -> Result<Vec<Vec<usize>>> {
    let mut check_sockets: Vec<usize> = check_degrees
        .iter()
        .enumerate()
        .flat_map(|(c, &d)| std::iter::repeat_n(c, d))
        .collect();
    let owners: Vec<usize> = var_degrees
        .iter()
        .enumerate()
        .flat_map(|(v, &d)| std::iter::repeat_n(v, d))
        .collect();
    let edges = owners.len();
    let mut set: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    for _attempt in 0..50 {
        check_sockets.shuffle(rng);
        set.clear();
        let mut dup = Vec::new();
        for (e, (&v, &c)) in owners.iter().zip(&check_sockets).enumerate() {
            if !set.insert((v, c)) {
                dup.push(e);
            }
        }
        // Resolve duplicates by swapping check endpoints with random edges.
        let mut budget = 100 * (dup.len() + 1);
        while let Some(&e) = dup.last() {
            if budget == 0 {
                break;
            }
            budget -= 1;
            let f = rng.gen_range(0..edges);
            let (ve, ce) = (owners[e], check_sockets[e]);
            let (vf, cf) = (owners[f], check_sockets[f]);
            if e == f || set.contains(&(ve, cf)) || set.contains(&(vf, ce)) || ve == vf {
                continue;
            }
            // Edge f is present in the set; edge e is a duplicate so (ve, ce)
            // stays in the set on behalf of its first occurrence.
            set.remove(&(vf, cf));
            set.insert((ve, cf));
            set.insert((vf, ce));
            check_sockets.swap(e, f);
            dup.pop();
        }
        if dup.is_empty() {
            let mut adj = vec![Vec::new(); var_degrees.len()];
            for (&v, &c) in owners.iter().zip(&check_sockets) {
                adj[v].push(c);
            }
            for a in &mut adj {
                a.sort_unstable();
            }
            return Ok(adj);
        }
    }
    Err(Error::Infeasible(
        "random socket matching could not avoid parallel edges".into(),
    ))
}
