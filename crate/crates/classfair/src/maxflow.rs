//! Exact maximum flow (Dinic) over arbitrary-precision integer capacities,
//! plus a direct augmenting-path maximum bipartite matching.
//!
//! Rational capacities are handled upstream by clearing denominators, so the
//! flow values here are exact `BigInt`s.

use num::bigint::BigInt;
use num::{Signed, Zero};

/// Dinic's blocking-flow algorithm with `BigInt` capacities.
pub struct Dinic {
    n: usize,
    to: Vec<usize>,
    cap: Vec<BigInt>,
    adj: Vec<Vec<usize>>,
}

impl Dinic {
    pub fn new(n: usize) -> Self {
        Dinic { n, to: Vec::new(), cap: Vec::new(), adj: vec![Vec::new(); n] }
    }

    /// Adds a directed edge `u -> v` with the given capacity; returns the
    /// edge id (its reverse edge is `id ^ 1`).
    pub fn add_edge(&mut self, u: usize, v: usize, cap: BigInt) -> usize {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        assert!(!cap.is_negative(), "negative capacity");
        let id = self.to.len();
        self.to.push(v);
        self.cap.push(cap);
        self.adj[u].push(id);
        self.to.push(u);
        self.cap.push(BigInt::zero());
        self.adj[v].push(id + 1);
        id
    }

    /// Remaining capacity of edge `id` (for reading flows after the run:
    /// flow over edge `id` equals the capacity now on `id ^ 1`).
    pub fn residual(&self, id: usize) -> &BigInt {
        &self.cap[id]
    }

    fn bfs_levels(&self, s: usize, t: usize) -> Option<Vec<i32>> {
        let mut level = vec![-1i32; self.n];
        let mut queue = std::collections::VecDeque::new();
        level[s] = 0;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &id in &self.adj[u] {
                let v = self.to[id];
                if level[v] < 0 && !self.cap[id].is_zero() {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if level[t] >= 0 {
            Some(level)
        } else {
            None
        }
    }

    fn dfs_push(
        &mut self,
        u: usize,
        t: usize,
        pushed: BigInt,
        level: &[i32],
        iter: &mut [usize],
    ) -> BigInt {
        if u == t {
            return pushed;
        }
        while iter[u] < self.adj[u].len() {
            let id = self.adj[u][iter[u]];
            let v = self.to[id];
            if level[v] == level[u] + 1 && !self.cap[id].is_zero() {
                let avail = pushed.clone().min(self.cap[id].clone());
                let got = self.dfs_push(v, t, avail, level, iter);
                if !got.is_zero() {
                    self.cap[id] -= &got;
                    self.cap[id ^ 1] += &got;
                    return got;
                }
            }
            iter[u] += 1;
        }
        BigInt::zero()
    }

    /// Computes the maximum `s -> t` flow, mutating residual capacities.
    pub fn max_flow(&mut self, s: usize, t: usize, cap_bound: BigInt) -> BigInt {
        let mut flow = BigInt::zero();
        while let Some(level) = self.bfs_levels(s, t) {
            let mut iter = vec![0usize; self.n];
            loop {
                let pushed = self.dfs_push(s, t, cap_bound.clone(), &level, &mut iter);
                if pushed.is_zero() {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }
}

/// Result of a maximum bipartite matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteMatching {
    pub size: usize,
    /// `left_match[l]` is the right node matched to left node `l`.
    pub left_match: Vec<Option<usize>>,
    /// `right_match[r]` is the left node matched to right node `r`.
    pub right_match: Vec<Option<usize>>,
}

/// Maximum bipartite matching by repeated augmenting paths (Kuhn).
/// `adj[l]` lists the right-side neighbors of left node `l`.
pub fn max_bipartite_matching(n_left: usize, n_right: usize, adj: &[Vec<usize>]) -> BipartiteMatching {
    assert_eq!(adj.len(), n_left);
    let mut right_match: Vec<Option<usize>> = vec![None; n_right];
    let mut size = 0usize;

    fn try_augment(
        l: usize,
        adj: &[Vec<usize>],
        right_match: &mut [Option<usize>],
        seen: &mut [bool],
    ) -> bool {
        for &r in &adj[l] {
            if !seen[r] {
                seen[r] = true;
                if right_match[r].is_none()
                    || try_augment(right_match[r].unwrap(), adj, right_match, seen)
                {
                    right_match[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }

    for l in 0..n_left {
        let mut seen = vec![false; n_right];
        if try_augment(l, adj, &mut right_match, &mut seen) {
            size += 1;
        }
    }
    let mut left_match = vec![None; n_left];
    for (r, l) in right_match.iter().enumerate() {
        if let Some(l) = l {
            left_match[*l] = Some(r);
        }
    }
    BipartiteMatching { size, left_match, right_match }
}

/// True iff a matching exists that saturates every left node (Hall check by
/// augmentation).
pub fn can_saturate_left(n_left: usize, n_right: usize, adj: &[Vec<usize>]) -> bool {
    max_bipartite_matching(n_left, n_right, adj).size == n_left
}
