//! Indivisible online matching driven by a rotating class priority list.
//!
//! The algorithm keeps a permutation of the classes. Each arriving item goes
//! to the highest-priority class that still has an unmatched agent liking
//! the item; a tie-break strategy picks the agent inside that class, and the
//! receiving class moves to the back of the permutation. The item is
//! discarded only when no unmatched liking agent exists in any class, so the
//! output is always a maximal (non-wasteful) matching.

use std::collections::VecDeque;

use super::TieBreak;
use crate::instance::OfflineSide;
use crate::replay::{ArrivalEvent, Decision, OnlineAlgorithm};

#[derive(Debug)]
pub struct MatchAndShift {
    offline: OfflineSide,
    /// Current class priority order, front = highest priority.
    priority: VecDeque<usize>,
    matched: Vec<bool>,
    tie: TieBreak,
}

impl MatchAndShift {
    /// Starts with priority order `0, 1, …, k-1`.
    pub fn new(offline: OfflineSide, tie: TieBreak) -> Self {
        Self::with_order(offline, tie, None)
    }

    /// Starts with an explicit initial priority order (a permutation of the
    /// class indices); `None` means class-index order.
    pub fn with_order(offline: OfflineSide, tie: TieBreak, order: Option<Vec<usize>>) -> Self {
        let k = offline.k();
        let priority: VecDeque<usize> = match order {
            Some(o) => {
                let mut seen = vec![false; k];
                assert_eq!(o.len(), k, "initial order must cover every class");
                for &c in &o {
                    assert!(c < k && !seen[c], "initial order must be a permutation");
                    seen[c] = true;
                }
                o.into()
            }
            None => (0..k).collect(),
        };
        let matched = vec![false; offline.n_agents()];
        MatchAndShift { offline, priority, matched, tie }
    }

    /// The current priority order (front first); exposed for tests and traces.
    pub fn priority_order(&self) -> Vec<usize> {
        self.priority.iter().copied().collect()
    }
}

impl OnlineAlgorithm for MatchAndShift {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        for pos in 0..self.priority.len() {
            let class = self.priority[pos];
            let candidates: Vec<usize> = event
                .neighbors
                .iter()
                .copied()
                .filter(|&a| self.offline.class_of(a) == class && !self.matched[a])
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let agent = self.tie.pick(&candidates);
            self.matched[agent] = true;
            self.priority.remove(pos);
            self.priority.push_back(class);
            return Decision::to_agent(agent);
        }
        Decision::discard()
    }

    fn name(&self) -> &'static str {
        "match-and-shift"
    }
}
