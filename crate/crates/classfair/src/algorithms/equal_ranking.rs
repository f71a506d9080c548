//! Randomized indivisible matching with per-class fixed random ranks.
//!
//! At construction each class independently shuffles its members into a
//! permanent rank order. Each arriving item is assigned uniformly at random
//! among the classes that contain at least one agent liking it — whether or
//! not those agents are still unmatched — and inside the chosen class it
//! goes to the highest-ranked unmatched liking agent, or is discarded if the
//! class has none. Because a class with only matched likers can win the
//! draw while another class still has free likers, the algorithm discards
//! items a maximal matching would keep: it is deliberately wasteful.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::OfflineSide;
use crate::replay::{ArrivalEvent, Decision, OnlineAlgorithm};

/// Sentinel in the class-assignment log for items nobody likes.
pub const NO_CLASS: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct EqualRanking {
    offline: OfflineSide,
    rng: ChaCha8Rng,
    /// `rank_pos[a]` = position of agent `a` inside its class's shuffle;
    /// lower position = higher rank.
    rank_pos: Vec<usize>,
    matched: Vec<bool>,
    /// Per item, the class that won the draw (`NO_CLASS` if none was
    /// eligible); exposed for per-class value accounting.
    assignment_log: Vec<usize>,
}

impl EqualRanking {
    pub fn new(offline: OfflineSide, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rank_pos = vec![0; offline.n_agents()];
        for class in offline.classes() {
            let mut order: Vec<usize> = class.clone();
            for i in (1..order.len()).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            for (pos, &a) in order.iter().enumerate() {
                rank_pos[a] = pos;
            }
        }
        let matched = vec![false; offline.n_agents()];
        EqualRanking { offline, rng, rank_pos, matched, assignment_log: Vec::new() }
    }

    /// Rank positions drawn at construction (per agent, lower = higher rank).
    pub fn rank_positions(&self) -> &[usize] {
        &self.rank_pos
    }

    /// Which class each item so far was assigned to (`NO_CLASS` = none).
    pub fn class_assignments(&self) -> &[usize] {
        &self.assignment_log
    }
}

impl OnlineAlgorithm for EqualRanking {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        let mut eligible: Vec<usize> =
            event.neighbors.iter().map(|&a| self.offline.class_of(a)).collect();
        eligible.sort_unstable();
        eligible.dedup();
        if eligible.is_empty() {
            self.assignment_log.push(NO_CLASS);
            return Decision::discard();
        }
        let class = eligible[self.rng.random_range(0..eligible.len())];
        self.assignment_log.push(class);
        let winner = event
            .neighbors
            .iter()
            .copied()
            .filter(|&a| self.offline.class_of(a) == class && !self.matched[a])
            .min_by_key(|&a| self.rank_pos[a]);
        match winner {
            Some(a) => {
                self.matched[a] = true;
                Decision::to_agent(a)
            }
            None => Decision::discard(),
        }
    }

    fn name(&self) -> &'static str {
        "equal-ranking"
    }
}
