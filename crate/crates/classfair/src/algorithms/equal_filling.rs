//! Divisible online matching by two-level exact water-filling.
//!
//! Each arriving item is first split across classes: class `i` demands
//! `d_i = Σ_{a ∈ N_i(o)} (1 − load(a))` and receives `y_i = min(β, d_i)`,
//! where `β` is the largest level ≤ 1 with `Σ_i min(β, d_i) ≤ 1`. Inside a
//! class the share is poured so that the lowest-loaded liking agents rise to
//! a common level `γ`, the largest level ≤ 1 with
//! `Σ_a max(γ − load(a), 0) ≤ y_i`. All levels are solved exactly in
//! rational arithmetic by sorting breakpoints; the item is ever
//! under-assigned only when every liking agent is already saturated.

use num::{Signed, Zero};

use super::{clipped_level_is_tight, largest_level_clipped, largest_level_excess};
use crate::frac::Frac;
use crate::instance::OfflineSide;
use crate::replay::{ArrivalEvent, Decision, OnlineAlgorithm};

#[derive(Debug, Clone)]
pub struct EqualFilling {
    offline: OfflineSide,
    loads: Vec<Frac>,
}

impl EqualFilling {
    pub fn new(offline: OfflineSide) -> Self {
        let loads = vec![Frac::zero(); offline.n_agents()];
        EqualFilling { offline, loads }
    }

    /// Current per-agent loads as tracked by the algorithm.
    pub fn loads(&self) -> &[Frac] {
        &self.loads
    }
}

impl OnlineAlgorithm for EqualFilling {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        let one = Frac::from_integer(1.into());
        // Group the item's neighbors by class and compute residual demands.
        let k = self.offline.k();
        let mut class_agents: Vec<Vec<usize>> = vec![Vec::new(); k];
        for &a in &event.neighbors {
            class_agents[self.offline.class_of(a)].push(a);
        }
        let demands: Vec<Frac> = class_agents
            .iter()
            .map(|agents| agents.iter().map(|&a| &one - &self.loads[a]).sum())
            .collect();

        let beta = largest_level_clipped(&demands, &one, &one);
        debug_assert!(clipped_level_is_tight(&beta, &demands, &one, &one));

        let mut assignment = Vec::new();
        for (agents, d) in class_agents.iter().zip(&demands) {
            let share = beta.clone().min(d.clone());
            if share.is_zero() {
                continue;
            }
            let bases: Vec<Frac> = agents.iter().map(|&a| self.loads[a].clone()).collect();
            let gamma = largest_level_excess(&bases, &share, &one);
            for (&a, base) in agents.iter().zip(&bases) {
                let give = &gamma - base;
                if give.is_positive() {
                    self.loads[a] += &give;
                    assignment.push((a, give));
                }
            }
        }
        Decision::fractional(assignment)
    }

    fn name(&self) -> &'static str {
        "equal-filling"
    }
}
