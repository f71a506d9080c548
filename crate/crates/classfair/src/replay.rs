//! The online arrival protocol.
//!
//! An online algorithm sees the offline side (classes) up front; items then
//! arrive one at a time, each revealed only as its set of liking agents. The
//! algorithm must answer each arrival immediately with an irrevocable
//! (possibly fractional, possibly empty) assignment supported on the
//! revealed neighbors and respecting remaining capacities.
//!
//! [`replay_online`] drives an algorithm over a known instance and records a
//! step-indexed log; [`run_adaptive`] drives it against an adversary that
//! chooses each arrival after observing the current matching, then assembles
//! the instance the adversary revealed.

use crate::frac::Frac;
use crate::instance::{Instance, InstanceError, OfflineSide};
use crate::matching::FractionalMatching;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// One arriving item: its id (equal to its arrival position) and the sorted
/// set of agents that like it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalEvent {
    pub item: usize,
    pub neighbors: Vec<usize>,
}

/// An irrevocable answer to one arrival: how much of the item each agent
/// receives. An empty assignment discards the item.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decision {
    pub assignment: Vec<(usize, Frac)>,
}

impl Decision {
    pub fn discard() -> Self {
        Decision { assignment: Vec::new() }
    }

    /// Assigns the whole item to one agent.
    pub fn to_agent(agent: usize) -> Self {
        Decision { assignment: vec![(agent, Frac::one())] }
    }

    pub fn fractional(assignment: Vec<(usize, Frac)>) -> Self {
        Decision { assignment }
    }
}

/// A deterministic-or-self-randomized online matching algorithm.
///
/// Implementations are constructed from the offline side only and keep all
/// run state internally; a fresh value must be used per run.
pub trait OnlineAlgorithm {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision;

    /// Human-readable name used in reports.
    fn name(&self) -> &'static str {
        "algorithm"
    }
}

/// Protocol violations surfaced by the replay layer, tagged with the
/// zero-based arrival step at which they occurred.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProtocolViolation {
    #[error("step {step}: assignment to agent {agent} who does not like the item")]
    OffSupport { step: usize, agent: usize },
    #[error("step {step}: negative mass for agent {agent}")]
    NegativeMass { step: usize, agent: usize },
    #[error("step {step}: item mass exceeds one")]
    ItemOverfilled { step: usize },
    #[error("step {step}: agent {agent} exceeds capacity one")]
    AgentOverfilled { step: usize, agent: usize },
    #[error("step {step}: adversary emitted a neighbor id {agent} out of range")]
    BadNeighbor { step: usize, agent: usize },
    #[error("adversary produced an invalid instance: {0}")]
    BadInstance(#[from] InstanceError),
}

/// Step-indexed record of one online run.
#[derive(Debug, Clone)]
pub struct ReplayLog {
    /// `snapshots[t]` is the matching after deciding arrival `t`;
    /// `snapshots.len() == n_items`.
    pub snapshots: Vec<FractionalMatching>,
    /// The matching after the final arrival (empty matching when no items).
    pub final_matching: FractionalMatching,
    /// The decisions as applied (zero entries dropped, per-agent merged).
    pub decisions: Vec<Decision>,
}

/// Validates one decision against the current matching and applies it.
fn apply_decision(
    step: usize,
    event: &ArrivalEvent,
    decision: &Decision,
    matching: &mut FractionalMatching,
) -> Result<Decision, ProtocolViolation> {
    // Merge duplicate agents and drop zero entries first.
    let mut merged: BTreeMap<usize, Frac> = BTreeMap::new();
    for (agent, mass) in &decision.assignment {
        if mass.is_negative() {
            return Err(ProtocolViolation::NegativeMass { step, agent: *agent });
        }
        if mass.is_zero() {
            continue;
        }
        *merged.entry(*agent).or_insert_with(Frac::zero) += mass;
    }
    let one = Frac::one();
    let mut item_total = Frac::zero();
    for (agent, mass) in &merged {
        if event.neighbors.binary_search(agent).is_err() {
            return Err(ProtocolViolation::OffSupport { step, agent: *agent });
        }
        item_total += mass;
        if matching.agent_load(*agent) + mass > one {
            return Err(ProtocolViolation::AgentOverfilled { step, agent: *agent });
        }
    }
    if item_total > one {
        return Err(ProtocolViolation::ItemOverfilled { step });
    }
    for (agent, mass) in &merged {
        matching.add(*agent, event.item, mass);
    }
    Ok(Decision { assignment: merged.into_iter().collect() })
}

/// Drives `algo` over the arrivals of a known instance.
pub fn replay_online(
    inst: &Instance,
    algo: &mut dyn OnlineAlgorithm,
) -> Result<ReplayLog, ProtocolViolation> {
    let mut matching = FractionalMatching::empty(inst.n_agents(), inst.n_items());
    let mut snapshots = Vec::with_capacity(inst.n_items());
    let mut decisions = Vec::with_capacity(inst.n_items());
    for item in 0..inst.n_items() {
        let event = ArrivalEvent { item, neighbors: inst.item_neighbors(item).to_vec() };
        let decision = algo.decide(&event);
        decisions.push(apply_decision(item, &event, &decision, &mut matching)?);
        snapshots.push(matching.clone());
    }
    Ok(ReplayLog { snapshots, final_matching: matching, decisions })
}

/// An adversary that reveals arrivals one by one, each chosen after
/// observing the matching produced so far.
pub trait AdaptiveAdversary {
    /// The fixed offline side revealed to the algorithm up front.
    fn offline(&self) -> OfflineSide;

    /// Liking agents of the next item, or `None` when the sequence ends.
    /// `current` is the matching after the previous decision.
    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>>;

    /// Free-form remarks recorded after the run (e.g. that the algorithm
    /// left the intended guarantee's preconditions, making it lapse).
    fn notes(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Outcome of an adaptive run: the instance the adversary revealed, the run
/// log against it, and the adversary's remarks.
#[derive(Debug)]
pub struct AdaptiveRun {
    pub instance: Instance,
    pub log: ReplayLog,
    pub notes: Vec<String>,
}

/// Drives `algo` against an adaptive adversary and reconstructs the revealed
/// instance after the fact.
pub fn run_adaptive(
    adversary: &mut dyn AdaptiveAdversary,
    algo: &mut dyn OnlineAlgorithm,
) -> Result<AdaptiveRun, ProtocolViolation> {
    let offline = adversary.offline();
    let n_agents = offline.n_agents();
    let mut matching = FractionalMatching::empty(n_agents, 0);
    let mut snapshots = Vec::new();
    let mut decisions = Vec::new();
    let mut all_edges: Vec<(usize, usize)> = Vec::new();
    let mut step = 0usize;
    while let Some(mut neighbors) = adversary.next_neighbors(&matching) {
        neighbors.sort_unstable();
        neighbors.dedup();
        if let Some(&bad) = neighbors.iter().find(|&&a| a >= n_agents) {
            return Err(ProtocolViolation::BadNeighbor { step, agent: bad });
        }
        // Grow the matching's item dimension as arrivals appear.
        let mut grown = FractionalMatching::empty(n_agents, step + 1);
        for (a, o, v) in matching.support() {
            grown.add(a, o, v);
        }
        matching = grown;
        let event = ArrivalEvent { item: step, neighbors: neighbors.clone() };
        let decision = algo.decide(&event);
        decisions.push(apply_decision(step, &event, &decision, &mut matching)?);
        all_edges.extend(neighbors.iter().map(|&a| (a, step)));
        snapshots.push(matching.clone());
        step += 1;
    }
    let instance =
        Instance::from_offline(offline, step, all_edges).map_err(ProtocolViolation::from)?;
    Ok(AdaptiveRun {
        instance,
        log: ReplayLog { snapshots, final_matching: matching, decisions },
        notes: adversary.notes(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::{fi, fr};

    /// Assigns everything to the lowest-id unmatched neighbor.
    struct TakeFirst {
        matched: Vec<bool>,
    }

    impl OnlineAlgorithm for TakeFirst {
        fn decide(&mut self, event: &ArrivalEvent) -> Decision {
            for &a in &event.neighbors {
                if !self.matched[a] {
                    self.matched[a] = true;
                    return Decision::to_agent(a);
                }
            }
            Decision::discard()
        }
    }

    fn two_pair_instance() -> Instance {
        Instance::new(vec![vec![0, 1]], 3, [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)]).unwrap()
    }

    #[test]
    fn replay_records_snapshots_and_decisions() {
        let inst = two_pair_instance();
        let mut algo = TakeFirst { matched: vec![false; 2] };
        let log = replay_online(&inst, &mut algo).unwrap();
        assert_eq!(log.snapshots.len(), 3);
        assert_eq!(*log.snapshots[0].agent_load(0), fi(1));
        assert_eq!(*log.snapshots[1].agent_load(1), fi(1));
        // Item 2 only liked by the saturated agent 0: discarded.
        assert_eq!(log.decisions[2], Decision::discard());
        assert_eq!(log.final_matching.total_mass(), fi(2));
    }

    #[test]
    fn replay_is_deterministic() {
        let inst = two_pair_instance();
        let run = |_: ()| {
            let mut algo = TakeFirst { matched: vec![false; 2] };
            replay_online(&inst, &mut algo).unwrap().final_matching
        };
        assert_eq!(run(()), run(()));
    }

    struct ConstantDecision(Decision);

    impl OnlineAlgorithm for ConstantDecision {
        fn decide(&mut self, _: &ArrivalEvent) -> Decision {
            self.0.clone()
        }
    }

    #[test]
    fn off_support_assignment_is_rejected_with_step() {
        let inst = Instance::new(vec![vec![0, 1]], 2, [(0, 0), (0, 1)]).unwrap();
        let mut algo = ConstantDecision(Decision::to_agent(1));
        assert_eq!(
            replay_online(&inst, &mut algo).unwrap_err(),
            ProtocolViolation::OffSupport { step: 0, agent: 1 }
        );
    }

    #[test]
    fn item_overfill_is_rejected() {
        let inst = Instance::new(vec![vec![0, 1]], 1, [(0, 0), (1, 0)]).unwrap();
        let mut algo = ConstantDecision(Decision::fractional(vec![
            (0, fr(2, 3)),
            (1, fr(2, 3)),
        ]));
        assert_eq!(
            replay_online(&inst, &mut algo).unwrap_err(),
            ProtocolViolation::ItemOverfilled { step: 0 }
        );
    }

    #[test]
    fn agent_overfill_is_rejected_at_later_step() {
        let inst = Instance::new(vec![vec![0]], 2, [(0, 0), (0, 1)]).unwrap();
        let mut algo = ConstantDecision(Decision::fractional(vec![(0, fr(3, 4))]));
        assert_eq!(
            replay_online(&inst, &mut algo).unwrap_err(),
            ProtocolViolation::AgentOverfilled { step: 1, agent: 0 }
        );
    }

    #[test]
    fn negative_mass_is_rejected() {
        let inst = Instance::new(vec![vec![0]], 1, [(0, 0)]).unwrap();
        let mut algo = ConstantDecision(Decision::fractional(vec![(0, fr(-1, 2))]));
        assert_eq!(
            replay_online(&inst, &mut algo).unwrap_err(),
            ProtocolViolation::NegativeMass { step: 0, agent: 0 }
        );
    }

    #[test]
    fn zero_entries_are_dropped_and_duplicates_merged() {
        let inst = Instance::new(vec![vec![0]], 1, [(0, 0)]).unwrap();
        let mut algo = ConstantDecision(Decision::fractional(vec![
            (0, fr(1, 4)),
            (0, fr(1, 4)),
            (0, fi(0)),
        ]));
        let log = replay_online(&inst, &mut algo).unwrap();
        assert_eq!(log.decisions[0].assignment, vec![(0, fr(1, 2))]);
        assert_eq!(*log.final_matching.agent_load(0), fr(1, 2));
    }

    /// Emits one item liked by whichever agent currently has the larger
    /// load (ties to the lower id), twice; demonstrates adaptivity.
    struct FollowTheLeader {
        emitted: usize,
    }

    impl AdaptiveAdversary for FollowTheLeader {
        fn offline(&self) -> OfflineSide {
            OfflineSide::new(vec![vec![0, 1]]).unwrap()
        }

        fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
            if self.emitted == 2 {
                return None;
            }
            self.emitted += 1;
            if self.emitted == 1 {
                Some(vec![0, 1])
            } else {
                let leader =
                    if current.agent_load(1) > current.agent_load(0) { 1 } else { 0 };
                Some(vec![leader])
            }
        }
    }

    #[test]
    fn adaptive_run_reconstructs_instance() {
        let mut adv = FollowTheLeader { emitted: 0 };
        let mut algo = TakeFirst { matched: vec![false; 2] };
        let run = run_adaptive(&mut adv, &mut algo).unwrap();
        // TakeFirst matched item 0 to agent 0, so item 1 is aimed at agent 0
        // and gets discarded (agent 0 already matched).
        assert_eq!(run.instance.n_items(), 2);
        assert_eq!(run.instance.item_neighbors(1), &[0]);
        assert_eq!(run.log.final_matching.total_mass(), fi(1));
    }
}
