//! Baselines and the non-wasteful wrapper.
//!
//! [`Greedy`] matches every item to some unmatched liking agent;
//! [`DiscardAll`] never matches. [`NonWastefulWrapper`] runs any inner
//! algorithm obliviously — the inner sees the arrival stream and keeps its
//! own private state as if its advice were always followed — and converts
//! its advice into a non-wasteful actual run: advice is followed to the
//! extent capacity allows, and whatever the advice leaves on the table is
//! poured greedily into unmatched (indivisible) or unsaturated (divisible)
//! liking agents. The wrapper never matches less than the inner: its
//! matched-agent set is a superset, per-agent loads dominate entrywise.

use num::{One, Signed, Zero};

use super::TieBreak;
use crate::frac::Frac;
use crate::replay::{ArrivalEvent, Decision, OnlineAlgorithm};

/// Matches each item to an unmatched liking agent chosen by the tie-break;
/// discards only when none exists.
#[derive(Debug)]
pub struct Greedy {
    matched: Vec<bool>,
    tie: TieBreak,
}

impl Greedy {
    pub fn new(n_agents: usize) -> Self {
        Greedy { matched: vec![false; n_agents], tie: TieBreak::lexicographic() }
    }

    pub fn with_tie(n_agents: usize, tie: TieBreak) -> Self {
        Greedy { matched: vec![false; n_agents], tie }
    }
}

impl OnlineAlgorithm for Greedy {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        let candidates: Vec<usize> =
            event.neighbors.iter().copied().filter(|&a| !self.matched[a]).collect();
        if candidates.is_empty() {
            return Decision::discard();
        }
        let agent = self.tie.pick(&candidates);
        self.matched[agent] = true;
        Decision::to_agent(agent)
    }

    fn name(&self) -> &'static str {
        "greedy"
    }
}

/// Discards every item; the maximally wasteful baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscardAll;

impl OnlineAlgorithm for DiscardAll {
    fn decide(&mut self, _event: &ArrivalEvent) -> Decision {
        Decision::discard()
    }

    fn name(&self) -> &'static str {
        "discard-all"
    }
}

/// How the wrapper interprets and tops up the inner algorithm's advice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WrapMode {
    /// Follow the advised agent if it is an unmatched neighbor; otherwise
    /// match some unmatched neighbor whole.
    Indivisible,
    /// Clip the advice entrywise to remaining agent capacity, then pour the
    /// item's remaining mass into unsaturated neighbors.
    Divisible,
}

/// Runs `inner` in the background and repairs its wastefulness.
pub struct NonWastefulWrapper {
    inner: Box<dyn OnlineAlgorithm>,
    mode: WrapMode,
    /// Loads of the actual (wrapper) run.
    actual_loads: Vec<Frac>,
    /// Loads the inner algorithm believes it has produced.
    virtual_loads: Vec<Frac>,
}

impl std::fmt::Debug for NonWastefulWrapper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonWastefulWrapper")
            .field("inner", &self.inner.name())
            .field("mode", &self.mode)
            .finish()
    }
}

impl NonWastefulWrapper {
    pub fn new(inner: Box<dyn OnlineAlgorithm>, mode: WrapMode, n_agents: usize) -> Self {
        NonWastefulWrapper {
            inner,
            mode,
            actual_loads: vec![Frac::zero(); n_agents],
            virtual_loads: vec![Frac::zero(); n_agents],
        }
    }

    /// Loads the inner algorithm's advice alone would have produced.
    pub fn virtual_loads(&self) -> &[Frac] {
        &self.virtual_loads
    }

    fn decide_indivisible(&mut self, event: &ArrivalEvent, advice: &Decision) -> Decision {
        let one = Frac::one();
        // Follow the first advised agent that is an unmatched neighbor.
        let advised = advice
            .assignment
            .iter()
            .map(|(a, _)| *a)
            .find(|&a| {
                event.neighbors.binary_search(&a).is_ok() && self.actual_loads[a].is_zero()
            });
        let target = advised.or_else(|| {
            event.neighbors.iter().copied().find(|&a| self.actual_loads[a].is_zero())
        });
        match target {
            Some(a) => {
                self.actual_loads[a] = one;
                Decision::to_agent(a)
            }
            None => Decision::discard(),
        }
    }

    fn decide_divisible(&mut self, event: &ArrivalEvent, advice: &Decision) -> Decision {
        let one = Frac::one();
        let mut out: Vec<(usize, Frac)> = Vec::new();
        let mut item_left = one.clone();
        // Entrywise-min of the advice against remaining capacities. Advice
        // on a non-neighbor is forwarded untouched so the inner's protocol
        // violation surfaces at replay instead of being masked here.
        for (a, m) in &advice.assignment {
            let capacity = if *a < self.actual_loads.len() {
                &one - &self.actual_loads[*a]
            } else {
                one.clone()
            };
            let give = m.clone().min(capacity).min(item_left.clone());
            if give.is_positive() {
                if *a < self.actual_loads.len() {
                    self.actual_loads[*a] += &give;
                }
                item_left -= &give;
                out.push((*a, give));
            }
        }
        // Pour what the advice left of the item into unsaturated neighbors.
        for &a in &event.neighbors {
            if !item_left.is_positive() {
                break;
            }
            let capacity = &one - &self.actual_loads[a];
            let give = capacity.min(item_left.clone());
            if give.is_positive() {
                self.actual_loads[a] += &give;
                item_left -= &give;
                out.push((a, give));
            }
        }
        Decision::fractional(out)
    }
}

impl OnlineAlgorithm for NonWastefulWrapper {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        let advice = self.inner.decide(event);
        for (a, m) in &advice.assignment {
            if *a < self.virtual_loads.len() {
                self.virtual_loads[*a] += m;
            }
        }
        let decision = match self.mode {
            WrapMode::Indivisible => self.decide_indivisible(event, &advice),
            WrapMode::Divisible => self.decide_divisible(event, &advice),
        };
        debug_assert!(
            self.actual_loads
                .iter()
                .zip(&self.virtual_loads)
                .all(|(actual, virt)| actual >= virt || *virt > Frac::one()),
            "actual loads must dominate the inner's virtual loads"
        );
        decision
    }

    fn name(&self) -> &'static str {
        "non-wasteful-wrapper"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{EqualFilling, MatchAndShift};
    use crate::frac::{fi, fr};
    use crate::instance::Instance;
    use crate::replay::replay_online;

    fn pair_trap_instance() -> Instance {
        Instance::new(
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            4,
            vec![(0, 0), (3, 0), (1, 1), (4, 1), (2, 2), (5, 2), (1, 3), (4, 3)],
        )
        .unwrap()
    }

    #[test]
    fn greedy_matches_whenever_someone_is_free() {
        let inst = Instance::new(vec![vec![0]], 1, vec![(0, 0)]).unwrap();
        let mut algo = Greedy::new(1);
        let log = replay_online(&inst, &mut algo).unwrap();
        assert_eq!(log.decisions[0].assignment, vec![(0, fi(1))]);
    }

    #[test]
    fn greedy_on_no_edges_is_empty() {
        let inst = Instance::new(vec![vec![0, 1]], 2, vec![]).unwrap();
        let mut algo = Greedy::new(2);
        let log = replay_online(&inst, &mut algo).unwrap();
        assert_eq!(log.final_matching.total_mass(), fi(0));
    }

    #[test]
    fn wrapping_discard_all_yields_greedy() {
        let inst = pair_trap_instance();
        let mut wrapped = NonWastefulWrapper::new(
            Box::new(DiscardAll),
            WrapMode::Indivisible,
            inst.n_agents(),
        );
        let mut plain = Greedy::new(inst.n_agents());
        let wrapped_log = replay_online(&inst, &mut wrapped).unwrap();
        let plain_log = replay_online(&inst, &mut plain).unwrap();
        assert_eq!(wrapped_log.final_matching, plain_log.final_matching);
        assert!(wrapped.virtual_loads().iter().all(|v| v.is_zero()));
    }

    #[test]
    fn wrapping_greedy_is_a_fixed_point() {
        let inst = pair_trap_instance();
        let mut wrapped = NonWastefulWrapper::new(
            Box::new(Greedy::new(inst.n_agents())),
            WrapMode::Indivisible,
            inst.n_agents(),
        );
        let mut plain = Greedy::new(inst.n_agents());
        assert_eq!(
            replay_online(&inst, &mut wrapped).unwrap().final_matching,
            replay_online(&inst, &mut plain).unwrap().final_matching
        );
    }

    #[test]
    fn wrapping_a_non_wasteful_divisible_algorithm_changes_nothing() {
        let inst =
            Instance::new(vec![vec![0, 1]], 2, vec![(0, 0), (1, 0), (0, 1)]).unwrap();
        let mut wrapped = NonWastefulWrapper::new(
            Box::new(EqualFilling::new(inst.offline().clone())),
            WrapMode::Divisible,
            inst.n_agents(),
        );
        let mut plain = EqualFilling::new(inst.offline().clone());
        assert_eq!(
            replay_online(&inst, &mut wrapped).unwrap().final_matching,
            replay_online(&inst, &mut plain).unwrap().final_matching
        );
    }

    #[test]
    fn divisible_top_up_pours_the_rest_of_the_item() {
        // Inner discards everything; the wrapper pours each item greedily,
        // saturating agent 0 first, then agent 1.
        let inst = Instance::new(
            vec![vec![0, 1]],
            2,
            vec![(0, 0), (1, 0), (0, 1), (1, 1)],
        )
        .unwrap();
        let mut wrapped =
            NonWastefulWrapper::new(Box::new(DiscardAll), WrapMode::Divisible, 2);
        let log = replay_online(&inst, &mut wrapped).unwrap();
        assert_eq!(log.decisions[0].assignment, vec![(0, fi(1))]);
        assert_eq!(log.decisions[1].assignment, vec![(1, fi(1))]);
    }

    #[test]
    fn divisible_advice_is_clipped_then_topped_up() {
        // Inner advises 1/2 to agent 1 only; the wrapper follows it and
        // tops the remaining 1/2 up into agent 0.
        struct HalfToOne;
        impl OnlineAlgorithm for HalfToOne {
            fn decide(&mut self, _event: &ArrivalEvent) -> Decision {
                Decision::fractional(vec![(1, fr(1, 2))])
            }
        }
        let inst = Instance::new(vec![vec![0, 1]], 1, vec![(0, 0), (1, 0)]).unwrap();
        let mut wrapped =
            NonWastefulWrapper::new(Box::new(HalfToOne), WrapMode::Divisible, 2);
        let log = replay_online(&inst, &mut wrapped).unwrap();
        assert_eq!(log.decisions[0].assignment, vec![(0, fr(1, 2)), (1, fr(1, 2))]);
    }

    #[test]
    fn stale_indivisible_advice_falls_back_to_a_free_neighbor() {
        // Inner always advises agent 0; once agent 0 is matched the wrapper
        // must route later items to the remaining free agents.
        struct AlwaysZero;
        impl OnlineAlgorithm for AlwaysZero {
            fn decide(&mut self, _event: &ArrivalEvent) -> Decision {
                Decision::to_agent(0)
            }
        }
        let inst = Instance::new(
            vec![vec![0, 1, 2]],
            3,
            vec![(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)],
        )
        .unwrap();
        let mut wrapped =
            NonWastefulWrapper::new(Box::new(AlwaysZero), WrapMode::Indivisible, 3);
        let log = replay_online(&inst, &mut wrapped).unwrap();
        assert_eq!(log.decisions[0].assignment, vec![(0, fi(1))]);
        assert_eq!(log.decisions[1].assignment, vec![(1, fi(1))]);
        assert_eq!(log.decisions[2].assignment, vec![(2, fi(1))]);
    }

    #[test]
    fn wrapped_class_values_dominate_the_inner_run() {
        // Run the inner separately to compare per-class values.
        let inst = pair_trap_instance();
        let mut inner = MatchAndShift::new(inst.offline().clone(), TieBreak::lexicographic());
        let inner_log = replay_online(&inst, &mut inner).unwrap();
        let mut wrapped = NonWastefulWrapper::new(
            Box::new(MatchAndShift::new(inst.offline().clone(), TieBreak::lexicographic())),
            WrapMode::Indivisible,
            inst.n_agents(),
        );
        let wrapped_log = replay_online(&inst, &mut wrapped).unwrap();
        for class in 0..inst.k() {
            let inner_v = crate::valuation::class_value(&inner_log.final_matching, &inst, class);
            let wrapped_v =
                crate::valuation::class_value(&wrapped_log.final_matching, &inst, class);
            assert!(wrapped_v >= inner_v);
        }
    }
}
