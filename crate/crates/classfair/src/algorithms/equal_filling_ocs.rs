//! Randomized indivisible matching guided by an uncapped fractional plan.
//!
//! Per arriving item, each class containing a liking agent gets an equal
//! guiding share `1/k_o`; inside a class the share is poured uncapped so the
//! lowest-loaded liking agents rise to a common level (their accumulated
//! guiding mass may exceed 1). The per-step positive increments
//! `(x̃_{a,o})_a` — which always sum to exactly 1 on a likable item — are fed
//! to a pluggable [`Selector`] that picks one agent per step. The item is
//! matched to the selected agent if it is still unmatched, otherwise to a
//! fallback unmatched neighbor, otherwise discarded, so the integral output
//! is always maximal.
//!
//! Two selectors are provided: [`IndependentRounding`] samples each step in
//! isolation (optionally without renormalization, in which case a step may
//! select nobody), and [`SemiOcs`] correlates steps negatively by boosting
//! agents whose accumulated guiding mass has not yet converted into a
//! selection, targeting the stronger
//! [`selection_probability_target`] curve.

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{level_excess_equality, TieBreak};
use crate::frac::{fr, parse_decimal, to_f64, Frac, SURVIVAL_CUBIC_DEC};
use crate::instance::{Instance, OfflineSide};
use crate::matching::IntegralMatching;
use crate::replay::{ArrivalEvent, Decision, OnlineAlgorithm};

/// The selector picked an agent that carried no positive guiding mass at
/// its step.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("selector chose agent {agent} at step {step}, which carries no positive guiding mass")]
pub struct SelectorContractViolation {
    pub step: usize,
    pub agent: usize,
}

/// One selection round per arriving item.
///
/// `masses` lists the step's positive guiding increments in increasing agent
/// order; they are nonnegative and sum to at most 1. A conforming selector
/// returns one of the listed agents (`None` is reserved for selectors that
/// deliberately leave sub-unit steps unselected).
pub trait Selector {
    fn select(&mut self, masses: &[(usize, Frac)]) -> Option<usize>;

    fn name(&self) -> &'static str {
        "selector"
    }
}

/// Draws an exact uniform sample from `{0, 1/2^64, …, (2^64−1)/2^64}`.
fn unit_interval_sample(rng: &mut ChaCha8Rng) -> Frac {
    let x: u64 = rng.random();
    Frac::new(BigInt::from(x), BigInt::from(1u128 << 64))
}

/// Memoryless selector: each step is sampled on its own, with probability
/// proportional to the guiding masses. By default the masses are
/// renormalized so that every step selects somebody; the raw variant keeps
/// the masses as absolute probabilities and may select nobody when they sum
/// below 1.
#[derive(Debug, Clone)]
pub struct IndependentRounding {
    rng: ChaCha8Rng,
    renormalize: bool,
}

impl IndependentRounding {
    pub fn new(seed: u64) -> Self {
        IndependentRounding { rng: ChaCha8Rng::seed_from_u64(seed), renormalize: true }
    }

    /// Variant whose per-step selection probability is exactly the raw mass,
    /// for comparison against the `1 − Π(1 − x̃)` closed form.
    pub fn without_renormalization(seed: u64) -> Self {
        IndependentRounding { rng: ChaCha8Rng::seed_from_u64(seed), renormalize: false }
    }
}

impl Selector for IndependentRounding {
    fn select(&mut self, masses: &[(usize, Frac)]) -> Option<usize> {
        if masses.is_empty() {
            return None;
        }
        let total: Frac = masses.iter().map(|(_, m)| m.clone()).sum();
        if total.is_zero() {
            return None;
        }
        let u = unit_interval_sample(&mut self.rng);
        let target = if self.renormalize { u * &total } else { u };
        let mut cum = Frac::zero();
        for (a, m) in masses {
            cum += m;
            if target < cum {
                return Some(*a);
            }
        }
        // Reachable only without renormalization, when the sample lands in
        // the unassigned tail of the unit interval.
        None
    }

    fn name(&self) -> &'static str {
        if self.renormalize {
            "independent-rounding"
        } else {
            "independent-rounding-raw"
        }
    }
}

/// Negatively-correlated selector. Each agent's independent survival
/// `Π_s (1 − x̃^s_a)` over its past steps is tracked; a step samples among
/// its never-yet-selected agents with weight `mass / survival`, so agents
/// whose accumulated mass keeps failing to convert get boosted, and agents
/// already selected stop competing. A zero-survival agent (sure thing under
/// independent rounding) takes absolute priority.
#[derive(Debug, Clone)]
pub struct SemiOcs {
    rng: ChaCha8Rng,
    survival: Vec<Frac>,
    ever_selected: Vec<bool>,
}

impl SemiOcs {
    pub fn new(n_agents: usize, seed: u64) -> Self {
        SemiOcs {
            rng: ChaCha8Rng::seed_from_u64(seed),
            survival: vec![Frac::one(); n_agents],
            ever_selected: vec![false; n_agents],
        }
    }

    fn choose(&mut self, masses: &[(usize, Frac)]) -> usize {
        let fresh: Vec<(usize, Frac)> = masses
            .iter()
            .filter(|(a, _)| !self.ever_selected[*a])
            .cloned()
            .collect();
        let pool = if fresh.is_empty() { masses.to_vec() } else { fresh };
        if let Some((a, _)) = pool.iter().find(|(a, _)| self.survival[*a].is_zero()) {
            return *a;
        }
        let weights: Vec<Frac> = pool.iter().map(|(a, m)| m / &self.survival[*a]).collect();
        let total: Frac = weights.iter().cloned().sum();
        let target = unit_interval_sample(&mut self.rng) * &total;
        let mut cum = Frac::zero();
        for ((a, _), w) in pool.iter().zip(&weights) {
            cum += w;
            if target < cum {
                return *a;
            }
        }
        unreachable!("the sample is strictly below the total weight");
    }
}

impl Selector for SemiOcs {
    fn select(&mut self, masses: &[(usize, Frac)]) -> Option<usize> {
        if masses.is_empty() {
            return None;
        }
        let chosen = self.choose(masses);
        for (a, m) in masses {
            self.survival[*a] *= Frac::one() - m;
        }
        self.ever_selected[chosen] = true;
        Some(chosen)
    }

    fn name(&self) -> &'static str {
        "semi-ocs"
    }
}

/// The target curve for the negatively-correlated selector: a lower bound on
/// the probability that an agent with total guiding mass `x` is selected at
/// least once, `1 − exp(−x − x²/2 − ((4−2√3)/3)·x³)`.
pub fn selection_probability_target(x: f64) -> f64 {
    let c3 = to_f64(&parse_decimal(SURVIVAL_CUBIC_DEC).expect("constant parses"));
    1.0 - (-(x + x * x / 2.0 + c3 * x * x * x)).exp()
}

/// Exact probability that independent (raw) rounding selects an agent at
/// least once, given that agent's per-step guiding masses: `1 − Π(1 − m)`.
pub fn independent_selection_probability(step_masses: &[Frac]) -> Frac {
    let survive: Frac = step_masses.iter().map(|m| Frac::one() - m).product();
    Frac::one() - survive
}

/// Computes one item's guiding increments from the current uncapped loads:
/// classes with a liking agent share the unit equally, and each class pours
/// its share so its liking agents rise to a common level.
fn guiding_step(offline: &OfflineSide, neighbors: &[usize], loads: &[Frac]) -> Vec<(usize, Frac)> {
    if neighbors.is_empty() {
        return Vec::new();
    }
    let mut class_agents: Vec<Vec<usize>> = vec![Vec::new(); offline.k()];
    for &a in neighbors {
        class_agents[offline.class_of(a)].push(a);
    }
    let k_o = class_agents.iter().filter(|v| !v.is_empty()).count();
    let share = fr(1, k_o as i64);
    let mut out = Vec::new();
    for agents in class_agents.iter().filter(|v| !v.is_empty()) {
        let bases: Vec<Frac> = agents.iter().map(|&a| loads[a].clone()).collect();
        let gamma = level_excess_equality(&bases, &share);
        for (&a, base) in agents.iter().zip(&bases) {
            let inc = &gamma - base;
            if inc.is_positive() {
                out.push((a, inc));
            }
        }
    }
    out.sort_by_key(|&(a, _)| a);
    out
}

/// The deterministic, selector-independent part of a run: per-item guiding
/// increments and the final per-agent guiding totals. Precomputing it lets
/// Monte-Carlo trials redo only the randomized selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidingPlan {
    pub n_agents: usize,
    /// `steps[o]` = positive guiding increments of item `o`, sorted by agent.
    pub steps: Vec<Vec<(usize, Frac)>>,
    /// Final accumulated guiding mass per agent (may exceed 1).
    pub totals: Vec<Frac>,
}

impl GuidingPlan {
    /// Per-step masses of one agent (zero-padded to the item count).
    pub fn agent_step_masses(&self, agent: usize) -> Vec<Frac> {
        self.steps
            .iter()
            .map(|step| {
                step.iter()
                    .find(|&&(a, _)| a == agent)
                    .map(|(_, m)| m.clone())
                    .unwrap_or_else(Frac::zero)
            })
            .collect()
    }
}

/// Replays the guiding water-filling over a whole known instance.
pub fn build_guiding_plan(inst: &Instance) -> GuidingPlan {
    let mut loads = vec![Frac::zero(); inst.n_agents()];
    let mut steps = Vec::with_capacity(inst.n_items());
    for item in 0..inst.n_items() {
        let step = guiding_step(inst.offline(), inst.item_neighbors(item), &loads);
        for (a, inc) in &step {
            loads[*a] += inc;
        }
        steps.push(step);
    }
    GuidingPlan { n_agents: inst.n_agents(), steps, totals: loads }
}

/// One step of the selector log: the masses it saw and whom it picked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub item: usize,
    pub masses: Vec<(usize, Frac)>,
    pub selected: Option<usize>,
}

/// Full selector log of a run; embeds the guiding increments, so the
/// guiding matching is recoverable from the trace alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorTrace {
    pub steps: Vec<TraceStep>,
    /// How many steps selected each agent (selections, not matches).
    pub selection_counts: Vec<usize>,
    /// Accumulated guiding mass per agent.
    pub cumulative: Vec<Frac>,
}

impl SelectorTrace {
    fn new(n_agents: usize) -> Self {
        SelectorTrace {
            steps: Vec::new(),
            selection_counts: vec![0; n_agents],
            cumulative: vec![Frac::zero(); n_agents],
        }
    }

    pub fn ever_selected(&self, agent: usize) -> bool {
        self.selection_counts[agent] > 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        use crate::frac::format_ratio;
        serde_json::json!({
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "item": s.item,
                "masses": s.masses.iter()
                    .map(|(a, m)| serde_json::json!([a, format_ratio(m)]))
                    .collect::<Vec<_>>(),
                "selected": s.selected,
            })).collect::<Vec<_>>(),
            "selectionCounts": self.selection_counts,
            "cumulative": self.cumulative.iter().map(format_ratio).collect::<Vec<_>>(),
        })
    }
}

/// Result of one randomized run: the integral matching and the selector log
/// (whose steps carry the guiding increments).
#[derive(Debug, Clone)]
pub struct OcsOutcome {
    pub matching: IntegralMatching,
    pub trace: SelectorTrace,
}

/// Runs the selection-and-assembly phase over a precomputed guiding plan.
pub fn run_equal_filling_ocs(
    inst: &Instance,
    plan: &GuidingPlan,
    selector: &mut dyn Selector,
    fallback: &mut TieBreak,
) -> Result<OcsOutcome, SelectorContractViolation> {
    assert_eq!(plan.steps.len(), inst.n_items(), "plan must cover every item");
    let mut matched = vec![false; inst.n_agents()];
    let mut matching = IntegralMatching::empty(inst.n_agents(), inst.n_items());
    let mut trace = SelectorTrace::new(inst.n_agents());
    for (item, step) in plan.steps.iter().enumerate() {
        let selected = if step.is_empty() { None } else { selector.select(step) };
        if let Some(a) = selected {
            if step.binary_search_by_key(&a, |&(x, _)| x).is_err() {
                return Err(SelectorContractViolation { step: item, agent: a });
            }
            trace.selection_counts[a] += 1;
        }
        for (a, inc) in step {
            trace.cumulative[*a] += inc;
        }
        trace.steps.push(TraceStep { item, masses: step.clone(), selected });
        let target = match selected {
            Some(a) if !matched[a] => Some(a),
            _ => {
                let unmatched: Vec<usize> = inst
                    .item_neighbors(item)
                    .iter()
                    .copied()
                    .filter(|&a| !matched[a])
                    .collect();
                if unmatched.is_empty() {
                    None
                } else {
                    Some(fallback.pick(&unmatched))
                }
            }
        };
        if let Some(a) = target {
            matched[a] = true;
            matching.assign(item, a);
        }
    }
    Ok(OcsOutcome { matching, trace })
}

/// Arrival-by-arrival adapter for the replay protocol and adaptive
/// adversaries; computes the guiding increments on the fly.
///
/// Panics if the boxed selector violates its contract (the standalone
/// [`run_equal_filling_ocs`] reports that as an error instead).
pub struct EqualFillingOcs {
    offline: OfflineSide,
    loads: Vec<Frac>,
    matched: Vec<bool>,
    selector: Box<dyn Selector>,
    fallback: TieBreak,
    trace: SelectorTrace,
}

impl std::fmt::Debug for EqualFillingOcs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EqualFillingOcs")
            .field("selector", &self.selector.name())
            .field("steps", &self.trace.steps.len())
            .finish()
    }
}

impl EqualFillingOcs {
    pub fn new(offline: OfflineSide, selector: Box<dyn Selector>) -> Self {
        Self::with_fallback(offline, selector, TieBreak::lexicographic())
    }

    pub fn with_fallback(
        offline: OfflineSide,
        selector: Box<dyn Selector>,
        fallback: TieBreak,
    ) -> Self {
        let n = offline.n_agents();
        EqualFillingOcs {
            offline,
            loads: vec![Frac::zero(); n],
            matched: vec![false; n],
            selector,
            fallback,
            trace: SelectorTrace::new(n),
        }
    }

    pub fn trace(&self) -> &SelectorTrace {
        &self.trace
    }

    /// Current uncapped guiding loads.
    pub fn guiding_loads(&self) -> &[Frac] {
        &self.loads
    }
}

impl OnlineAlgorithm for EqualFillingOcs {
    fn decide(&mut self, event: &ArrivalEvent) -> Decision {
        let step = guiding_step(&self.offline, &event.neighbors, &self.loads);
        for (a, inc) in &step {
            self.loads[*a] += inc;
            self.trace.cumulative[*a] += inc;
        }
        let selected = if step.is_empty() { None } else { self.selector.select(&step) };
        if let Some(a) = selected {
            assert!(
                step.binary_search_by_key(&a, |&(x, _)| x).is_ok(),
                "selector chose agent {a} with no positive guiding mass at item {}",
                event.item
            );
            self.trace.selection_counts[a] += 1;
        }
        self.trace.steps.push(TraceStep { item: event.item, masses: step, selected });
        let target = match selected {
            Some(a) if !self.matched[a] => Some(a),
            _ => {
                let unmatched: Vec<usize> =
                    event.neighbors.iter().copied().filter(|&a| !self.matched[a]).collect();
                if unmatched.is_empty() {
                    None
                } else {
                    Some(self.fallback.pick(&unmatched))
                }
            }
        };
        match target {
            Some(a) => {
                self.matched[a] = true;
                Decision::to_agent(a)
            }
            None => Decision::discard(),
        }
    }

    fn name(&self) -> &'static str {
        "equal-filling-ocs"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::fi;
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
    fn guiding_masses_sum_to_one_per_likable_item() {
        for inst in [
            pair_trap_instance(),
            Instance::new(
                vec![vec![0, 1], vec![2], vec![3, 4]],
                3,
                vec![(0, 0), (2, 0), (3, 0), (1, 1), (4, 1), (2, 2)],
            )
            .unwrap(),
        ] {
            let plan = build_guiding_plan(&inst);
            for step in &plan.steps {
                let total: Frac = step.iter().map(|(_, m)| m.clone()).sum();
                assert_eq!(total, fi(1));
            }
        }
    }

    #[test]
    fn guiding_loads_are_uncapped() {
        // One two-agent class liking three items: loads climb to 3/2 each.
        let inst = Instance::new(
            vec![vec![0, 1]],
            3,
            vec![(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)],
        )
        .unwrap();
        let plan = build_guiding_plan(&inst);
        assert_eq!(plan.steps[0], vec![(0, fr(1, 2)), (1, fr(1, 2))]);
        assert_eq!(plan.steps[2], vec![(0, fr(1, 2)), (1, fr(1, 2))]);
        assert_eq!(plan.totals, vec![fr(3, 2), fr(3, 2)]);
    }

    #[test]
    fn classes_share_equally_then_level_inside() {
        // Two classes of two, all liking the item: 1/2 per class, 1/4 each.
        let inst = Instance::new(
            vec![vec![0, 1], vec![2, 3]],
            1,
            vec![(0, 0), (1, 0), (2, 0), (3, 0)],
        )
        .unwrap();
        let plan = build_guiding_plan(&inst);
        assert_eq!(
            plan.steps[0],
            vec![(0, fr(1, 4)), (1, fr(1, 4)), (2, fr(1, 4)), (3, fr(1, 4))]
        );
    }

    #[test]
    fn lagging_agent_catches_up_first() {
        // Agent 0 accumulates a full unit alone; the next shared item then
        // flows entirely to agent 1 to equalize the class level.
        let inst =
            Instance::new(vec![vec![0, 1]], 2, vec![(0, 0), (0, 1), (1, 1)]).unwrap();
        let plan = build_guiding_plan(&inst);
        assert_eq!(plan.steps[0], vec![(0, fi(1))]);
        assert_eq!(plan.steps[1], vec![(1, fi(1))]);
        assert_eq!(plan.agent_step_masses(1), vec![fi(0), fi(1)]);
    }

    #[test]
    fn sole_liker_is_matched_surely_by_both_selectors() {
        let inst = Instance::new(vec![vec![0]], 1, vec![(0, 0)]).unwrap();
        let plan = build_guiding_plan(&inst);
        for seed in [0u64, 1, 42] {
            let mut lex = TieBreak::lexicographic();
            let mut ind = IndependentRounding::new(seed);
            let out = run_equal_filling_ocs(&inst, &plan, &mut ind, &mut lex).unwrap();
            assert_eq!(out.matching.agent_of(0), Some(0));
            assert_eq!(out.trace.selection_counts[0], 1);
            let mut semi = SemiOcs::new(1, seed);
            let out = run_equal_filling_ocs(&inst, &plan, &mut semi, &mut lex).unwrap();
            assert_eq!(out.matching.agent_of(0), Some(0));
        }
    }

    #[test]
    fn rogue_selector_is_reported() {
        struct Rogue;
        impl Selector for Rogue {
            fn select(&mut self, _masses: &[(usize, Frac)]) -> Option<usize> {
                Some(usize::MAX)
            }
        }
        let inst = Instance::new(vec![vec![0]], 1, vec![(0, 0)]).unwrap();
        let plan = build_guiding_plan(&inst);
        let mut lex = TieBreak::lexicographic();
        let err = run_equal_filling_ocs(&inst, &plan, &mut Rogue, &mut lex).unwrap_err();
        assert_eq!(err, SelectorContractViolation { step: 0, agent: usize::MAX });
    }

    #[test]
    fn raw_and_renormalized_rounding_agree_when_steps_carry_full_mass() {
        // Guiding steps of likable items sum to exactly 1, so the raw
        // variant never leaves a step unselected and consumes randomness
        // identically.
        let inst = pair_trap_instance();
        let plan = build_guiding_plan(&inst);
        for seed in 0..20u64 {
            let mut lex = TieBreak::lexicographic();
            let mut a = IndependentRounding::new(seed);
            let mut b = IndependentRounding::without_renormalization(seed);
            let out_a = run_equal_filling_ocs(&inst, &plan, &mut a, &mut lex).unwrap();
            let out_b = run_equal_filling_ocs(&inst, &plan, &mut b, &mut lex).unwrap();
            assert_eq!(out_a.matching, out_b.matching);
            assert_eq!(out_a.trace, out_b.trace);
        }
    }

    #[test]
    fn every_item_with_an_unmatched_neighbor_is_matched() {
        let inst = pair_trap_instance();
        let plan = build_guiding_plan(&inst);
        for seed in 0..10u64 {
            let mut lex = TieBreak::lexicographic();
            let mut sel = IndependentRounding::new(seed);
            let out = run_equal_filling_ocs(&inst, &plan, &mut sel, &mut lex).unwrap();
            assert_eq!(out.matching.size(), 4);
        }
    }

    #[test]
    fn adapter_replay_matches_the_plan_runner() {
        let inst = pair_trap_instance();
        let plan = build_guiding_plan(&inst);
        for seed in [3u64, 11, 27] {
            let mut lex = TieBreak::lexicographic();
            let mut sel = SemiOcs::new(inst.n_agents(), seed);
            let planned = run_equal_filling_ocs(&inst, &plan, &mut sel, &mut lex).unwrap();
            let mut adapter = EqualFillingOcs::new(
                inst.offline().clone(),
                Box::new(SemiOcs::new(inst.n_agents(), seed)),
            );
            let log = replay_online(&inst, &mut adapter).unwrap();
            assert_eq!(log.final_matching, planned.matching.to_fractional());
            assert_eq!(*adapter.trace(), planned.trace);
            assert_eq!(adapter.guiding_loads(), &plan.totals[..]);
        }
    }

    #[test]
    fn symmetric_half_step_selects_each_agent_about_half_the_time() {
        let masses = vec![(0usize, fr(1, 2)), (1usize, fr(1, 2))];
        let trials = 2000;
        // 3σ for a fair-coin count over 2000 trials is ≈ 67.
        let band = 1000 - 67..=1000 + 67;
        let mut ind_hits = 0;
        let mut semi_hits = 0;
        for seed in 0..trials as u64 {
            if IndependentRounding::new(seed).select(&masses) == Some(0) {
                ind_hits += 1;
            }
            if SemiOcs::new(2, seed).select(&masses) == Some(0) {
                semi_hits += 1;
            }
        }
        assert!(band.contains(&ind_hits), "independent hits {ind_hits}");
        assert!(band.contains(&semi_hits), "boosted hits {semi_hits}");
    }

    #[test]
    fn boosting_beats_independent_rounding_on_repeated_mass() {
        // Agent 0 carries 1/2 in two consecutive steps against fresh
        // partners. Independent rounding selects it ever with probability
        // 3/4; the boosted selector reaches 1/2 + 1/2·(2/3) = 5/6.
        let step1 = vec![(0usize, fr(1, 2)), (1usize, fr(1, 2))];
        let step2 = vec![(0usize, fr(1, 2)), (2usize, fr(1, 2))];
        let trials = 3000;
        let mut hits = 0;
        for seed in 0..trials as u64 {
            let mut sel = SemiOcs::new(3, seed);
            let first = sel.select(&step1);
            let second = sel.select(&step2);
            if first == Some(0) || second == Some(0) {
                hits += 1;
            }
        }
        // Expect 5/6·3000 = 2500; 3σ ≈ 61. Independent rounding would sit
        // near 2250, far below the acceptance band.
        assert!((2500 - 61..=2500 + 61).contains(&hits), "boosted hits {hits}");
    }

    #[test]
    fn target_curve_matches_known_values() {
        assert_eq!(selection_probability_target(0.0), 0.0);
        assert!((selection_probability_target(1.0) - 0.813371038).abs() < 1e-6);
        let p = independent_selection_probability(&[fr(1, 2), fr(1, 2)]);
        assert_eq!(p, fr(3, 4));
    }

    #[test]
    fn trace_serializes_with_exact_masses() {
        let inst = Instance::new(vec![vec![0]], 1, vec![(0, 0)]).unwrap();
        let plan = build_guiding_plan(&inst);
        let mut lex = TieBreak::lexicographic();
        let mut sel = IndependentRounding::new(0);
        let out = run_equal_filling_ocs(&inst, &plan, &mut sel, &mut lex).unwrap();
        let json = out.trace.to_json();
        assert_eq!(json["steps"][0]["masses"][0][1], "1/1");
        assert_eq!(json["steps"][0]["selected"], 0);
        assert_eq!(json["cumulative"][0], "1/1");
    }
}
