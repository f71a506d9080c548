//! Online matching algorithms.
//!
//! * [`MatchAndShift`] — indivisible; rotates a class priority list.
//! * [`EqualFilling`] — divisible; two-level exact water-filling.
//! * [`EqualFillingOcs`] — randomized indivisible rounding of an uncapped
//!   water-filling guide, with pluggable selectors.
//! * [`EqualRanking`] — randomized indivisible; random fixed ranks within
//!   classes and a uniformly random class per item.
//! * [`Greedy`], [`DiscardAll`], [`NonWastefulWrapper`] — baselines and the
//!   wrapper that upgrades any algorithm to a non-wasteful one.

mod equal_filling;
mod equal_filling_ocs;
mod equal_ranking;
mod match_and_shift;
mod wrapper;

pub use equal_filling::EqualFilling;
pub use equal_filling_ocs::{
    build_guiding_plan, independent_selection_probability, run_equal_filling_ocs,
    selection_probability_target, EqualFillingOcs, GuidingPlan, IndependentRounding, OcsOutcome,
    Selector, SelectorContractViolation, SelectorTrace, SemiOcs, TraceStep,
};
pub use equal_ranking::{EqualRanking, NO_CLASS};
pub use match_and_shift::MatchAndShift;
pub use wrapper::{DiscardAll, Greedy, NonWastefulWrapper, WrapMode};

use crate::frac::Frac;
use num::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// External chooser: takes the candidate list, returns one of its entries.
pub type TieCallback = Box<dyn FnMut(&[usize]) -> usize + Send>;

/// Strategy for choosing among equally eligible agents.
pub enum TieBreak {
    /// Lowest agent id.
    Lexicographic,
    /// Uniformly at random from a seeded generator.
    Seeded(Box<ChaCha8Rng>),
    /// Arbitrary external choice; must return one of the candidates.
    Callback(TieCallback),
}

impl std::fmt::Debug for TieBreak {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TieBreak::Lexicographic => write!(f, "TieBreak::Lexicographic"),
            TieBreak::Seeded(_) => write!(f, "TieBreak::Seeded"),
            TieBreak::Callback(_) => write!(f, "TieBreak::Callback"),
        }
    }
}

impl TieBreak {
    pub fn lexicographic() -> Self {
        TieBreak::Lexicographic
    }

    pub fn seeded(seed: u64) -> Self {
        use rand::SeedableRng;
        TieBreak::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    pub fn callback(f: impl FnMut(&[usize]) -> usize + Send + 'static) -> Self {
        TieBreak::Callback(Box::new(f))
    }

    /// Highest agent id — a simple adversarial-flavored choice.
    pub fn last_candidate() -> Self {
        TieBreak::callback(|cands| *cands.last().expect("nonempty candidates"))
    }

    /// Picks one of the (sorted, nonempty) candidates.
    pub fn pick(&mut self, candidates: &[usize]) -> usize {
        assert!(!candidates.is_empty(), "tie-break over empty candidate set");
        match self {
            TieBreak::Lexicographic => candidates[0],
            TieBreak::Seeded(rng) => candidates[rng.random_range(0..candidates.len())],
            TieBreak::Callback(f) => {
                let choice = f(candidates);
                assert!(
                    candidates.contains(&choice),
                    "tie-break callback returned non-candidate {choice}"
                );
                choice
            }
        }
    }
}

/// Largest `level <= cap` with `sum_i min(level, d_i) <= total`
/// (the class-level water line: demands clip their own contribution).
pub fn largest_level_clipped(demands: &[Frac], total: &Frac, cap: &Frac) -> Frac {
    let mut ds: Vec<&Frac> = demands.iter().filter(|d| d.is_positive()).collect();
    let at_cap: Frac = ds.iter().map(|d| (*d).clone().min(cap.clone())).sum();
    if at_cap <= *total {
        return cap.clone();
    }
    ds.sort();
    let mut prefix = Frac::zero();
    for (i, d) in ds.iter().enumerate() {
        let remaining = ds.len() - i;
        let candidate = (total - &prefix) / Frac::from_integer((remaining as i64).into());
        if candidate <= **d {
            return candidate;
        }
        prefix += *d;
    }
    unreachable!("capped sum exceeded total, so the level lies inside a segment");
}

/// Unique `level` with `sum_i max(level - b_i, 0) == budget`, for
/// `budget > 0` over a nonempty base set (uncapped water-filling).
pub fn level_excess_equality(bases: &[Frac], budget: &Frac) -> Frac {
    assert!(!bases.is_empty(), "equality water level needs at least one base");
    assert!(budget.is_positive(), "equality water level needs positive budget");
    let mut bs: Vec<&Frac> = bases.iter().collect();
    bs.sort();
    let mut prefix = Frac::zero();
    for i in 0..bs.len() {
        prefix += bs[i];
        let cnt = Frac::from_integer(((i + 1) as i64).into());
        let candidate = (budget + &prefix) / cnt;
        if i + 1 == bs.len() || candidate <= *bs[i + 1] {
            return candidate;
        }
    }
    unreachable!("the all-active segment always yields a solution");
}

/// Largest `level <= cap` with `sum_i max(level - b_i, 0) <= budget`.
pub fn largest_level_excess(bases: &[Frac], budget: &Frac, cap: &Frac) -> Frac {
    let at_cap: Frac = bases
        .iter()
        .map(|b| {
            let excess = cap - b;
            if excess.is_positive() {
                excess
            } else {
                Frac::zero()
            }
        })
        .sum();
    if at_cap <= *budget {
        return cap.clone();
    }
    if budget.is_zero() {
        // Largest level with zero excess: the minimum base.
        return bases.iter().min().expect("nonempty").clone();
    }
    level_excess_equality(bases, budget)
}

/// Checks that `x` equals one or the clipped sum hits `total` exactly — the
/// defining property of the class water line (used in debug assertions).
pub fn clipped_level_is_tight(level: &Frac, demands: &[Frac], total: &Frac, cap: &Frac) -> bool {
    let sum: Frac = demands.iter().map(|d| d.clone().min(level.clone())).sum();
    level == cap || sum == *total
}
