//! Adaptive arrival sequences that pick each item's liking set after
//! watching the algorithm's decisions so far, steering the run toward the
//! worst case of one specific guarantee.
//!
//! Every adversary here degrades gracefully: when the algorithm leaves the
//! intended endgame (by discarding or splitting an item the construction
//! expected to be matched whole), the trap falls back to a fixed
//! continuation and records the lapse in its [`AdaptiveAdversary::notes`].

use crate::frac::Frac;
use crate::instance::OfflineSide;
use crate::matching::FractionalMatching;
use crate::replay::AdaptiveAdversary;
use num::{One, Zero};

/// The agent holding the whole unit of `item`, if any.
fn full_holder(m: &FractionalMatching, item: usize) -> Option<usize> {
    let one = Frac::one();
    (0..m.n_agents()).find(|&a| m.mass(a, item) == one)
}

/// The highest-loaded candidate, ties to the lowest id (candidates are
/// expected in increasing order).
fn heaviest(m: &FractionalMatching, candidates: &[usize]) -> usize {
    let mut best = candidates[0];
    for &a in &candidates[1..] {
        if m.agent_load(a) > m.agent_load(best) {
            best = a;
        }
    }
    best
}

/// Three paired items followed by a reactive fourth.
///
/// Two classes of three agents are paired one-to-one across classes and
/// pair `t` likes item `t`.  After watching where the first three items
/// land, the adversary repeats the pair whose item went to the class that
/// holds only one of them.  The repeat is wasted on that class (its pair
/// member is already matched), so a deterministic indivisible algorithm
/// ends at a 3-versus-1 split: the short class's envy-up-to-one and maximin
/// ratios are both exactly `1/2`.
///
/// Built via [`PairTrap::class_level_trap`], the run instead ends after
/// three items whenever one class swept them all, which is the worst case
/// for the proportionality audit: the swept-out class has a positive share
/// and zero value.
#[derive(Debug)]
pub struct PairTrap {
    emit_fourth_on_sweep: bool,
    step: usize,
    notes: Vec<String>,
}

impl PairTrap {
    /// Always emits the fourth item, repeating pair `0` after a sweep.
    pub fn envy_trap() -> Self {
        PairTrap { emit_fourth_on_sweep: true, step: 0, notes: Vec::new() }
    }

    /// Stops after three items when one class swept them all.
    pub fn class_level_trap() -> Self {
        PairTrap { emit_fourth_on_sweep: false, step: 0, notes: Vec::new() }
    }
}

impl AdaptiveAdversary for PairTrap {
    fn offline(&self) -> OfflineSide {
        OfflineSide::new(vec![vec![0, 1, 2], vec![3, 4, 5]]).expect("static layout is valid")
    }

    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
        let step = self.step;
        self.step += 1;
        match step {
            0..=2 => Some(vec![step, step + 3]),
            3 => {
                let holders: Vec<Option<usize>> =
                    (0..3).map(|o| full_holder(current, o)).collect();
                if holders.iter().any(|h| h.is_none()) {
                    self.notes.push(
                        "an opening item was discarded or split, so the 3-versus-1 \
                         endgame lapses"
                            .to_string(),
                    );
                    return self.emit_fourth_on_sweep.then(|| vec![0, 3]);
                }
                let first_class_items: Vec<usize> =
                    (0..3).filter(|&o| holders[o].unwrap() < 3).collect();
                let lone_item = match first_class_items.len() {
                    1 => Some(first_class_items[0]),
                    2 => (0..3).find(|o| !first_class_items.contains(o)),
                    _ => None,
                };
                match lone_item {
                    Some(t) => Some(vec![t, t + 3]),
                    // One class swept all three items.
                    None => self.emit_fourth_on_sweep.then(|| vec![0, 3]),
                }
            }
            _ => None,
        }
    }

    fn notes(&self) -> Vec<String> {
        self.notes.clone()
    }
}

/// Two items against a single two-agent class.
///
/// The second item is liked only by whichever agent holds more of the
/// first (ties to the lower id), so an indivisible algorithm can place at
/// most one of the two items while the offline optimum places both:
/// welfare ratio `1/2` for any deterministic indivisible algorithm that
/// matches at all, `0` for one that discards everything, and `3/4` for
/// divisible water-filling.
#[derive(Debug, Default)]
pub struct UswPairTrap {
    step: usize,
    notes: Vec<String>,
}

impl UswPairTrap {
    pub fn new() -> Self {
        Self::default()
    }
}

impl AdaptiveAdversary for UswPairTrap {
    fn offline(&self) -> OfflineSide {
        OfflineSide::new(vec![vec![0, 1]]).expect("static layout is valid")
    }

    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
        let step = self.step;
        self.step += 1;
        match step {
            0 => Some(vec![0, 1]),
            1 => {
                if current.total_mass().is_zero() {
                    self.notes.push(
                        "the opening item was discarded entirely; welfare is pinned at zero"
                            .to_string(),
                    );
                }
                Some(vec![heaviest(current, &[0, 1])])
            }
            _ => None,
        }
    }

    fn notes(&self) -> Vec<String> {
        self.notes.clone()
    }
}

/// Four divisible items against two classes of three agents.
///
/// The first two items are liked by two agents in each class.  The
/// adversary then aims the last two items at the whole class that came out
/// ahead (ties to the first class) plus the single heaviest liker from the
/// other class, which caps divisible water-filling's class envy at exactly
/// `3/4`.
#[derive(Debug, Default)]
pub struct DivisibleCefTrap {
    step: usize,
    tail: Vec<usize>,
}

impl DivisibleCefTrap {
    pub fn new() -> Self {
        Self::default()
    }
}

impl AdaptiveAdversary for DivisibleCefTrap {
    fn offline(&self) -> OfflineSide {
        OfflineSide::new(vec![vec![0, 1, 2], vec![3, 4, 5]]).expect("static layout is valid")
    }

    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
        let step = self.step;
        self.step += 1;
        match step {
            0 | 1 => Some(vec![0, 1, 3, 4]),
            2 => {
                let value = |agents: std::ops::Range<usize>| -> Frac {
                    agents.map(|a| current.agent_load(a).clone()).sum()
                };
                let ahead = if value(3..6) > value(0..3) { 1 } else { 0 };
                let outside_likers = if ahead == 0 { [3, 4] } else { [0, 1] };
                let q = heaviest(current, &outside_likers);
                let mut tail: Vec<usize> = (3 * ahead..3 * ahead + 3).collect();
                tail.push(q);
                tail.sort_unstable();
                self.tail = tail.clone();
                Some(tail)
            }
            3 => Some(self.tail.clone()),
            _ => None,
        }
    }
}

#[derive(Debug)]
enum TrapPhase {
    RoundFirst,
    RoundSecond,
    Tail { neighbors: Vec<usize>, remaining: usize },
    Done,
}

/// Paired arrival rounds over two large classes, then trailing closers.
///
/// Both classes hold `3n` agents, of which the first `n` per class are live
/// targets.  Each round emits two items liked by every live survivor of
/// both classes, then retires the lowest-loaded survivor on each side.
/// Once all survivors are exactly saturated (after `t` rounds, say), the
/// adversary emits `2(n - t)` closing items liked by the entire heavier
/// class plus the lighter class's survivors.  The closers are fully
/// absorbed by the heavier class's spare agents, so the allocated pool
/// keeps growing while the lighter class's value stalls: against divisible
/// water-filling with `n = 20` the lighter class's allocated-pool
/// proportionality ratio lands at `(20 - 8(H_20 - H_8)) / (39/2)`, just
/// below `(1 - 1/e) * 20/19`.
#[derive(Debug)]
pub struct AllocatedPropTrap {
    n: usize,
    live: [Vec<usize>; 2],
    phase: TrapPhase,
    rounds_done: usize,
    notes: Vec<String>,
}

impl AllocatedPropTrap {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "needs at least one round");
        AllocatedPropTrap {
            n,
            live: [(0..n).collect(), (3 * n..4 * n).collect()],
            phase: TrapPhase::RoundFirst,
            rounds_done: 0,
            notes: Vec::new(),
        }
    }

    fn round_neighbors(&self) -> Vec<usize> {
        let mut nbrs = self.live[0].clone();
        nbrs.extend(&self.live[1]);
        nbrs
    }

    /// End-of-round bookkeeping: retire the lowest-loaded live agent on
    /// each side, then either keep going, move to the closing items, or
    /// give up after `3n` fruitless rounds.
    fn retire_and_check(&mut self, current: &FractionalMatching) {
        for side in &mut self.live {
            if side.is_empty() {
                continue;
            }
            let mut drop_pos = 0;
            for pos in 1..side.len() {
                if current.agent_load(side[pos]) < current.agent_load(side[drop_pos]) {
                    drop_pos = pos;
                }
            }
            side.remove(drop_pos);
        }
        let one = Frac::one();
        let saturated =
            self.live.iter().flatten().all(|&a| *current.agent_load(a) == one);
        if saturated {
            let closers = 2 * self.n.saturating_sub(self.rounds_done);
            self.notes.push(format!(
                "survivors saturated after round {}; emitting {closers} closing items",
                self.rounds_done
            ));
            self.start_tail(current, closers);
        } else if self.rounds_done >= 3 * self.n {
            self.notes.push(
                "survivors never saturated; giving up without closing items".to_string(),
            );
            self.phase = TrapPhase::Done;
        }
    }

    fn start_tail(&mut self, current: &FractionalMatching, remaining: usize) {
        if remaining == 0 {
            self.phase = TrapPhase::Done;
            return;
        }
        let n = self.n;
        let class_value = |lo: usize| -> Frac {
            (lo..lo + 3 * n).map(|a| current.agent_load(a).clone()).sum()
        };
        // Ties make the second class the heavier one, so the first class is
        // the audited, stalled side by default.
        let heavier = if class_value(0) > class_value(3 * n) { 0 } else { 1 };
        let lighter = 1 - heavier;
        let mut neighbors: Vec<usize> = (heavier * 3 * n..(heavier + 1) * 3 * n).collect();
        neighbors.extend(&self.live[lighter]);
        neighbors.sort_unstable();
        self.phase = TrapPhase::Tail { neighbors, remaining };
    }
}

impl AdaptiveAdversary for AllocatedPropTrap {
    fn offline(&self) -> OfflineSide {
        let n = self.n;
        OfflineSide::new(vec![(0..3 * n).collect(), (3 * n..6 * n).collect()])
            .expect("constructed layout is valid")
    }

    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
        if matches!(self.phase, TrapPhase::RoundFirst) && self.rounds_done > 0 {
            self.retire_and_check(current);
        }
        match &mut self.phase {
            TrapPhase::RoundFirst => {
                self.phase = TrapPhase::RoundSecond;
                Some(self.round_neighbors())
            }
            TrapPhase::RoundSecond => {
                self.rounds_done += 1;
                self.phase = TrapPhase::RoundFirst;
                Some(self.round_neighbors())
            }
            TrapPhase::Tail { neighbors, remaining } => {
                *remaining -= 1;
                let nbrs = neighbors.clone();
                if *remaining == 0 {
                    self.phase = TrapPhase::Done;
                }
                Some(nbrs)
            }
            TrapPhase::Done => None,
        }
    }

    fn notes(&self) -> Vec<String> {
        self.notes.clone()
    }
}

/// `k` independent two-agent classes with two items per class: the second
/// item of each copy is liked only by whichever agent holds more of the
/// first.  Any algorithm that picks deterministically inside a class wastes
/// every second item, holding each class's proportionality ratio at `1/2`.
#[derive(Debug)]
pub struct WithinClassTrap {
    k: usize,
    step: usize,
}

impl WithinClassTrap {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "needs at least one class");
        WithinClassTrap { k, step: 0 }
    }
}

impl AdaptiveAdversary for WithinClassTrap {
    fn offline(&self) -> OfflineSide {
        OfflineSide::new((0..self.k).map(|j| vec![2 * j, 2 * j + 1]).collect())
            .expect("constructed layout is valid")
    }

    fn next_neighbors(&mut self, current: &FractionalMatching) -> Option<Vec<usize>> {
        let step = self.step;
        self.step += 1;
        if step >= 2 * self.k {
            return None;
        }
        let pair = [2 * (step / 2), 2 * (step / 2) + 1];
        if step.is_multiple_of(2) {
            Some(pair.to_vec())
        } else {
            Some(vec![heaviest(current, &pair)])
        }
    }
}

/// Stable names of the provided adaptive adversaries, in listing order.
pub fn adversary_names() -> Vec<&'static str> {
    vec![
        "cef1-half-trap",
        "class-level-trap",
        "usw-pair-trap",
        "divisible-cef-trap",
        "allocated-prop-trap-20",
        "within-class-trap-1",
    ]
}

/// Builds a provided adversary by name, with its standard parameters.
pub fn make_adversary(name: &str) -> Option<Box<dyn AdaptiveAdversary>> {
    match name {
        "cef1-half-trap" => Some(Box::new(PairTrap::envy_trap())),
        "class-level-trap" => Some(Box::new(PairTrap::class_level_trap())),
        "usw-pair-trap" => Some(Box::new(UswPairTrap::new())),
        "divisible-cef-trap" => Some(Box::new(DivisibleCefTrap::new())),
        "allocated-prop-trap-20" => Some(Box::new(AllocatedPropTrap::new(20))),
        "within-class-trap-1" => Some(Box::new(WithinClassTrap::new(1))),
        _ => None,
    }
}
