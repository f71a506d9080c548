//! Handcrafted instance families whose audit values are known in closed
//! form, used to pin both the guarantees and the frontiers at desk scale.
//!
//! Each builder returns a concrete [`Instance`], usually together with a
//! designated matching to audit.  [`fixture`] exposes the standard
//! parameterizations under stable kebab-case names for the CLI.

use crate::instance::Instance;
use crate::matching::{FractionalMatching, IntegralMatching};

/// A named instance with an optional designated matching to audit.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub instance: Instance,
    /// A matching whose audit values are pinned by tests, when the fixture
    /// is about auditing a specific outcome rather than running algorithms.
    pub designated: Option<FractionalMatching>,
}

/// Two classes of three agents paired one-to-one across classes.  Four items
/// arrive: one per pair, then a repeat of pair `0`.  The designated matching
/// leaves the second class with a single item, so its envy-up-to-one and
/// maximin ratios both sit exactly at `1/2`.
pub fn pair_trap() -> (Instance, IntegralMatching) {
    let inst = Instance::new(
        vec![vec![0, 1, 2], vec![3, 4, 5]],
        4,
        [(0, 0), (3, 0), (1, 1), (4, 1), (2, 2), (5, 2), (0, 3), (3, 3)],
    )
    .expect("static fixture is valid");
    let matching = IntegralMatching::from_pairs(6, 4, [(0, 0), (1, 4), (2, 5), (3, 3)]);
    (inst, matching)
}

/// A class of `n` specialists against `2n` omnivores, revealed in `n` rounds
/// of two identical items.  Specialist `i` likes round-`r` items exactly when
/// `i >= r`, so the specialist pool shrinks every round while the omnivores
/// never fill up.  Divisible water-filling keeps splitting items in half
/// until the surviving specialists saturate, which pins the specialists'
/// envy ratio near `1 - 1/e` as `n` grows (exactly `1` at `n = 1`).
pub fn harmonic_cef(n: usize) -> Instance {
    assert!(n >= 1, "needs at least one round");
    let mut classes = vec![Vec::new(); 2];
    classes[0].extend(0..n);
    classes[1].extend(n..3 * n);
    let mut edges = Vec::new();
    for r in 0..n {
        for item in [2 * r, 2 * r + 1] {
            for a in r..n {
                edges.push((a, item));
            }
            for a in n..3 * n {
                edges.push((a, item));
            }
        }
    }
    Instance::new(classes, 2 * n, edges).expect("constructed family is valid")
}

/// `n` singleton classes plus one class of `n` agents.  `n` universally liked
/// items arrive first, then one private item per singleton.  Divisible
/// water-filling spreads the universal items evenly across all `n + 1`
/// classes, leaving almost no room for the private items; welfare lands at
/// `(n + 2) / (2(n + 1))` of the offline optimum `2n`.
pub fn red_blue_usw(n: usize) -> Instance {
    assert!(n >= 1, "needs at least one singleton class");
    let mut classes: Vec<Vec<usize>> = (0..n).map(|j| vec![j]).collect();
    classes.push((n..2 * n).collect());
    let mut edges = Vec::new();
    for item in 0..n {
        for a in 0..2 * n {
            edges.push((a, item));
        }
    }
    for i in 0..n {
        edges.push((i, n + i));
    }
    Instance::new(classes, 2 * n, edges).expect("constructed family is valid")
}

/// `k - 1` item types in `k` copies each.  Classes `0..k-1` hold `k` agents
/// apiece and class `k - 1` holds `k - 1` agents, one per type.  The
/// designated matching hands every copy of type `j` to class `j`, so the last
/// class gets nothing even though its maximin share is `k - 1`: its maximin
/// ratio is `0` while every single-item removal still leaves it positive
/// optimistic value, so its envy-up-to-one ratio is `0` as well.
pub fn type_copies(k: usize) -> (Instance, IntegralMatching) {
    assert!(k >= 2, "needs at least two classes");
    let mut classes: Vec<Vec<usize>> =
        (0..k - 1).map(|c| (c * k..(c + 1) * k).collect()).collect();
    classes.push((k * (k - 1)..k * (k - 1) + (k - 1)).collect());
    let n_agents = k * k - 1;
    let n_items = k * (k - 1);
    let mut edges = Vec::new();
    for ty in 0..k - 1 {
        for copy in 0..k {
            let item = ty * k + copy;
            for a in ty * k..(ty + 1) * k {
                edges.push((a, item));
            }
            edges.push((k * (k - 1) + ty, item));
        }
    }
    let inst = Instance::new(classes, n_items, edges).expect("constructed family is valid");
    let matching =
        IntegralMatching::from_pairs(n_agents, n_items, (0..n_items).map(|o| (o, o)));
    (inst, matching)
}

/// `k` classes of `k` agents and only `k - 1` items, each liked by everyone.
/// Any `k`-way split leaves some class an empty bundle, so every maximin
/// share is `0` and the maximin audit is vacuous, while the designated
/// matching (everything to class `0`) drives plain envy to `0`.
pub fn universal_items(k: usize) -> (Instance, IntegralMatching) {
    assert!(k >= 2, "needs at least two classes");
    let classes: Vec<Vec<usize>> = (0..k).map(|c| (c * k..(c + 1) * k).collect()).collect();
    let n_agents = k * k;
    let n_items = k - 1;
    let mut edges = Vec::new();
    for item in 0..n_items {
        for a in 0..n_agents {
            edges.push((a, item));
        }
    }
    let inst = Instance::new(classes, n_items, edges).expect("constructed family is valid");
    let matching =
        IntegralMatching::from_pairs(n_agents, n_items, (0..n_items).map(|o| (o, o)));
    (inst, matching)
}

/// Two classes of two agents and four items, small enough to audit by hand.
/// Returns the instance plus two reference matchings: `balanced` is
/// non-wasteful and envy-up-to-one fair but only `3/4` of optimal welfare,
/// while `complete` hits full welfare and stays envy-up-to-one fair.
pub fn two_class_showcase() -> (Instance, IntegralMatching, IntegralMatching) {
    let inst = Instance::new(
        vec![vec![0, 1], vec![2, 3]],
        4,
        [(0, 0), (2, 0), (1, 1), (3, 1), (0, 2), (2, 2), (3, 3)],
    )
    .expect("static fixture is valid");
    let balanced = IntegralMatching::from_pairs(4, 4, [(0, 0), (1, 3), (2, 2)]);
    let complete = IntegralMatching::from_pairs(4, 4, [(0, 2), (1, 1), (2, 0), (3, 3)]);
    (inst, balanced, complete)
}

/// Separates the optimistic and pessimistic envy audits on one matching:
/// the envied bundle is worth `2` under a best-case rematch but only `1`
/// under the worst maximal one, so the same matching audits at `1/2`
/// optimistically and exactly `1` pessimistically.
pub fn pessimistic_separation() -> (Instance, IntegralMatching) {
    let inst = Instance::new(
        vec![vec![0, 1], vec![2, 3]],
        3,
        [(0, 0), (1, 0), (0, 2), (1, 1), (2, 0), (3, 2)],
    )
    .expect("static fixture is valid");
    let matching = IntegralMatching::from_pairs(4, 3, [(0, 2), (1, 1), (2, 3)]);
    (inst, matching)
}

/// One class of `n` agents where item `t` is liked by agents `t..n` only.
/// The liking set shrinks as items arrive, so divisible water-filling
/// saturates the tail of the class early and must discard the final items;
/// welfare lands strictly between `1 - 1/e` and `1 - 1/e + 1/n` of optimum.
pub fn nested_single_class(n: usize) -> Instance {
    assert!(n >= 1, "needs at least one agent");
    let mut edges = Vec::new();
    for t in 0..n {
        for a in t..n {
            edges.push((a, t));
        }
    }
    Instance::new(vec![(0..n).collect()], n, edges).expect("constructed family is valid")
}

fn registry() -> Vec<Fixture> {
    let (pair_inst, pair_m) = pair_trap();
    let (types_inst, types_m) = type_copies(4);
    let (universal_inst, universal_m) = universal_items(4);
    let (showcase_inst, showcase_balanced, _) = two_class_showcase();
    let (pess_inst, pess_m) = pessimistic_separation();
    vec![
        Fixture {
            name: "pair-trap",
            description: "paired classes where one class ends with a single item; \
                          envy-up-to-one and maximin ratios sit at 1/2",
            instance: pair_inst,
            designated: Some(pair_m.to_fractional()),
        },
        Fixture {
            name: "harmonic-cef-20",
            description: "20 specialist agents against 40 omnivores over 20 rounds; \
                          water-filling's class envy lands near 1 - 1/e",
            instance: harmonic_cef(20),
            designated: None,
        },
        Fixture {
            name: "red-blue-usw-10",
            description: "10 singleton classes plus a 10-agent class; water-filling \
                          welfare is exactly 6/11 of optimum",
            instance: red_blue_usw(10),
            designated: None,
        },
        Fixture {
            name: "type-copies-4",
            description: "3 item types in 4 copies; the 3-agent class is shut out with \
                          maximin ratio 0 and envy-up-to-one ratio 0",
            instance: types_inst,
            designated: Some(types_m.to_fractional()),
        },
        Fixture {
            name: "universal-items-4",
            description: "4 classes of 4 agents but only 3 universal items; every \
                          maximin share is 0 so that audit is vacuous",
            instance: universal_inst,
            designated: Some(universal_m.to_fractional()),
        },
        Fixture {
            name: "two-class-showcase",
            description: "hand-auditable 2x2 instance; designated matching is \
                          non-wasteful and envy-up-to-one fair at 3/4 welfare",
            instance: showcase_inst,
            designated: Some(showcase_balanced.to_fractional()),
        },
        Fixture {
            name: "pessimistic-separation",
            description: "matching that audits at 1/2 under optimistic envy but \
                          exactly 1 under pessimistic envy",
            instance: pess_inst,
            designated: Some(pess_m.to_fractional()),
        },
        Fixture {
            name: "single-class-nested-20",
            description: "one class, shrinking liking sets; water-filling welfare \
                          sits between 1 - 1/e and 1 - 1/e + 1/20 of optimum",
            instance: nested_single_class(20),
            designated: None,
        },
    ]
}

/// Stable names of all registered fixtures, in listing order.
pub fn fixture_names() -> Vec<&'static str> {
    registry().into_iter().map(|f| f.name).collect()
}

/// Looks up a fixture by its registry name.
pub fn fixture(name: &str) -> Option<Fixture> {
    registry().into_iter().find(|f| f.name == name)
}

/// All registered fixtures, in listing order.
pub fn all_fixtures() -> Vec<Fixture> {
    registry()
}
