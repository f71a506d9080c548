//! Bundle valuations and fair-share quantities.
//!
//! For a class `i` and a per-item mass vector `y` (a bundle), the
//! *optimistic* value is the best total mass the class's agents could
//! absorb from `y` if it were re-divided optimally among them:
//!
//! ```text
//! V*_i(y) = max sum x[a][o]   over x >= 0 supported on class-i edges,
//!           sum_o x[a][o] <= 1 per agent,  sum_a x[a][o] <= y_o per item.
//! ```
//!
//! The *pessimistic* value of an integral bundle is the size of the worst
//! maximal matching of the bundle's items to the class's agents — what the
//! class is guaranteed even under adversarial (but non-wasteful) in-class
//! assignment.
//!
//! Shares: `prop` evaluates the optimistic value at the uniform `1/k`
//! division of a pool, and `mms` is the best worst-bundle value over all
//! partitions of the pool into `k` item sets. Both exist in whole-pool and
//! restricted-pool variants.

use crate::frac::Frac;
use crate::instance::Instance;
use crate::matching::FractionalMatching;
use crate::maxflow::{can_saturate_left, max_bipartite_matching, Dinic};
use crate::simplex::SimplexError;
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// Size guard for pessimistic valuations (`|items| + |class|`).
pub const PESSIMISTIC_GUARD: usize = 20;
/// Leaf budget for maximin-share partition enumeration.
pub const MMS_BUDGET: u128 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValuationError {
    #[error("bundle has {got} entries, instance has {want} items")]
    BundleShape { got: usize, want: usize },
    #[error("bundle entry for item {item} lies outside [0, 1]")]
    Domain { item: usize },
    #[error("pessimistic valuation guard exceeded: |items| + |class| = {size} > {limit}")]
    PessimisticGuard { size: usize, limit: usize },
    #[error("maximin enumeration budget exceeded: about {leaves} partitions > {budget}")]
    MmsBudget { leaves: u128, budget: u128 },
    #[error("share oracle guard exceeded: {0}")]
    OracleGuard(String),
    #[error("share oracle LP failed: {0}")]
    Oracle(#[from] SimplexError),
}

/// Total mass received by the members of `class` under `m`.
pub fn class_value(m: &FractionalMatching, inst: &Instance, class: usize) -> Frac {
    inst.class_members(class)
        .iter()
        .fold(Frac::zero(), |acc, &a| acc + m.agent_load(a))
}

fn check_bundle(inst: &Instance, bundle: &[Frac]) -> Result<(), ValuationError> {
    if bundle.len() != inst.n_items() {
        return Err(ValuationError::BundleShape { got: bundle.len(), want: inst.n_items() });
    }
    let one = Frac::one();
    for (o, y) in bundle.iter().enumerate() {
        if y.is_negative() || *y > one {
            return Err(ValuationError::Domain { item: o });
        }
    }
    Ok(())
}

/// Optimistic value of an integral item set for `class` (maximum matching
/// of the set's items to the class's agents along edges).
pub fn optimistic_value_items(inst: &Instance, class: usize, items: &BTreeSet<usize>) -> u64 {
    let members = inst.class_members(class);
    let item_pos: HashMap<usize, usize> =
        items.iter().enumerate().map(|(p, &o)| (o, p)).collect();
    let adj: Vec<Vec<usize>> = members
        .iter()
        .map(|&a| {
            inst.agent_items(a)
                .iter()
                .filter_map(|o| item_pos.get(o).copied())
                .collect()
        })
        .collect();
    max_bipartite_matching(members.len(), items.len(), &adj).size as u64
}

/// Optimistic value `V*` of a fractional bundle for `class`, exact.
pub fn optimistic_value(
    inst: &Instance,
    class: usize,
    bundle: &[Frac],
) -> Result<Frac, ValuationError> {
    check_bundle(inst, bundle)?;
    let one = Frac::one();
    if bundle.iter().all(|y| y.is_zero() || *y == one) {
        let items: BTreeSet<usize> =
            (0..inst.n_items()).filter(|&o| bundle[o] == one).collect();
        return Ok(Frac::from_integer(optimistic_value_items(inst, class, &items).into()));
    }

    // Clear denominators: scale capacities by D = lcm of denominators.
    let mut d = BigInt::one();
    for y in bundle.iter().filter(|y| !y.is_zero()) {
        d = d.lcm(y.denom());
    }
    let members = inst.class_members(class);
    let items: Vec<usize> = (0..inst.n_items())
        .filter(|&o| {
            !bundle[o].is_zero() && inst.item_neighbors(o).iter().any(|a| members.binary_search(a).is_ok())
        })
        .collect();
    let agents: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&a| inst.agent_items(a).iter().any(|o| !bundle[*o].is_zero()))
        .collect();
    if items.is_empty() || agents.is_empty() {
        return Ok(Frac::zero());
    }

    // Nodes: 0 = source, 1..=items, items+1..=items+agents, last = sink.
    let source = 0usize;
    let item_base = 1usize;
    let agent_base = 1 + items.len();
    let sink = agent_base + agents.len();
    let mut net = Dinic::new(sink + 1);
    let mut total_source_cap = BigInt::zero();
    for (ip, &o) in items.iter().enumerate() {
        let cap = bundle[o].numer() * (&d / bundle[o].denom());
        total_source_cap += &cap;
        net.add_edge(source, item_base + ip, cap);
    }
    for (ap, &a) in agents.iter().enumerate() {
        net.add_edge(agent_base + ap, sink, d.clone());
        for (ip, &o) in items.iter().enumerate() {
            if inst.has_edge(a, o) {
                net.add_edge(item_base + ip, agent_base + ap, d.clone());
            }
        }
    }
    let bound = total_source_cap + BigInt::one();
    let flow = net.max_flow(source, sink, bound);
    Ok(Frac::new(flow, d))
}

/// Pessimistic value of an integral item set: the size of the smallest
/// maximal matching of the set to the class's agents.
///
/// A candidate matched-agent set `A` is realizable by a maximal matching iff
/// some matching saturates `A` and some matching (also from `A`) saturates
/// every item that an agent outside `A` likes; enumeration runs over `A` by
/// increasing size, so the first hit is the minimum.
pub fn pessimistic_value(
    inst: &Instance,
    class: usize,
    items: &BTreeSet<usize>,
) -> Result<u64, ValuationError> {
    let members = inst.class_members(class);
    let size = items.len() + members.len();
    if size > PESSIMISTIC_GUARD {
        return Err(ValuationError::PessimisticGuard { size, limit: PESSIMISTIC_GUARD });
    }
    // Only agents with an edge into the set, and items with an edge into the
    // class, matter for maximality.
    let item_list: Vec<usize> = items
        .iter()
        .copied()
        .filter(|&o| inst.item_neighbors(o).iter().any(|a| members.binary_search(a).is_ok()))
        .collect();
    let item_pos: HashMap<usize, usize> =
        item_list.iter().enumerate().map(|(p, &o)| (o, p)).collect();
    let relevant: Vec<usize> = members
        .iter()
        .copied()
        .filter(|&a| inst.agent_items(a).iter().any(|o| item_pos.contains_key(o)))
        .collect();
    let r = relevant.len();
    if item_list.is_empty() || r == 0 {
        return Ok(0);
    }
    // adjacency of relevant agents into item positions
    let agent_adj: Vec<Vec<usize>> = relevant
        .iter()
        .map(|&a| {
            inst.agent_items(a).iter().filter_map(|o| item_pos.get(o).copied()).collect()
        })
        .collect();
    // per item position, which relevant agents like it
    let mut item_adj: Vec<Vec<usize>> = vec![Vec::new(); item_list.len()];
    for (ai, adj) in agent_adj.iter().enumerate() {
        for &ip in adj {
            item_adj[ip].push(ai);
        }
    }

    for t in 0..=r {
        // Gosper's hack: all r-bit masks with exactly t ones, ascending.
        let mut mask: u64 = if t == 0 { 0 } else { (1u64 << t) - 1 };
        loop {
            // Demanded items: liked by some agent outside A.
            let mut demanded: Vec<usize> = Vec::new();
            for (ip, likers) in item_adj.iter().enumerate() {
                if likers.iter().any(|&ai| mask & (1 << ai) == 0) {
                    demanded.push(ip);
                }
            }
            let in_a: Vec<usize> = (0..r).filter(|&ai| mask & (1 << ai) != 0).collect();
            let a_adj: Vec<Vec<usize>> = in_a.iter().map(|&ai| agent_adj[ai].clone()).collect();
            let saturate_a = can_saturate_left(in_a.len(), item_list.len(), &a_adj);
            let feasible = saturate_a && {
                let pos_of: HashMap<usize, usize> =
                    in_a.iter().enumerate().map(|(p, &ai)| (ai, p)).collect();
                let d_adj: Vec<Vec<usize>> = demanded
                    .iter()
                    .map(|&ip| {
                        item_adj[ip].iter().filter_map(|ai| pos_of.get(ai).copied()).collect()
                    })
                    .collect();
                can_saturate_left(demanded.len(), in_a.len(), &d_adj)
            };
            if feasible {
                return Ok(t as u64);
            }
            if t == 0 {
                break;
            }
            // next mask with same popcount
            let c = mask & mask.wrapping_neg();
            let rmask = mask + c;
            if rmask >= 1u64 << r {
                break;
            }
            mask = rmask | (((mask ^ rmask) / c) >> 2);
        }
    }
    unreachable!("some maximal matching always exists");
}

/// Proportional share of `class`: optimistic value of the uniform `1/k`
/// division of all items.
pub fn prop_share(inst: &Instance, class: usize) -> Frac {
    let pool: BTreeSet<usize> = (0..inst.n_items()).collect();
    prop_share_for_pool(inst, class, &pool)
}

/// Proportional share over a restricted pool: uniform `1/k` on the pool's
/// items, zero elsewhere.
pub fn prop_share_for_pool(inst: &Instance, class: usize, pool: &BTreeSet<usize>) -> Frac {
    let k = inst.k() as i64;
    let share = Frac::new(BigInt::one(), BigInt::from(k));
    let bundle: Vec<Frac> = (0..inst.n_items())
        .map(|o| if pool.contains(&o) { share.clone() } else { Frac::zero() })
        .collect();
    optimistic_value(inst, class, &bundle).expect("uniform bundle is valid")
}

/// Counts set partitions of `n` items into at most `k` unlabeled nonempty
/// blocks (the leaf count of the maximin enumeration), saturating.
fn partition_count(n: usize, k: usize) -> u128 {
    // Stirling numbers of the second kind, summed over 1..=k blocks.
    let mut row: Vec<u128> = vec![0; n + 1];
    row[0] = 1; // S(0, 0)
    let mut total: u128 = 0;
    for j in 1..=k.min(n.max(1)) {
        let mut next = vec![0u128; n + 1];
        for i in j..=n {
            let a = next[i - 1];
            let b = row[i - 1];
            next[i] = a.saturating_mul(j as u128).saturating_add(b).min(u128::MAX / 2);
            // recurrence S(i, j) = j*S(i-1, j) + S(i-1, j-1)
        }
        if n >= j {
            total = total.saturating_add(next[n]);
        }
        row = next;
    }
    total
}

struct MmsSearch<'a> {
    inst: &'a Instance,
    class: usize,
    items: Vec<usize>,
    memo: HashMap<u64, u64>,
    best: u64,
}

impl<'a> MmsSearch<'a> {
    fn value(&mut self, mask: u64) -> u64 {
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let set: BTreeSet<usize> = self
            .items
            .iter()
            .enumerate()
            .filter(|(p, _)| mask & (1 << p) != 0)
            .map(|(_, &o)| o)
            .collect();
        let v = optimistic_value_items(self.inst, self.class, &set);
        self.memo.insert(mask, v);
        v
    }

    fn search(&mut self, idx: usize, bundles: &mut Vec<u64>, used: usize, k: usize) {
        let n = self.items.len();
        if idx == n {
            if used == k {
                let masks: Vec<u64> = bundles.clone();
                let worst = masks.into_iter().map(|m| self.value(m)).min().unwrap_or(0);
                if worst > self.best {
                    self.best = worst;
                }
            }
            return;
        }
        // Upper bound: each bundle can at best also absorb all remaining
        // items; an unopened bundle can at best absorb all remaining items.
        let remaining: u64 = ((1u64 << n) - 1) & !((1u64 << idx) - 1);
        let mut bound = u64::MAX;
        for bundle in bundles.iter().take(used) {
            let b = self.value(bundle | remaining);
            bound = bound.min(b);
        }
        if used < k {
            bound = bound.min(self.value(remaining));
        }
        if bound <= self.best {
            return;
        }
        let open_limit = (used + 1).min(k);
        for j in 0..open_limit {
            let new_used = if j == used { used + 1 } else { used };
            bundles[j] |= 1 << idx;
            self.search(idx + 1, bundles, new_used, k);
            bundles[j] &= !(1u64 << idx);
        }
    }
}

/// Maximin share of `class` over `pool`: the best achievable
/// worst-bundle optimistic value over partitions of the pool into `k`
/// (possibly empty) item sets.
pub fn mms_share(
    inst: &Instance,
    class: usize,
    pool: &BTreeSet<usize>,
) -> Result<u64, ValuationError> {
    let k = inst.k();
    let n = pool.len();
    if n < k {
        // Some bundle is empty in every partition.
        return Ok(0);
    }
    let leaves = partition_count(n, k);
    if leaves > MMS_BUDGET {
        return Err(ValuationError::MmsBudget { leaves, budget: MMS_BUDGET });
    }
    let mut search = MmsSearch {
        inst,
        class,
        items: pool.iter().copied().collect(),
        memo: HashMap::new(),
        best: 0,
    };
    let mut bundles = vec![0u64; k];
    search.search(0, &mut bundles, 0, k);
    Ok(search.best)
}

/// Restricts to the fully allocated items (load exactly one) of `m`.
pub fn allocated_pool(m: &FractionalMatching) -> BTreeSet<usize> {
    m.fully_allocated_items().into_iter().collect()
}

/// Optimal utilitarian social welfare: maximum matching over all agents.
pub fn usw_opt(inst: &Instance) -> u64 {
    let adj: Vec<Vec<usize>> =
        (0..inst.n_agents()).map(|a| inst.agent_items(a).to_vec()).collect();
    max_bipartite_matching(inst.n_agents(), inst.n_items(), &adj).size as u64
}
