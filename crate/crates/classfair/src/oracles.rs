//! Independent re-implementations of the valuation quantities, used to
//! cross-check the production code on small inputs.
//!
//! * [`optimistic_value_dual`] evaluates the valuation LP's dual: by total
//!   unimodularity its optimum is attained at a 0/1 vertex, so the value is
//!   `min over S of |S| + sum of bundle mass on items liked outside S`,
//!   ranging over subsets `S` of the class.
//! * [`prop_share_oracle`] solves the full max-min partition linear program
//!   with the exact simplex (free division of the pool into `k` shares).
//! * [`pessimistic_value_bruteforce`] enumerates assignments directly and
//!   minimizes over maximal ones.

use crate::frac::Frac;
use crate::instance::Instance;
use crate::simplex::maximize;
use crate::valuation::ValuationError;
use num::{One, Zero};
use std::collections::BTreeSet;

/// Exact optimistic value via the dual vertex enumeration.
/// Guarded to classes of at most 20 agents.
pub fn optimistic_value_dual(
    inst: &Instance,
    class: usize,
    bundle: &[Frac],
) -> Result<Frac, ValuationError> {
    if bundle.len() != inst.n_items() {
        return Err(ValuationError::BundleShape { got: bundle.len(), want: inst.n_items() });
    }
    let members = inst.class_members(class);
    let na = members.len();
    if na > 20 {
        return Err(ValuationError::OracleGuard(format!("class size {na} > 20")));
    }
    let mut best: Option<Frac> = None;
    for mask in 0u64..(1u64 << na) {
        // S = agents with their bit set; items liked by some agent outside S
        // must be paid for at their bundle mass.
        let mut covered: BTreeSet<usize> = BTreeSet::new();
        for (pos, &a) in members.iter().enumerate() {
            if mask & (1 << pos) == 0 {
                covered.extend(inst.agent_items(a).iter().copied());
            }
        }
        let mut cost = Frac::from_integer((mask.count_ones() as i64).into());
        for &o in &covered {
            cost += &bundle[o];
        }
        if best.as_ref().is_none_or(|b| cost < *b) {
            best = Some(cost);
        }
    }
    Ok(best.unwrap_or_else(Frac::zero))
}

/// Exact proportional share via the max-min partition LP: divide the pool
/// into `k` per-item shares (summing to at most one per item) to maximize
/// the minimum optimistic value of a share.
///
/// Guards: pool at most 6 items, at most 3 classes, evaluating class at most
/// 4 agents.
pub fn prop_share_oracle(
    inst: &Instance,
    class: usize,
    pool: &BTreeSet<usize>,
) -> Result<Frac, ValuationError> {
    let k = inst.k();
    let members = inst.class_members(class);
    let items: Vec<usize> = pool.iter().copied().collect();
    let p = items.len();
    if p > 6 {
        return Err(ValuationError::OracleGuard(format!("pool size {p} > 6")));
    }
    if k > 3 {
        return Err(ValuationError::OracleGuard(format!("{k} classes > 3")));
    }
    if members.len() > 4 {
        return Err(ValuationError::OracleGuard(format!(
            "class size {} > 4",
            members.len()
        )));
    }
    if p == 0 {
        return Ok(Frac::zero());
    }

    // Edges of the evaluating class into the pool, as (agent pos, item pos).
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (ap, &a) in members.iter().enumerate() {
        for (ip, &o) in items.iter().enumerate() {
            if inst.has_edge(a, o) {
                edges.push((ap, ip));
            }
        }
    }

    // Variables: t | y[j][o] (k*p) | z[j][e] (k*|E|).
    let ne = edges.len();
    let n_vars = 1 + k * p + k * ne;
    let yv = |j: usize, ip: usize| 1 + j * p + ip;
    let zv = |j: usize, e: usize| 1 + k * p + j * ne + e;

    let mut rows: Vec<Vec<Frac>> = Vec::new();
    let mut rhs: Vec<Frac> = Vec::new();
    let zero_row = || vec![Frac::zero(); n_vars];
    let one = Frac::one;

    // t - sum_e z[j][e] <= 0 per share j.
    for j in 0..k {
        let mut row = zero_row();
        row[0] = one();
        for e in 0..ne {
            row[zv(j, e)] = -one();
        }
        rows.push(row);
        rhs.push(Frac::zero());
    }
    // sum_{e into o} z[j][e] - y[j][o] <= 0 per (j, o).
    for j in 0..k {
        for ip in 0..p {
            let mut row = zero_row();
            for (e, &(_, eip)) in edges.iter().enumerate() {
                if eip == ip {
                    row[zv(j, e)] = one();
                }
            }
            row[yv(j, ip)] = -one();
            rows.push(row);
            rhs.push(Frac::zero());
        }
    }
    // sum_{e from a} z[j][e] <= 1 per (j, a).
    for j in 0..k {
        for ap in 0..members.len() {
            let mut row = zero_row();
            for (e, &(eap, _)) in edges.iter().enumerate() {
                if eap == ap {
                    row[zv(j, e)] = one();
                }
            }
            rows.push(row);
            rhs.push(one());
        }
    }
    // sum_j y[j][o] <= 1 per o.
    for ip in 0..p {
        let mut row = zero_row();
        for j in 0..k {
            row[yv(j, ip)] = one();
        }
        rows.push(row);
        rhs.push(one());
    }

    let mut c = vec![Frac::zero(); n_vars];
    c[0] = one();
    let result = maximize(&rows, &rhs, &c)?;
    Ok(result.value)
}

/// Pessimistic value by direct enumeration of assignments, minimizing over
/// maximal ones. Guarded to at most 6 items and 200000 assignment leaves.
pub fn pessimistic_value_bruteforce(
    inst: &Instance,
    class: usize,
    items: &BTreeSet<usize>,
) -> Result<u64, ValuationError> {
    if items.len() > 6 {
        return Err(ValuationError::OracleGuard(format!("{} items > 6", items.len())));
    }
    let members = inst.class_members(class);
    let item_list: Vec<usize> = items.iter().copied().collect();
    let likers: Vec<Vec<usize>> = item_list
        .iter()
        .map(|&o| {
            inst.item_neighbors(o)
                .iter()
                .copied()
                .filter(|a| members.binary_search(a).is_ok())
                .collect()
        })
        .collect();
    let leaves: u128 = likers.iter().map(|l| (l.len() + 1) as u128).product();
    if leaves > 200_000 {
        return Err(ValuationError::OracleGuard(format!("{leaves} assignments > 200000")));
    }

    fn recurse(
        idx: usize,
        item_list: &[usize],
        likers: &[Vec<usize>],
        assigned: &mut Vec<Option<usize>>,
        used: &mut BTreeSet<usize>,
        best: &mut Option<u64>,
    ) {
        if idx == item_list.len() {
            // Maximality: no liking pair (a, o) with both sides free.
            for (ip, ls) in likers.iter().enumerate() {
                if assigned[ip].is_none() && ls.iter().any(|a| !used.contains(a)) {
                    return;
                }
            }
            let size = assigned.iter().flatten().count() as u64;
            if best.is_none_or(|b| size < b) {
                *best = Some(size);
            }
            return;
        }
        assigned[idx] = None;
        recurse(idx + 1, item_list, likers, assigned, used, best);
        for &a in &likers[idx] {
            if !used.contains(&a) {
                used.insert(a);
                assigned[idx] = Some(a);
                recurse(idx + 1, item_list, likers, assigned, used, best);
                assigned[idx] = None;
                used.remove(&a);
            }
        }
    }

    let mut assigned = vec![None; item_list.len()];
    let mut used = BTreeSet::new();
    let mut best = None;
    recurse(0, &item_list, &likers, &mut assigned, &mut used, &mut best);
    Ok(best.expect("the empty assignment is maximal when nothing is likable"))
}
