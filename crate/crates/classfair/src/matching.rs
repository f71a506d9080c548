//! Matchings: fractional (divisible) and integral (indivisible) assignments.
//!
//! A fractional matching stores nonzero entries `x[a][o] >= 0` with cached
//! agent and item loads; validity against an instance additionally requires
//! support on edges and loads at most one on both sides. Bundles are
//! per-item mass vectors; each class's bundle aggregates the mass its
//! members received per item.

use crate::frac::{format_ratio, Frac};
use crate::instance::Instance;
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

/// Violations detected when checking a matching against an instance.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("entry ({agent}, {item}) is not an edge of the instance")]
    NotAnEdge { agent: usize, item: usize },
    #[error("negative mass at ({agent}, {item})")]
    NegativeMass { agent: usize, item: usize },
    #[error("agent {0} is assigned total mass above one")]
    AgentOverloaded(usize),
    #[error("item {0} is assigned total mass above one")]
    ItemOverloaded(usize),
    #[error("dimension mismatch: matching is {got_agents}x{got_items}, instance is {want_agents}x{want_items}")]
    DimensionMismatch {
        got_agents: usize,
        got_items: usize,
        want_agents: usize,
        want_items: usize,
    },
}

/// A per-item mass vector `y` with `0 <= y_o <= 1` (enforced by producers).
pub type Bundle = Vec<Frac>;

/// Divisible matching with cached loads. Entries are kept strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalMatching {
    n_agents: usize,
    n_items: usize,
    entries: BTreeMap<(usize, usize), Frac>,
    agent_loads: Vec<Frac>,
    item_loads: Vec<Frac>,
}

impl FractionalMatching {
    pub fn empty(n_agents: usize, n_items: usize) -> Self {
        FractionalMatching {
            n_agents,
            n_items,
            entries: BTreeMap::new(),
            agent_loads: vec![Frac::zero(); n_agents],
            item_loads: vec![Frac::zero(); n_items],
        }
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    /// Mass of agent `a` on item `o` (zero when absent).
    pub fn mass(&self, agent: usize, item: usize) -> Frac {
        self.entries.get(&(agent, item)).cloned().unwrap_or_else(Frac::zero)
    }

    pub fn agent_load(&self, agent: usize) -> &Frac {
        &self.agent_loads[agent]
    }

    pub fn item_load(&self, item: usize) -> &Frac {
        &self.item_loads[item]
    }

    /// Adds `delta >= 0` mass to entry `(agent, item)`. Panics on negative
    /// delta; capacity checks are the caller's job (the replay layer
    /// enforces them with proper errors).
    pub fn add(&mut self, agent: usize, item: usize, delta: &Frac) {
        assert!(!delta.is_negative(), "negative mass delta");
        if delta.is_zero() {
            return;
        }
        self.agent_loads[agent] += delta;
        self.item_loads[item] += delta;
        *self.entries.entry((agent, item)).or_insert_with(Frac::zero) += delta;
    }

    /// Nonzero entries in lexicographic `(agent, item)` order.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, &Frac)> {
        self.entries.iter().map(|(&(a, o), v)| (a, o, v))
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    /// Total assigned mass (utilitarian social welfare of the matching).
    pub fn total_mass(&self) -> Frac {
        self.item_loads.iter().fold(Frac::zero(), |acc, l| acc + l)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.values().all(|v| v.is_one())
    }

    /// Converts to an integral matching if every entry is exactly one.
    pub fn to_integral(&self) -> Option<IntegralMatching> {
        if !self.is_integral() {
            return None;
        }
        let mut item_to_agent = vec![None; self.n_items];
        for &(a, o) in self.entries.keys() {
            if item_to_agent[o].is_some() {
                return None; // item split across agents in unit chunks
            }
            item_to_agent[o] = Some(a);
        }
        Some(IntegralMatching { n_agents: self.n_agents, item_to_agent })
    }

    /// Checks support, sign, and capacity constraints against an instance.
    pub fn validate(&self, inst: &Instance) -> Result<(), MatchingError> {
        if self.n_agents != inst.n_agents() || self.n_items != inst.n_items() {
            return Err(MatchingError::DimensionMismatch {
                got_agents: self.n_agents,
                got_items: self.n_items,
                want_agents: inst.n_agents(),
                want_items: inst.n_items(),
            });
        }
        for (&(a, o), v) in &self.entries {
            if v.is_negative() {
                return Err(MatchingError::NegativeMass { agent: a, item: o });
            }
            if !inst.has_edge(a, o) {
                return Err(MatchingError::NotAnEdge { agent: a, item: o });
            }
        }
        let one = Frac::one();
        if let Some(a) = self.agent_loads.iter().position(|l| *l > one) {
            return Err(MatchingError::AgentOverloaded(a));
        }
        if let Some(o) = self.item_loads.iter().position(|l| *l > one) {
            return Err(MatchingError::ItemOverloaded(o));
        }
        Ok(())
    }

    /// Builds a matching from `(agent, item, mass)` triples (masses summed).
    pub fn from_triples(
        n_agents: usize,
        n_items: usize,
        triples: impl IntoIterator<Item = (usize, usize, Frac)>,
    ) -> Self {
        let mut m = FractionalMatching::empty(n_agents, n_items);
        for (a, o, v) in triples {
            m.add(a, o, &v);
        }
        m
    }

    /// Per-class bundles: `bundle[c][o]` is the total mass class `c`
    /// received of item `o`.
    pub fn class_bundles(&self, inst: &Instance) -> Vec<Bundle> {
        let mut bundles = vec![vec![Frac::zero(); self.n_items]; inst.k()];
        for (&(a, o), v) in &self.entries {
            bundles[inst.class_of(a)][o] += v;
        }
        bundles
    }

    /// Items whose entire unit of mass is assigned (load exactly one).
    pub fn fully_allocated_items(&self) -> Vec<usize> {
        let one = Frac::one();
        (0..self.n_items).filter(|&o| self.item_loads[o] == one).collect()
    }

    /// Human-readable listing of the nonzero entries.
    pub fn describe(&self) -> String {
        self.support()
            .map(|(a, o, v)| format!("a{a}<-o{o}:{}", format_ratio(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Indivisible matching: each item goes to at most one agent, each agent
/// receives at most one item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralMatching {
    n_agents: usize,
    item_to_agent: Vec<Option<usize>>,
}

impl IntegralMatching {
    pub fn empty(n_agents: usize, n_items: usize) -> Self {
        IntegralMatching { n_agents, item_to_agent: vec![None; n_items] }
    }

    /// Builds from `(item -> agent)` pairs; panics on out-of-range ids or an
    /// item assigned twice (use [`Self::validate`] for instance-level checks).
    pub fn from_pairs(
        n_agents: usize,
        n_items: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let mut m = IntegralMatching::empty(n_agents, n_items);
        for (o, a) in pairs {
            assert!(o < n_items && a < n_agents, "pair out of range");
            assert!(m.item_to_agent[o].is_none(), "item assigned twice");
            m.item_to_agent[o] = Some(a);
        }
        m
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_items(&self) -> usize {
        self.item_to_agent.len()
    }

    pub fn agent_of(&self, item: usize) -> Option<usize> {
        self.item_to_agent[item]
    }

    pub fn assign(&mut self, item: usize, agent: usize) {
        assert!(self.item_to_agent[item].is_none(), "item assigned twice");
        self.item_to_agent[item] = Some(agent);
    }

    pub fn size(&self) -> usize {
        self.item_to_agent.iter().flatten().count()
    }

    pub fn is_matched(&self, agent: usize) -> bool {
        self.item_to_agent.iter().flatten().any(|&a| a == agent)
    }

    pub fn to_fractional(&self) -> FractionalMatching {
        let mut m = FractionalMatching::empty(self.n_agents, self.item_to_agent.len());
        let one = Frac::one();
        for (o, a) in self.item_to_agent.iter().enumerate() {
            if let Some(a) = a {
                m.add(*a, o, &one);
            }
        }
        m
    }

    /// Checks edge support and the at-most-one-item-per-agent constraint.
    pub fn validate(&self, inst: &Instance) -> Result<(), MatchingError> {
        self.to_fractional().validate(inst)
    }

    /// Item ids assigned to each class.
    pub fn class_item_sets(&self, inst: &Instance) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); inst.k()];
        for (o, a) in self.item_to_agent.iter().enumerate() {
            if let Some(a) = a {
                sets[inst.class_of(*a)].push(o);
            }
        }
        sets
    }
}
