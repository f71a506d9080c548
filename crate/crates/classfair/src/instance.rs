//! Problem instances: classed agents, arrival-ordered items, liking edges.
//!
//! Agents carry dense ids `0..n_agents` and are partitioned into nonempty
//! classes; the class order is meaningful (class indices appear in reports).
//! Items carry dense ids `0..n_items` equal to their arrival positions.
//! An edge `(a, o)` means agent `a` likes item `o`; assignments may only be
//! supported on edges.

use std::collections::BTreeSet;
use thiserror::Error;

/// Validation errors for offline sides and instances.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one class")]
    NoClasses,
    #[error("class {0} is empty")]
    EmptyClass(usize),
    #[error("agent {0} appears in more than one class")]
    DuplicateAgent(usize),
    #[error("agent ids must be exactly 0..{expected}, missing {missing}")]
    NonDenseAgents { expected: usize, missing: usize },
    #[error("edge ({agent}, {item}) references a nonexistent agent")]
    EdgeAgentOutOfRange { agent: usize, item: usize },
    #[error("edge ({agent}, {item}) references a nonexistent item")]
    EdgeItemOutOfRange { agent: usize, item: usize },
}

/// The offline side of an instance: the class partition of the agents.
///
/// Online algorithms are constructed from this alone — they never see the
/// items or edges ahead of arrivals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OfflineSide {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl OfflineSide {
    /// Validates that `classes` is a partition of `0..n` into nonempty
    /// groups (member lists are sorted internally).
    pub fn new(classes: Vec<Vec<usize>>) -> Result<Self, InstanceError> {
        if classes.is_empty() {
            return Err(InstanceError::NoClasses);
        }
        let n: usize = classes.iter().map(|c| c.len()).sum();
        let mut class_of = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(classes.len());
        for (ci, members) in classes.into_iter().enumerate() {
            if members.is_empty() {
                return Err(InstanceError::EmptyClass(ci));
            }
            let mut members = members;
            members.sort_unstable();
            for &a in &members {
                if a >= n {
                    return Err(InstanceError::NonDenseAgents {
                        expected: n,
                        missing: class_of.iter().position(|&c| c == usize::MAX).unwrap_or(a),
                    });
                }
                if class_of[a] != usize::MAX {
                    return Err(InstanceError::DuplicateAgent(a));
                }
                class_of[a] = ci;
            }
            sorted.push(members);
        }
        if let Some(missing) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(InstanceError::NonDenseAgents { expected: n, missing });
        }
        Ok(OfflineSide { classes: sorted, class_of })
    }

    pub fn n_agents(&self) -> usize {
        self.class_of.len()
    }

    /// Number of classes `k`.
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, agent: usize) -> usize {
        self.class_of[agent]
    }

    pub fn class_members(&self, class: usize) -> &[usize] {
        &self.classes[class]
    }
}

/// A full instance: offline side plus arrival-ordered items and edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    offline: OfflineSide,
    n_items: usize,
    edges: BTreeSet<(usize, usize)>,
    item_neighbors: Vec<Vec<usize>>,
    agent_items: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds and validates an instance from raw parts.
    pub fn new(
        classes: Vec<Vec<usize>>,
        n_items: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        Self::from_offline(OfflineSide::new(classes)?, n_items, edges)
    }

    /// Builds an instance around an already validated offline side.
    pub fn from_offline(
        offline: OfflineSide,
        n_items: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, InstanceError> {
        let n = offline.n_agents();
        let mut set = BTreeSet::new();
        for (a, o) in edges {
            if a >= n {
                return Err(InstanceError::EdgeAgentOutOfRange { agent: a, item: o });
            }
            if o >= n_items {
                return Err(InstanceError::EdgeItemOutOfRange { agent: a, item: o });
            }
            set.insert((a, o));
        }
        let mut item_neighbors = vec![Vec::new(); n_items];
        let mut agent_items = vec![Vec::new(); n];
        for &(a, o) in &set {
            item_neighbors[o].push(a);
            agent_items[a].push(o);
        }
        for v in &mut item_neighbors {
            v.sort_unstable();
        }
        // agent_items is already sorted because the BTreeSet iterates (a, o)
        // in lexicographic order.
        Ok(Instance { offline, n_items, edges: set, item_neighbors, agent_items })
    }

    pub fn offline(&self) -> &OfflineSide {
        &self.offline
    }

    pub fn n_agents(&self) -> usize {
        self.offline.n_agents()
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn k(&self) -> usize {
        self.offline.k()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        self.offline.classes()
    }

    pub fn class_of(&self, agent: usize) -> usize {
        self.offline.class_of(agent)
    }

    pub fn class_members(&self, class: usize) -> &[usize] {
        self.offline.class_members(class)
    }

    pub fn has_edge(&self, agent: usize, item: usize) -> bool {
        self.edges.contains(&(agent, item))
    }

    /// Agents liking `item`, sorted ascending.
    pub fn item_neighbors(&self, item: usize) -> &[usize] {
        &self.item_neighbors[item]
    }

    /// Items liked by `agent`, sorted ascending (arrival order).
    pub fn agent_items(&self, agent: usize) -> &[usize] {
        &self.agent_items[agent]
    }

    /// Agents of `class` liking `item`, sorted ascending.
    pub fn neighbors_in_class(&self, item: usize, class: usize) -> Vec<usize> {
        self.item_neighbors[item]
            .iter()
            .copied()
            .filter(|&a| self.class_of(a) == class)
            .collect()
    }

    /// All edges, lexicographically sorted by `(agent, item)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_and_indexes() {
        // Two classes {0,1,2} / {3,4,5}; three paired items plus a repeat of
        // the first pair.
        let inst = Instance::new(
            vec![vec![0, 1, 2], vec![3, 4, 5]],
            4,
            [(0, 0), (3, 0), (1, 1), (4, 1), (2, 2), (5, 2), (0, 3), (3, 3)],
        )
        .unwrap();
        assert_eq!(inst.n_agents(), 6);
        assert_eq!(inst.n_items(), 4);
        assert_eq!(inst.k(), 2);
        assert_eq!(inst.item_neighbors(0), &[0, 3]);
        assert_eq!(inst.item_neighbors(3), &[0, 3]);
        assert_eq!(inst.agent_items(0), &[0, 3]);
        assert_eq!(inst.neighbors_in_class(1, 0), vec![1]);
        assert_eq!(inst.neighbors_in_class(1, 1), vec![4]);
        assert!(inst.has_edge(2, 2));
        assert!(!inst.has_edge(2, 0));
        assert_eq!(inst.class_of(4), 1);
    }

    #[test]
    fn rejects_malformed_partitions() {
        assert_eq!(Instance::new(vec![], 0, []).unwrap_err(), InstanceError::NoClasses);
        assert_eq!(
            Instance::new(vec![vec![0], vec![]], 0, []).unwrap_err(),
            InstanceError::EmptyClass(1)
        );
        assert_eq!(
            Instance::new(vec![vec![0, 1], vec![1]], 0, []).unwrap_err(),
            InstanceError::DuplicateAgent(1)
        );
        assert!(matches!(
            Instance::new(vec![vec![0, 2]], 0, []).unwrap_err(),
            InstanceError::NonDenseAgents { .. }
        ));
    }

    #[test]
    fn rejects_out_of_range_edges() {
        assert_eq!(
            Instance::new(vec![vec![0]], 1, [(1, 0)]).unwrap_err(),
            InstanceError::EdgeAgentOutOfRange { agent: 1, item: 0 }
        );
        assert_eq!(
            Instance::new(vec![vec![0]], 1, [(0, 1)]).unwrap_err(),
            InstanceError::EdgeItemOutOfRange { agent: 0, item: 1 }
        );
    }

    #[test]
    fn duplicate_edges_collapse() {
        let inst = Instance::new(vec![vec![0]], 1, [(0, 0), (0, 0)]).unwrap();
        assert_eq!(inst.n_edges(), 1);
    }
}
