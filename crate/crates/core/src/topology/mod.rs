//! Graph algorithms over a network and a switch configuration.
//!
//! Radiality here means a spanning forest with exactly one substation per
//! tree, which is the single-substation tree in the common case.

mod count;
mod loops;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netmodel::Network;
use crate::unionfind::UnionFind;

pub use count::{count_spanning_forests, count_spanning_trees};
pub use loops::fundamental_loops;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("configuration has {got} entries but the network has {expected} branches")]
    LengthMismatch { expected: usize, got: usize },
    #[error("bus {bus} is not connected to a substation with all branches closed")]
    Disconnected { bus: i64 },
}

/// Switch state per branch, indexed like `Network::branches`.
///
/// Ordering is lexicographic with open < closed; search uses it as the
/// tie-break between equal-loss configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    closed: Vec<bool>,
}

impl Configuration {
    pub fn new(closed: Vec<bool>) -> Self {
        Self { closed }
    }

    pub fn all_closed(n: usize) -> Self {
        Self::new(vec![true; n])
    }

    pub fn all_open(n: usize) -> Self {
        Self::new(vec![false; n])
    }

    /// The switch states listed in the dataset.
    pub fn initial(net: &Network) -> Self {
        Self::new(net.branches().iter().map(|b| b.initially_closed).collect())
    }

    /// All branches closed except the given positions.
    pub fn with_open(n: usize, open: &[usize]) -> Self {
        let mut closed = vec![true; n];
        for &k in open {
            closed[k] = false;
        }
        Self::new(closed)
    }

    pub fn from_closed_indices(n: usize, closed_idx: &[usize]) -> Self {
        let mut closed = vec![false; n];
        for &k in closed_idx {
            closed[k] = true;
        }
        Self::new(closed)
    }

    pub fn len(&self) -> usize {
        self.closed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closed.is_empty()
    }

    pub fn is_closed(&self, k: usize) -> bool {
        self.closed[k]
    }

    pub fn set(&mut self, k: usize, closed: bool) {
        self.closed[k] = closed;
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.closed
    }

    pub fn closed_count(&self) -> usize {
        self.closed.iter().filter(|&&c| c).count()
    }

    pub fn closed_indices(&self) -> Vec<usize> {
        (0..self.closed.len()).filter(|&k| self.closed[k]).collect()
    }

    pub fn open_indices(&self) -> Vec<usize> {
        (0..self.closed.len()).filter(|&k| !self.closed[k]).collect()
    }

    /// Whether every non-switchable branch keeps its dataset state.
    pub fn respects_fixed_switches(&self, net: &Network) -> bool {
        net.branches()
            .iter()
            .zip(&self.closed)
            .all(|(b, &c)| b.switchable || b.initially_closed == c)
    }
}

fn check_len(net: &Network, cfg: &Configuration) -> Result<(), TopologyError> {
    if cfg.len() != net.n_branches() {
        return Err(TopologyError::LengthMismatch {
            expected: net.n_branches(),
            got: cfg.len(),
        });
    }
    Ok(())
}

/// The three independent conditions that together define radiality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RadialityClauses {
    /// closed count equals |N| - |N_s|
    pub branch_count: bool,
    /// number of connected components equals |N_s|
    pub component_count: bool,
    /// every component holds exactly one substation
    pub one_substation_each: bool,
}

impl RadialityClauses {
    pub fn all(&self) -> bool {
        self.branch_count && self.component_count && self.one_substation_each
    }
}

pub fn radiality_clauses(net: &Network, cfg: &Configuration) -> Result<RadialityClauses, TopologyError> {
    check_len(net, cfg)?;
    let labels = component_labels(net, cfg);
    let n_comp = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut subs_per = vec![0usize; n_comp];
    for s in net.substations() {
        subs_per[labels[s]] += 1;
    }
    Ok(RadialityClauses {
        branch_count: cfg.closed_count() == net.radial_branch_count(),
        component_count: n_comp == net.n_substations(),
        one_substation_each: subs_per.iter().all(|&c| c == 1),
    })
}

/// True iff the closed branches form a spanning forest with one substation
/// per tree.
pub fn is_radial(net: &Network, cfg: &Configuration) -> Result<bool, TopologyError> {
    check_len(net, cfg)?;
    if cfg.closed_count() != net.radial_branch_count() {
        return Ok(false);
    }
    let mut uf = UnionFind::new(net.n_buses());
    let subs = net.substations();
    for w in subs.windows(2) {
        uf.union(w[0], w[1]);
    }
    // With substations pre-joined, a forest of the required size is exactly a
    // spanning tree of the contracted graph: any rejected union is a cycle or
    // a second path between substations.
    for k in cfg.closed_indices() {
        let (a, b) = net.endpoints(k);
        if !uf.union(a, b) {
            return Ok(false);
        }
    }
    Ok(uf.sets() == 1)
}

fn component_labels(net: &Network, cfg: &Configuration) -> Vec<usize> {
    let mut uf = UnionFind::new(net.n_buses());
    for k in cfg.closed_indices() {
        let (a, b) = net.endpoints(k);
        uf.union(a, b);
    }
    let mut label_of_root = vec![usize::MAX; net.n_buses()];
    let mut next = 0;
    (0..net.n_buses())
        .map(|v| {
            let r = uf.find(v);
            if label_of_root[r] == usize::MAX {
                label_of_root[r] = next;
                next += 1;
            }
            label_of_root[r]
        })
        .collect()
}

/// Component label per bus under the closed branches; labels are numbered by
/// first appearance in bus order.
pub fn connected_components(net: &Network, cfg: &Configuration) -> Result<Vec<usize>, TopologyError> {
    check_len(net, cfg)?;
    Ok(component_labels(net, cfg))
}

#[cfg(test)]
pub(crate) use tests::graph as test_graph;
