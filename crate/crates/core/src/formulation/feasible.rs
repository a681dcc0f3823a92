//! Exhaustive binary-feasibility oracle for the radiality families.
//!
//! Each family is decided combinatorially instead of by an LP:
//!
//! - cardinality: closed count at most `|N| - |N_s|`;
//! - parent-child: always satisfiable by orienting closed branches freely;
//! - spanning tree: an orientation exists giving every demand bus exactly
//!   one parent, zero-demand buses at most one and substations none. This is
//!   a bipartite matching of closed branches onto their heads that saturates
//!   both the branches and the demand buses; by the Mendelsohn-Dulmage
//!   theorem it exists iff each side can be saturated on its own;
//! - single and multi commodity flow: every demand bus reachable from a
//!   substation over closed branches.
//!
//! Every configuration must additionally deliver power to each demand bus,
//! which is what the nodal balances of the core model impose once the flows
//! are projected out. For flow families this coincides with the reachability
//! test above. When spanning-tree rows are present, a powered component has
//! exactly one substation and is a tree, so its orientation is forced away
//! from the substation and the flow families add nothing further.

use std::collections::BTreeSet;

use super::{FormulationError, FormulationKind};
use crate::netmodel::{classify_buses, BusClass, Network};
use crate::topology::Configuration;
use crate::unionfind::UnionFind;

pub const MAX_FEASIBLE_SCAN_BRANCHES: usize = 16;

pub fn binary_feasible_set(net: &Network, kind: FormulationKind) -> Result<BTreeSet<Configuration>, FormulationError> {
    let nb = net.n_branches();
    if nb > MAX_FEASIBLE_SCAN_BRANCHES {
        return Err(FormulationError::TooLarge {
            max: MAX_FEASIBLE_SCAN_BRANCHES,
            got: nb,
        });
    }
    let class = classify_buses(net).class_of(net.n_buses());
    let mut out = BTreeSet::new();
    for mask in 0u32..(1u32 << nb) {
        let cfg = Configuration::new((0..nb).map(|k| mask >> k & 1 == 1).collect());
        if !cfg.respects_fixed_switches(net) {
            continue;
        }
        if kind.has_cardinality() && cfg.closed_count() > net.radial_branch_count() {
            continue;
        }
        if kind.has_spanning_tree() && !orientable(net, &cfg, &class) {
            continue;
        }
        if !delivers(net, &cfg, &class) {
            continue;
        }
        out.insert(cfg);
    }
    Ok(out)
}

fn delivers(net: &Network, cfg: &Configuration, class: &[BusClass]) -> bool {
    let mut uf = UnionFind::new(net.n_buses());
    let subs = net.substations();
    for w in subs.windows(2) {
        uf.union(w[0], w[1]);
    }
    for k in cfg.closed_indices() {
        let (a, b) = net.endpoints(k);
        uf.union(a, b);
    }
    let root = uf.find(subs[0]);
    (0..net.n_buses()).all(|i| class[i] != BusClass::Demand || uf.find(i) == root)
}

/// Kuhn augmenting path: `adj[l]` lists right vertices usable by left `l`.
fn max_matching(adj: &[Vec<usize>], n_right: usize) -> usize {
    fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &r in &adj[l] {
            if seen[r] {
                continue;
            }
            seen[r] = true;
            if owner[r].map_or(true, |o| augment(o, adj, seen, owner)) {
                owner[r] = Some(l);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; n_right];
    let mut size = 0;
    for l in 0..adj.len() {
        let mut seen = vec![false; n_right];
        if augment(l, adj, &mut seen, &mut owner) {
            size += 1;
        }
    }
    size
}

fn orientable(net: &Network, cfg: &Configuration, class: &[BusClass]) -> bool {
    let closed = cfg.closed_indices();
    // every closed branch gets a non-substation head
    let branch_side: Vec<Vec<usize>> = closed
        .iter()
        .map(|&k| {
            let (a, b) = net.endpoints(k);
            [a, b]
                .into_iter()
                .filter(|&v| class[v] != BusClass::Substation)
                .collect()
        })
        .collect();
    if max_matching(&branch_side, net.n_buses()) < closed.len() {
        return false;
    }
    // every demand bus gets a parent branch
    let demand: Vec<usize> = (0..net.n_buses()).filter(|&i| class[i] == BusClass::Demand).collect();
    let bus_side: Vec<Vec<usize>> = demand
        .iter()
        .map(|&i| {
            (0..closed.len())
                .filter(|&c| {
                    let (a, b) = net.endpoints(closed[c]);
                    a == i || b == i
                })
                .collect()
        })
        .collect();
    max_matching(&bus_side, closed.len()) == demand.len()
}
