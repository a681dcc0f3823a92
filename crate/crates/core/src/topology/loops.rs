use std::collections::VecDeque;

use super::TopologyError;
use crate::netmodel::Network;

/// One cycle per non-tree branch of a breadth-first forest grown from the
/// substations of the all-closed graph. Each cycle lists branch positions in
/// ascending order. A branch joining two different substation trees yields a
/// loop through both substations.
pub fn fundamental_loops(net: &Network) -> Result<Vec<Vec<usize>>, TopologyError> {
    let n = net.n_buses();
    let inc = net.incidence();
    let mut parent_branch: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut depth = vec![0usize; n];
    let mut tree_branch = vec![false; net.n_branches()];
    let mut queue = VecDeque::new();
    for s in net.substations() {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &k in &inc[v] {
            let (a, b) = net.endpoints(k);
            let w = if a == v { b } else { a };
            if !seen[w] {
                seen[w] = true;
                parent_branch[w] = Some(k);
                depth[w] = depth[v] + 1;
                tree_branch[k] = true;
                queue.push_back(w);
            }
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Err(TopologyError::Disconnected { bus: net.bus(v).id });
    }

    let step = |v: usize| -> (usize, usize) {
        let k = parent_branch[v].expect("non-root has a parent");
        let (a, b) = net.endpoints(k);
        (k, if a == v { b } else { a })
    };

    let mut loops = Vec::new();
    for k in 0..net.n_branches() {
        if tree_branch[k] {
            continue;
        }
        let (mut u, mut w) = net.endpoints(k);
        let mut cycle = vec![k];
        while u != w {
            if depth[u] >= depth[w] && parent_branch[u].is_some() {
                let (e, up) = step(u);
                cycle.push(e);
                u = up;
            } else if parent_branch[w].is_some() {
                let (e, up) = step(w);
                cycle.push(e);
                w = up;
            } else if parent_branch[u].is_some() {
                let (e, up) = step(u);
                cycle.push(e);
                u = up;
            } else {
                // both at (different) substation roots
                break;
            }
        }
        cycle.sort_unstable();
        loops.push(cycle);
    }
    Ok(loops)
}
