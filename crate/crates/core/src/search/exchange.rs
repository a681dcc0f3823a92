use std::collections::VecDeque;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{better, per_unit, SearchBudget, SearchError, SearchMode, SearchReport, TraceEntry};
use crate::netmodel::Network;
use crate::powerflow::evaluate_losses_with;
use crate::topology::{is_radial, Configuration};
use crate::unionfind::UnionFind;

/// Smallest loss reduction (kW) accepted as an improvement; guards against
/// cycling on rounding noise.
const MIN_GAIN_KW: f64 = 1e-9;

/// Branches on the cycle that closing `b` creates in the radial `cfg`. The
/// substations act as one virtual root, so a branch joining two feeders
/// yields the path between them through that root.
fn exchange_cycle(net: &Network, cfg: &Configuration, b: usize, inc: &[Vec<usize>]) -> Vec<usize> {
    let n = net.n_buses();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = net.substations().into();
    for &s in &queue {
        seen[s] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &k in &inc[v] {
            if !cfg.is_closed(k) {
                continue;
            }
            let (a, c) = net.endpoints(k);
            let w = if a == v { c } else { a };
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((k, v));
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let (mut u, mut w) = net.endpoints(b);
    let mut path = Vec::new();
    while u != w {
        let pu = parent[u];
        let pw = parent[w];
        match (pu, pw) {
            (Some((k, up)), _) if depth[u] >= depth[w] => {
                path.push(k);
                u = up;
            }
            (_, Some((k, up))) => {
                path.push(k);
                w = up;
            }
            (Some((k, up)), None) => {
                path.push(k);
                u = up;
            }
            (None, None) => break,
        }
    }
    path
}

struct Descent {
    cfg: Configuration,
    losses: f64,
    evaluated: u64,
    trace: Vec<TraceEntry>,
}

fn descend(net: &Network, start: Configuration, budget: &SearchBudget) -> Descent {
    let inc = net.incidence();
    let mut cur = start;
    let mut cur_loss = evaluate_losses_with(net, &cur, &budget.eval);
    let mut evaluated = 1u64;
    let mut trace = Vec::new();
    for _ in 0..budget.max_moves {
        let mut moves = Vec::new();
        for b in cur.open_indices() {
            if !net.branch(b).switchable {
                continue;
            }
            for c in exchange_cycle(net, &cur, b, &inc) {
                if net.branch(c).switchable {
                    moves.push((b, c));
                }
            }
        }
        let scored: Vec<(f64, Configuration, usize, usize)> = moves
            .par_iter()
            .map(|&(b, c)| {
                let mut cfg = cur.clone();
                cfg.set(b, true);
                cfg.set(c, false);
                debug_assert!(is_radial(net, &cfg).unwrap());
                (evaluate_losses_with(net, &cfg, &budget.eval), cfg, b, c)
            })
            .collect();
        evaluated += scored.len() as u64;
        let best = scored
            .into_iter()
            .reduce(|a, b| if better((b.0, &b.1), (a.0, &a.1)) { b } else { a });
        match best {
            Some((loss, cfg, b, c)) if loss < cur_loss - MIN_GAIN_KW => {
                cur = cfg;
                cur_loss = loss;
                trace.push(TraceEntry {
                    closed: b + 1,
                    opened: c + 1,
                    losses_kw: loss,
                });
            }
            _ => break,
        }
    }
    Descent {
        cfg: cur,
        losses: cur_loss,
        evaluated,
        trace,
    }
}

/// Steepest-descent branch exchange from a radial start.
pub fn local_search_branch_exchange(
    net: &Network,
    start: &Configuration,
    budget: &SearchBudget,
) -> Result<SearchReport, SearchError> {
    let t0 = Instant::now();
    let net = per_unit(net)?;
    if !is_radial(&net, start).unwrap_or(false) {
        return Err(SearchError::NotRadial);
    }
    let d = descend(&net, start.clone(), budget);
    Ok(SearchReport {
        best_cfg: d.cfg,
        best_losses_kw: d.losses,
        configurations_evaluated: d.evaluated,
        trees_enumerated: None,
        wall_time: t0.elapsed(),
        mode: SearchMode::LocalSearch,
        trace: d.trace,
    })
}

/// Minimum spanning forest under random weights, keeping non-switchable
/// branches in their dataset state. `None` if the network has no radial
/// configuration.
pub fn random_spanning_forest<R: Rng>(net: &Network, rng: &mut R) -> Option<Configuration> {
    let nb = net.n_branches();
    let mut keyed: Vec<(f64, usize)> = (0..nb)
        .map(|k| {
            let w: f64 = rng.gen();
            let br = net.branch(k);
            let key = match (br.switchable, br.initially_closed) {
                (true, _) => w,
                (false, true) => -1.0,
                (false, false) => f64::INFINITY,
            };
            (key, k)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut uf = UnionFind::new(net.n_buses());
    let subs = net.substations();
    for w in subs.windows(2) {
        uf.union(w[0], w[1]);
    }
    let mut cfg = Configuration::all_open(nb);
    for (key, k) in keyed {
        if key.is_infinite() {
            continue;
        }
        let (a, b) = net.endpoints(k);
        if uf.union(a, b) {
            cfg.set(k, true);
        }
    }
    is_radial(net, &cfg).ok()?.then_some(cfg)
}

/// Local search from `n_starts` random spanning forests drawn from a ChaCha
/// stream seeded with `seed`; reproducible for a given seed.
pub fn multistart(
    net: &Network,
    n_starts: usize,
    seed: u64,
    budget: &SearchBudget,
) -> Result<SearchReport, SearchError> {
    if n_starts == 0 {
        return Err(SearchError::NoStarts);
    }
    let t0 = Instant::now();
    let net = per_unit(net)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Configuration> = (0..n_starts)
        .map(|_| random_spanning_forest(&net, &mut rng).ok_or(SearchError::NoRadialConfiguration))
        .collect::<Result<_, _>>()?;
    let runs: Vec<Descent> = starts.into_par_iter().map(|s| descend(&net, s, budget)).collect();
    let evaluated = runs.iter().map(|d| d.evaluated).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| {
            if better((b.losses, &b.cfg), (a.losses, &a.cfg)) {
                b
            } else {
                a
            }
        })
        .expect("at least one start");
    Ok(SearchReport {
        best_cfg: best.cfg,
        best_losses_kw: best.losses,
        configurations_evaluated: evaluated,
        trees_enumerated: None,
        wall_time: t0.elapsed(),
        mode: SearchMode::LocalSearch,
        trace: best.trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::test_graph;
    use proptest::prelude::*;

    fn random_graph(n: usize, extra: &[(usize, usize)], subs: &[usize]) -> Network {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        for &(a, b) in extra {
            let (a, b) = (a % n, b % n);
            if a != b && !edges.iter().any(|&(x, y)| (x, y) == (a, b) || (y, x) == (a, b)) {
                edges.push((a, b));
            }
        }
        test_graph(n, subs, &edges)
    }

    proptest! {
        #[test]
        fn every_exchange_preserves_radiality(
            n in 3usize..9,
            extra in proptest::collection::vec((0usize..9, 0usize..9), 0..8),
            two_subs in any::<bool>(),
            seed in any::<u64>(),
        ) {
            let subs: Vec<usize> = if two_subs { vec![0, n - 1] } else { vec![0] };
            let net = random_graph(n, &extra, &subs);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Some(cfg) = random_spanning_forest(&net, &mut rng) else { return Ok(()) };
            let inc = net.incidence();
            for b in cfg.open_indices() {
                let cycle = exchange_cycle(&net, &cfg, b, &inc);
                // only a branch between two substations has no exchange partner
                let (u, w) = net.endpoints(b);
                let tie = net.bus(u).is_substation && net.bus(w).is_substation;
                prop_assert_eq!(cycle.is_empty(), tie);
                for c in cycle {
                    let mut next = cfg.clone();
                    next.set(b, true);
                    next.set(c, false);
                    prop_assert!(is_radial(&net, &next).unwrap());
                }
            }
        }
    }

    #[test]
    fn zero_starts_is_an_error() {
        let net = test_graph(3, &[0], &[(0, 1), (1, 2), (2, 0)]);
        assert_eq!(
            multistart(&net, 0, 1, &SearchBudget::default()).unwrap_err(),
            SearchError::NoStarts
        );
    }
}
