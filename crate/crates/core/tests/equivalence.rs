mod common;

use std::collections::BTreeSet;

use common::graph;
use radkit::formulation::{binary_feasible_set, FormulationKind};
use radkit::netmodel::Network;
use radkit::topology::{is_radial, Configuration};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_radial(net: &Network) -> BTreeSet<Configuration> {
    let nb = net.n_branches();
    (0u32..1 << nb)
        .map(|mask| Configuration::new((0..nb).map(|k| mask >> k & 1 == 1).collect()))
        .filter(|cfg| is_radial(net, cfg).unwrap())
        .collect()
}

/// Connected graph: random tree plus random chords, at most 14 edges.
fn random_connected(rng: &mut ChaCha8Rng) -> Network {
    let n = rng.gen_range(2..=8);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect();
    let chords = rng.gen_range(0..=14 - edges.len());
    for _ in 0..chords * 3 {
        if edges.len() >= 14 || edges.len() >= n * (n - 1) / 2 {
            break;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && !edges.iter().any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)) {
            edges.push((a, b));
        }
    }
    let subs: Vec<usize> = if n > 3 && rng.gen_bool(0.25) {
        vec![0, n - 1]
    } else {
        vec![0]
    };
    graph(n, &subs, &edges)
}

#[test]
fn every_family_equals_the_spanning_forests_when_all_buses_load() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let net = random_connected(&mut rng);
        assert!(net.n_branches() <= 14);
        let forests = all_radial(&net);
        assert!(!forests.is_empty());
        for kind in FormulationKind::ALL {
            let set = binary_feasible_set(&net, kind).unwrap();
            assert_eq!(set, forests, "case {case}, {kind}, {} branches", net.n_branches());
        }
    }
}

/// Buses 3 to 5 carry no load and form a triangle hanging off bus 2.
fn zero_demand_triangle() -> Network {
    let g = graph(5, &[0], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 2)]);
    let buses = g
        .buses()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut b = b.clone();
            if i >= 2 {
                b.p_demand = 0.0;
                b.q_demand = 0.0;
            }
            b
        })
        .collect();
    Network::new(g.base_kv(), g.base_mva(), buses, g.branches().to_vec()).unwrap()
}

#[test]
fn base_admits_a_cycle_through_unloaded_buses() {
    let net = zero_demand_triangle();
    let forests = all_radial(&net);
    let base = binary_feasible_set(&net, FormulationKind::Base).unwrap();
    let cyclic: Vec<_> = base.difference(&forests).collect();
    assert!(!cyclic.is_empty());
    // feeder branch open, triangle closed: the loaded bus is still supplied
    let fed_cycle = Configuration::new(vec![true, false, true, true, true]);
    assert!(base.contains(&fed_cycle));
    assert!(!is_radial(&net, &fed_cycle).unwrap());
}

#[test]
fn spanning_tree_rows_never_admit_an_energized_cycle() {
    let net = zero_demand_triangle();
    for kind in [FormulationKind::ST, FormulationKind::ScfSt, FormulationKind::McfSt] {
        for cfg in binary_feasible_set(&net, kind).unwrap() {
            // every component holding a substation must be a tree
            let labels = radkit::topology::connected_components(&net, &cfg).unwrap();
            let fed: BTreeSet<usize> = net.substations().iter().map(|&s| labels[s]).collect();
            let buses = (0..net.n_buses()).filter(|&i| fed.contains(&labels[i])).count();
            let branches = cfg
                .closed_indices()
                .into_iter()
                .filter(|&k| fed.contains(&labels[net.endpoints(k).0]))
                .count();
            assert_eq!(branches, buses - fed.len(), "{kind} admits {:?}", cfg.open_indices());
        }
    }
}
