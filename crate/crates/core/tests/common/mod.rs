//! Shared fixtures and an independent AC power-flow oracle.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use radkit::netmodel::{parse_network, to_per_unit, Branch, Bus, Network};
use radkit::search::random_spanning_forest;
use radkit::topology::Configuration;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> Network {
    let text = std::fs::read_to_string(data_path(name)).unwrap();
    parse_network(&text).unwrap()
}

pub fn load_pu(name: &str) -> Network {
    to_per_unit(&load(name)).unwrap()
}

/// Physical two-bus feeder: one load behind one switchable line.
pub fn two_bus() -> Network {
    let buses = vec![
        Bus {
            id: 1,
            p_demand: 0.0,
            q_demand: 0.0,
            v_min: 1.0,
            v_max: 1.0,
            is_substation: true,
        },
        Bus {
            id: 2,
            p_demand: 500.0,
            q_demand: 200.0,
            v_min: 0.9,
            v_max: 1.1,
            is_substation: false,
        },
    ];
    let branches = vec![Branch {
        from_bus: 1,
        to_bus: 2,
        r: 0.5,
        x: 0.3,
        i_max: 400.0,
        switchable: true,
        initially_closed: true,
    }];
    Network::new(12.66, 10.0, buses, branches).unwrap()
}

pub fn random_radial(net: &Network, n: usize, seed: u64) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_spanning_forest(net, &mut rng).unwrap()).collect()
}

pub struct AcSolution {
    pub v: Vec<Complex64>,
    pub losses_kw: f64,
    pub iterations: usize,
}

/// Full Newton-Raphson in polar coordinates on the bus admittance matrix.
/// Substations are slack buses at 1∠0, every other bus is PQ. Works only
/// from first principles, sharing nothing with the sweep.
pub fn newton(net: &Network, cfg: &Configuration) -> AcSolution {
    let n = net.n_buses();
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in cfg.closed_indices() {
        let (a, b) = net.endpoints(k);
        let br = net.branch(k);
        let ys = Complex64::new(1.0, 0.0) / Complex64::new(br.r, br.x);
        y[(a, a)] += ys;
        y[(b, b)] += ys;
        y[(a, b)] -= ys;
        y[(b, a)] -= ys;
    }
    let pq: Vec<usize> = (0..n).filter(|&i| !net.bus(i).is_substation).collect();
    let m = pq.len();
    let mut theta = vec![0.0; n];
    let mut vm = vec![1.0; n];
    let mut iterations = 0;
    for it in 0..50 {
        iterations = it;
        let v: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(vm[i], theta[i])).collect();
        let s: Vec<Complex64> = (0..n)
            .map(|i| v[i] * (0..n).map(|j| y[(i, j)] * v[j]).sum::<Complex64>().conj())
            .collect();
        let mut f = DVector::<f64>::zeros(2 * m);
        for (r, &i) in pq.iter().enumerate() {
            f[r] = s[i].re + net.bus(i).p_demand;
            f[m + r] = s[i].im + net.bus(i).q_demand;
        }
        if f.amax() < 1e-12 {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(2 * m, 2 * m);
        for (r, &i) in pq.iter().enumerate() {
            for (c, &k) in pq.iter().enumerate() {
                let (g, b) = (y[(i, k)].re, y[(i, k)].im);
                if i == k {
                    let (p, q) = (s[i].re, s[i].im);
                    jac[(r, c)] = -q - b * vm[i] * vm[i];
                    jac[(m + r, c)] = p - g * vm[i] * vm[i];
                    jac[(r, m + c)] = p / vm[i] + g * vm[i];
                    jac[(m + r, m + c)] = q / vm[i] - b * vm[i];
                } else {
                    let t = theta[i] - theta[k];
                    let (sn, cs) = t.sin_cos();
                    jac[(r, c)] = vm[i] * vm[k] * (g * sn - b * cs);
                    jac[(m + r, c)] = -vm[i] * vm[k] * (g * cs + b * sn);
                    jac[(r, m + c)] = vm[i] * (g * cs + b * sn);
                    jac[(m + r, m + c)] = vm[i] * (g * sn - b * cs);
                }
            }
        }
        let dx = jac.lu().solve(&(-f)).expect("nonsingular Jacobian");
        for (r, &i) in pq.iter().enumerate() {
            theta[i] += dx[r];
            vm[i] += dx[m + r];
        }
    }
    let v: Vec<Complex64> = (0..n).map(|i| Complex64::from_polar(vm[i], theta[i])).collect();
    let losses: f64 = cfg
        .closed_indices()
        .into_iter()
        .map(|k| {
            let (a, b) = net.endpoints(k);
            let br = net.branch(k);
            let i = (v[a] - v[b]) / Complex64::new(br.r, br.x);
            br.r * i.norm_sqr()
        })
        .sum();
    AcSolution {
        v,
        losses_kw: losses * net.base_mva() * 1000.0,
        iterations,
    }
}

/// Physical network on `n` buses with light uniform loads; buses listed in
/// `subs` are substations.
pub fn graph(n: usize, subs: &[usize], edges: &[(usize, usize)]) -> Network {
    let buses = (0..n)
        .map(|i| {
            let sub = subs.contains(&i);
            Bus {
                id: i as i64 + 1,
                p_demand: if sub { 0.0 } else { 50.0 },
                q_demand: if sub { 0.0 } else { 20.0 },
                v_min: if sub { 1.0 } else { 0.9 },
                v_max: if sub { 1.0 } else { 1.1 },
                is_substation: sub,
            }
        })
        .collect();
    let branches = edges
        .iter()
        .map(|&(a, b)| Branch {
            from_bus: a as i64 + 1,
            to_bus: b as i64 + 1,
            r: 0.2,
            x: 0.1,
            i_max: 400.0,
            switchable: true,
            initially_closed: true,
        })
        .collect();
    Network::new(12.66, 10.0, buses, branches).unwrap()
}

pub fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}
