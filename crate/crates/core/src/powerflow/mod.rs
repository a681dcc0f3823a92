//! Backward/forward sweep over a radial configuration.
//!
//! Flows follow the model convention: `p_flow[k]` is the value the branch's
//! `P` variable takes, i.e. the power arriving at the dataset `to` bus. When
//! power actually runs against the dataset orientation the value is the
//! negated sending-end flow, which keeps every model row satisfied.

use std::collections::VecDeque;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::formulation::CoreFlows;
use crate::netmodel::{BusId, Network, Units, SUBSTATION_VOLTAGE};
use crate::topology::{is_radial, Configuration, TopologyError};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100;
/// Squared voltage below which the sweep gives up.
pub const COLLAPSE_V_SQR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerFlowError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("configuration is not radial")]
    NotRadial,
    #[error("network must be in per-unit")]
    NotPerUnit,
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },
    #[error("voltage collapse at bus {bus} (v_sqr = {v_sqr:e})")]
    VoltageCollapse { bus: BusId, v_sqr: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Bound on the largest squared-voltage change between iterations.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Undervoltage,
    Overvoltage,
    Overcurrent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Element {
    Bus(BusId),
    /// Zero-based branch position.
    Branch(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub element: Element,
    pub kind: ViolationKind,
    /// Voltage or current magnitude in pu.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFlowResult {
    pub v_sqr: Vec<f64>,
    /// Per branch; zero on open branches.
    pub p_flow: Vec<f64>,
    pub q_flow: Vec<f64>,
    pub i_sqr: Vec<f64>,
    /// Substation injections per bus; zero elsewhere.
    pub p_injection: Vec<f64>,
    pub q_injection: Vec<f64>,
    pub losses_kw: f64,
    pub violations: Vec<Violation>,
    pub converged: bool,
    pub iterations: usize,
    /// Largest squared-voltage change at each iteration.
    pub steps: Vec<f64>,
    /// Largest residual of the nodal balances and voltage-drop equations.
    pub max_residual: f64,
}

impl PowerFlowResult {
    pub fn core_flows(&self) -> CoreFlows {
        CoreFlows {
            v_sqr: self.v_sqr.clone(),
            p: self.p_flow.clone(),
            q: self.q_flow.clone(),
            i_sqr: self.i_sqr.clone(),
        }
    }

    /// JSON document with `buses`, `branches`, `losses_kw`, `converged`
    /// and `iterations`.
    pub fn to_json(&self, net: &Network, cfg: &Configuration) -> serde_json::Value {
        let kw = net.base_mva() * 1000.0;
        let buses: Vec<_> = net
            .buses()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                json!({
                    "id": b.id,
                    "v_pu": self.v_sqr[i].sqrt(),
                    "v_sqr": self.v_sqr[i],
                    "p_injection": self.p_injection[i],
                    "q_injection": self.q_injection[i],
                })
            })
            .collect();
        let branches: Vec<_> = net
            .branches()
            .iter()
            .enumerate()
            .map(|(k, br)| {
                json!({
                    "index": k + 1,
                    "from": br.from_bus,
                    "to": br.to_bus,
                    "closed": cfg.is_closed(k),
                    "p": self.p_flow[k],
                    "q": self.q_flow[k],
                    "i_sqr": self.i_sqr[k],
                    "loss_kw": kw * br.r * self.i_sqr[k],
                })
            })
            .collect();
        json!({
            "buses": buses,
            "branches": branches,
            "losses_kw": self.losses_kw,
            "converged": self.converged,
            "iterations": self.iterations,
            "max_residual": self.max_residual,
            "violations": self.violations,
        })
    }
}

/// Tree of a radial configuration, rooted at the substations.
struct Tree {
    /// Buses in breadth-first order, roots first.
    order: Vec<usize>,
    /// `(branch, parent bus)` for every non-root bus.
    parent: Vec<Option<(usize, usize)>>,
}

fn build_tree(net: &Network, cfg: &Configuration) -> Tree {
    let n = net.n_buses();
    let inc = net.incidence();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<usize> = net.substations().into();
    for &s in &queue {
        seen[s] = true;
    }
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &k in &inc[v] {
            if !cfg.is_closed(k) {
                continue;
            }
            let (a, b) = net.endpoints(k);
            let w = if a == v { b } else { a };
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((k, v));
                queue.push_back(w);
            }
        }
    }
    Tree { order, parent }
}

pub fn solve_distflow(
    net: &Network,
    cfg: &Configuration,
    opts: &SweepOptions,
) -> Result<PowerFlowResult, PowerFlowError> {
    if net.units() != Units::PerUnit {
        return Err(PowerFlowError::NotPerUnit);
    }
    if !is_radial(net, cfg)? {
        return Err(PowerFlowError::NotRadial);
    }
    let n = net.n_buses();
    let nb = net.n_branches();
    let tree = build_tree(net, cfg);
    let root_v = SUBSTATION_VOLTAGE * SUBSTATION_VOLTAGE;

    let mut v = vec![root_v; n];
    // Receiving-end flows along the actual direction, indexed by child bus.
    let mut pr = vec![0.0; n];
    let mut qr = vec![0.0; n];
    let mut ell = vec![0.0; n];
    let mut steps = Vec::new();
    let mut converged = false;

    for _ in 0..opts.max_iter {
        for (i, b) in net.buses().iter().enumerate() {
            pr[i] = b.p_demand;
            qr[i] = b.q_demand;
        }
        for &w in tree.order.iter().rev() {
            if let Some((k, up)) = tree.parent[w] {
                let br = net.branch(k);
                if tree.parent[up].is_some() {
                    pr[up] += pr[w] + br.r * ell[w];
                    qr[up] += qr[w] + br.x * ell[w];
                }
            }
        }
        let mut step: f64 = 0.0;
        for &w in &tree.order {
            if let Some((k, up)) = tree.parent[w] {
                let br = net.branch(k);
                let nv = v[up] - 2.0 * (br.r * pr[w] + br.x * qr[w]) - br.z_sqr() * ell[w];
                if !(nv > COLLAPSE_V_SQR) {
                    return Err(PowerFlowError::VoltageCollapse {
                        bus: net.bus(w).id,
                        v_sqr: nv,
                    });
                }
                step = step.max((nv - v[w]).abs());
                v[w] = nv;
                ell[w] = (pr[w] * pr[w] + qr[w] * qr[w]) / nv;
            }
        }
        steps.push(step);
        if step <= opts.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(PowerFlowError::NotConverged {
            iterations: steps.len(),
            last_step: steps.last().copied().unwrap_or(f64::NAN),
        });
    }

    let mut p_flow = vec![0.0; nb];
    let mut q_flow = vec![0.0; nb];
    let mut i_sqr = vec![0.0; nb];
    let mut p_inj = vec![0.0; n];
    let mut q_inj = vec![0.0; n];
    for s in net.substations() {
        p_inj[s] = net.bus(s).p_demand;
        q_inj[s] = net.bus(s).q_demand;
    }
    for w in 0..n {
        let Some((k, up)) = tree.parent[w] else { continue };
        let br = net.branch(k);
        let (from, _) = net.endpoints(k);
        i_sqr[k] = ell[w];
        if from == up {
            p_flow[k] = pr[w];
            q_flow[k] = qr[w];
        } else {
            p_flow[k] = -(pr[w] + br.r * ell[w]);
            q_flow[k] = -(qr[w] + br.x * ell[w]);
        }
        if tree.parent[up].is_none() {
            p_inj[up] += pr[w] + br.r * ell[w];
            q_inj[up] += qr[w] + br.x * ell[w];
        }
    }
    let losses_pu: f64 = net.branches().iter().zip(&i_sqr).map(|(b, l)| b.r * l).sum();
    let mut res = PowerFlowResult {
        v_sqr: v,
        p_flow,
        q_flow,
        i_sqr,
        p_injection: p_inj,
        q_injection: q_inj,
        losses_kw: net.base_mva() * 1000.0 * losses_pu,
        violations: Vec::new(),
        converged,
        iterations: steps.len(),
        steps,
        max_residual: 0.0,
    };
    res.max_residual = residual(net, cfg, &res);
    res.violations = check_limits(net, &res);
    Ok(res)
}

/// Largest residual of the nodal balances and closed-branch voltage drops.
fn residual(net: &Network, cfg: &Configuration, r: &PowerFlowResult) -> f64 {
    let n = net.n_buses();
    let mut bp: Vec<f64> = (0..n).map(|i| r.p_injection[i] - net.bus(i).p_demand).collect();
    let mut bq: Vec<f64> = (0..n).map(|i| r.q_injection[i] - net.bus(i).q_demand).collect();
    let mut worst: f64 = 0.0;
    for (k, br) in net.branches().iter().enumerate() {
        let (i, j) = net.endpoints(k);
        bp[i] -= r.p_flow[k] + br.r * r.i_sqr[k];
        bq[i] -= r.q_flow[k] + br.x * r.i_sqr[k];
        bp[j] += r.p_flow[k];
        bq[j] += r.q_flow[k];
        if cfg.is_closed(k) {
            let drop =
                r.v_sqr[i] - 2.0 * (br.r * r.p_flow[k] + br.x * r.q_flow[k]) - br.z_sqr() * r.i_sqr[k] - r.v_sqr[j];
            worst = worst.max(drop.abs());
        }
    }
    bp.iter().chain(&bq).fold(worst, |w, x| w.max(x.abs()))
}

/// Buses outside their voltage band and branches above their ampacity.
pub fn check_limits(net: &Network, result: &PowerFlowResult) -> Vec<Violation> {
    const SLACK: f64 = 1e-9;
    let mut out = Vec::new();
    for (i, bus) in net.buses().iter().enumerate() {
        let vs = result.v_sqr[i];
        let kind = if vs < bus.v_min * bus.v_min - SLACK {
            ViolationKind::Undervoltage
        } else if vs > bus.v_max * bus.v_max + SLACK {
            ViolationKind::Overvoltage
        } else {
            continue;
        };
        out.push(Violation {
            element: Element::Bus(bus.id),
            kind,
            magnitude: vs.sqrt(),
        });
    }
    for (k, br) in net.branches().iter().enumerate() {
        if result.i_sqr[k] > br.i_max * br.i_max + SLACK {
            out.push(Violation {
                element: Element::Branch(k),
                kind: ViolationKind::Overcurrent,
                magnitude: result.i_sqr[k].sqrt(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EvalOptions {
    pub sweep: SweepOptions,
    /// Treat limit violations as infeasible.
    pub hard_limits: bool,
}

/// Losses in kW, or `f64::INFINITY` for non-radial, diverging or (in hard
/// mode) limit-violating configurations.
pub fn evaluate_losses(net: &Network, cfg: &Configuration) -> f64 {
    evaluate_losses_with(net, cfg, &EvalOptions::default())
}

pub fn evaluate_losses_with(net: &Network, cfg: &Configuration, opts: &EvalOptions) -> f64 {
    match solve_distflow(net, cfg, &opts.sweep) {
        Ok(r) if opts.hard_limits && !r.violations.is_empty() => f64::INFINITY,
        Ok(r) => r.losses_kw,
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::{Branch, Bus};

    fn two_bus(r: f64, x: f64, p: f64, q: f64) -> Network {
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
                p_demand: p,
                q_demand: q,
                v_min: 0.9,
                v_max: 1.1,
                is_substation: false,
            },
        ];
        let branches = vec![Branch {
            from_bus: 1,
            to_bus: 2,
            r,
            x,
            i_max: 10.0,
            switchable: true,
            initially_closed: true,
        }];
        Network::with_units(10.0, 1.0, buses, branches, Units::PerUnit).unwrap()
    }

    fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(lo) < 0.0) == (f(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn no_load_is_flat() {
        let net = two_bus(0.05, 0.02, 0.0, 0.0);
        let r = solve_distflow(&net, &Configuration::all_closed(1), &SweepOptions::default()).unwrap();
        assert_eq!(r.v_sqr, vec![1.0, 1.0]);
        assert_eq!(r.losses_kw, 0.0);
        assert_eq!(r.iterations, 1);
        assert!(check_limits(&net, &r).is_empty());
    }

    #[test]
    fn two_bus_matches_scalar_root() {
        let (rr, p) = (0.05, 0.2);
        let net = two_bus(rr, 0.0, p, 0.0);
        let res = solve_distflow(&net, &Configuration::all_closed(1), &SweepOptions::default()).unwrap();
        // v = 1 - 2 r P - r^2 P^2 / v with P the receiving-end demand
        let v = bisect(0.5, 1.0, |v| v - 1.0 + 2.0 * rr * p + rr * rr * p * p / v);
        assert!((res.v_sqr[1] - v).abs() < 1e-9, "{} vs {v}", res.v_sqr[1]);
        let ell = p * p / v;
        assert!((res.losses_kw - 1000.0 * rr * ell).abs() < 1e-6);
        // sending end carries load plus losses
        assert!((res.p_injection[0] - (p + rr * ell)).abs() < 1e-9);
    }

    #[test]
    fn undervoltage_and_overcurrent_are_flagged() {
        let mut p = 0.1;
        let r = loop {
            let net = two_bus(0.05, 0.05, p, 0.0);
            let r = solve_distflow(&net, &Configuration::all_closed(1), &SweepOptions::default()).unwrap();
            if r.v_sqr[1] < 0.81 {
                break (net, r);
            }
            p *= 1.25;
        };
        let v = check_limits(&r.0, &r.1);
        assert_eq!(v.len(), 1);
        assert_eq!(
            (v[0].element, v[0].kind),
            (Element::Bus(2), ViolationKind::Undervoltage)
        );

        let mut net = two_bus(0.05, 0.05, 0.2, 0.1);
        let mut br = net.branches().to_vec();
        br[0].i_max = 0.01;
        net = Network::with_units(10.0, 1.0, net.buses().to_vec(), br, Units::PerUnit).unwrap();
        let cfg = Configuration::all_closed(1);
        let r = solve_distflow(&net, &cfg, &SweepOptions::default()).unwrap();
        assert_eq!(r.violations[0].kind, ViolationKind::Overcurrent);
        assert!(evaluate_losses(&net, &cfg).is_finite());
        let hard = EvalOptions {
            hard_limits: true,
            ..EvalOptions::default()
        };
        assert_eq!(evaluate_losses_with(&net, &cfg, &hard), f64::INFINITY);
    }

    #[test]
    fn rejects_open_and_physical() {
        let net = two_bus(0.05, 0.0, 0.2, 0.0);
        assert_eq!(evaluate_losses(&net, &Configuration::all_open(1)), f64::INFINITY);
        assert!(matches!(
            solve_distflow(&net, &Configuration::all_open(1), &SweepOptions::default()),
            Err(PowerFlowError::NotRadial)
        ));
        let phys = crate::netmodel::to_physical(&net);
        assert!(matches!(
            solve_distflow(&phys, &Configuration::all_closed(1), &SweepOptions::default()),
            Err(PowerFlowError::NotPerUnit)
        ));
    }

    #[test]
    fn collapse_is_detected() {
        let net = two_bus(0.5, 0.5, 5.0, 5.0);
        let err = solve_distflow(&net, &Configuration::all_closed(1), &SweepOptions::default());
        assert!(matches!(
            err,
            Err(PowerFlowError::VoltageCollapse { .. }) | Err(PowerFlowError::NotConverged { .. })
        ));
    }
}
