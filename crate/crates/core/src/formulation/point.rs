use std::collections::VecDeque;

use super::distflow::{branch_tag, bus_tag};
use super::{FormulationError, ModelIR};
use crate::netmodel::{classify_buses, BusClass, Network};
use crate::topology::{is_radial, Configuration};

/// Electrical state of a radial configuration in model units: per-bus
/// squared voltages and per-branch `P`, `Q`, `Isqr` (zero on open branches).
#[derive(Debug, Clone, PartialEq)]
pub struct CoreFlows {
    pub v_sqr: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub i_sqr: Vec<f64>,
}

/// Lifts a radial operating point to a full assignment of `model`,
/// including whatever auxiliary radiality variables it carries. Variables
/// the model lacks are skipped, so this works for every formulation.
pub fn radial_point(
    model: &ModelIR,
    net: &Network,
    cfg: &Configuration,
    flows: &CoreFlows,
) -> Result<Vec<f64>, FormulationError> {
    if !is_radial(net, cfg).unwrap_or(false) {
        return Err(FormulationError::NotRadial);
    }
    let mut x = vec![0.0; model.variables().len()];
    let mut set = |name: String, v: f64| {
        if let Some(i) = model.var_index(&name) {
            x[i] = v;
        }
    };
    let n = net.n_buses();
    let nb = net.n_branches();

    for i in 0..n {
        set(format!("Vsqr{}", bus_tag(net, i)), flows.v_sqr[i]);
    }
    let mut ps = vec![0.0; n];
    let mut qs = vec![0.0; n];
    for (i, bus) in net.buses().iter().enumerate() {
        ps[i] += bus.p_demand;
        qs[i] += bus.q_demand;
    }
    for (k, br) in net.branches().iter().enumerate() {
        let (i, j) = net.endpoints(k);
        let tag = branch_tag(net, k);
        let closed = cfg.is_closed(k);
        let (p, q, l) = if closed {
            (flows.p[k], flows.q[k], flows.i_sqr[k])
        } else {
            (0.0, 0.0, 0.0)
        };
        ps[i] += p + br.r * l;
        qs[i] += q + br.x * l;
        ps[j] -= p;
        qs[j] -= q;
        set(format!("y{tag}"), if closed { 1.0 } else { 0.0 });
        set(format!("P{tag}"), p);
        set(format!("Q{tag}"), q);
        set(format!("Isqr{tag}"), l);
        let dv = if closed { 0.0 } else { flows.v_sqr[i] - flows.v_sqr[j] };
        set(format!("dV{tag}"), dv);
    }
    for s in net.substations() {
        set(format!("PS{}", bus_tag(net, s)), ps[s]);
        set(format!("QS{}", bus_tag(net, s)), qs[s]);
    }

    // Orient the forest away from the substations.
    let inc = net.incidence();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
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
    let id = |i: usize| net.bus(i).id;
    let class = classify_buses(net).class_of(n);
    let mut below = vec![0usize; n];
    for &v in order.iter().rev() {
        if class[v] == BusClass::Demand {
            below[v] += 1;
        }
        if let Some((k, up)) = parent[v] {
            below[up] += below[v];
            set(format!("yD[{}->{}]", id(up), id(v)), 1.0);
            let (from, _) = net.endpoints(k);
            let sign = if from == up { 1.0 } else { -1.0 };
            set(format!("f{}", branch_tag(net, k)), sign * below[v] as f64);
        }
    }
    for dest in 0..n {
        if class[dest] != BusClass::Demand {
            continue;
        }
        let mut v = dest;
        while let Some((_, up)) = parent[v] {
            set(format!("fk[{}][{}->{}]", id(dest), id(up), id(v)), 1.0);
            v = up;
        }
    }
    debug_assert_eq!(nb, cfg.len());
    Ok(x)
}
