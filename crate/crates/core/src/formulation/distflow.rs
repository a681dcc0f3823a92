use super::{fingerprint, FormulationError, ModelIR, Sense, VarKind};
use crate::netmodel::{validate, Network, Severity, Units, SUBSTATION_VOLTAGE};

pub(crate) fn bus_tag(net: &Network, i: usize) -> String {
    format!("[{}]", net.bus(i).id)
}

pub(crate) fn branch_tag(net: &Network, k: usize) -> String {
    let b = net.branch(k);
    format!("[{},{}]", b.from_bus, b.to_bus)
}

/// Squared-voltage bounds used for `Vsqr`; substations are pinned.
pub(crate) fn vsqr_bounds(net: &Network, i: usize) -> (f64, f64) {
    let bus = net.bus(i);
    if bus.is_substation {
        let v = SUBSTATION_VOLTAGE * SUBSTATION_VOLTAGE;
        (v, v)
    } else {
        (bus.v_min * bus.v_min, bus.v_max * bus.v_max)
    }
}

/// Big-M of the open-branch voltage slack: the widest squared-voltage gap
/// any branch can see.
pub(crate) fn voltage_big_m(net: &Network) -> f64 {
    (0..net.n_branches())
        .map(|k| {
            let (i, j) = net.endpoints(k);
            let (li, ui) = vsqr_bounds(net, i);
            let (lj, uj) = vsqr_bounds(net, j);
            ui.max(uj) - li.min(lj)
        })
        .fold(0.0, f64::max)
}

/// Bound on any branch flow: twice the total absolute demand.
pub(crate) fn flow_big_m(net: &Network) -> f64 {
    let total: f64 = net.buses().iter().map(|b| b.p_demand.abs() + b.q_demand.abs()).sum();
    (2.0 * total).max(1.0)
}

/// DistFlow model with one switch binary per branch and no radiality rows.
pub fn build_core_model(net: &Network) -> Result<ModelIR, FormulationError> {
    let errors: Vec<_> = validate(net)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .collect();
    if !errors.is_empty() {
        return Err(FormulationError::Invalid(errors));
    }
    if net.units() != Units::PerUnit {
        return Err(FormulationError::NotPerUnit);
    }

    let mut m = ModelIR::new();
    m.set_fingerprint(fingerprint(net));
    let n = net.n_buses();
    let bv = voltage_big_m(net);
    let mflow = flow_big_m(net);

    let mut vsqr = Vec::with_capacity(n);
    for i in 0..n {
        let (lb, ub) = vsqr_bounds(net, i);
        vsqr.push(m.add_var(format!("Vsqr{}", bus_tag(net, i)), VarKind::Continuous, lb, ub)?);
    }
    let mut inj = vec![None; n];
    for s in net.substations() {
        let tag = bus_tag(net, s);
        let ps = m.add_var(
            format!("PS{tag}"),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        let qs = m.add_var(
            format!("QS{tag}"),
            VarKind::Continuous,
            f64::NEG_INFINITY,
            f64::INFINITY,
        )?;
        inj[s] = Some((ps, qs));
    }

    struct BranchVars {
        y: usize,
        p: usize,
        q: usize,
        isqr: usize,
        dv: usize,
    }
    let mut vars = Vec::with_capacity(net.n_branches());
    for (k, br) in net.branches().iter().enumerate() {
        let tag = branch_tag(net, k);
        let (ylb, yub) = if br.switchable {
            (0.0, 1.0)
        } else {
            let s = if br.initially_closed { 1.0 } else { 0.0 };
            (s, s)
        };
        vars.push(BranchVars {
            y: m.add_var(format!("y{tag}"), VarKind::Binary, ylb, yub)?,
            p: m.add_var(format!("P{tag}"), VarKind::Continuous, -mflow, mflow)?,
            q: m.add_var(format!("Q{tag}"), VarKind::Continuous, -mflow, mflow)?,
            isqr: m.add_var(format!("Isqr{tag}"), VarKind::Continuous, 0.0, br.i_max * br.i_max)?,
            dv: m.add_var(format!("dV{tag}"), VarKind::Continuous, -bv, bv)?,
        });
    }

    m.set_objective(net.branches().iter().zip(&vars).map(|(br, v)| (v.isqr, br.r)).collect())?;

    // Nodal balances: inflow at the receiving end, outflow plus losses at the
    // sending end.
    let inc = net.incidence();
    for reactive in [false, true] {
        for i in 0..n {
            let mut terms = Vec::new();
            if let Some((ps, qs)) = inj[i] {
                terms.push((if reactive { qs } else { ps }, 1.0));
            }
            for &k in &inc[i] {
                let br = net.branch(k);
                let v = &vars[k];
                let flow = if reactive { v.q } else { v.p };
                let (from, _) = net.endpoints(k);
                if from == i {
                    terms.push((flow, -1.0));
                    terms.push((v.isqr, -(if reactive { br.x } else { br.r })));
                } else {
                    terms.push((flow, 1.0));
                }
            }
            let bus = net.bus(i);
            let (name, rhs) = if reactive {
                ("bal_q", bus.q_demand)
            } else {
                ("bal_p", bus.p_demand)
            };
            m.add_linear(format!("{name}{}", bus_tag(net, i)), terms, Sense::Eq, rhs)?;
        }
    }

    for (k, br) in net.branches().iter().enumerate() {
        let tag = branch_tag(net, k);
        let (i, j) = net.endpoints(k);
        let v = &vars[k];
        m.add_linear(
            format!("vdrop{tag}"),
            vec![
                (vsqr[i], 1.0),
                (v.p, -2.0 * br.r),
                (v.q, -2.0 * br.x),
                (v.isqr, -br.z_sqr()),
                (vsqr[j], -1.0),
                (v.dv, -1.0),
            ],
            Sense::Eq,
            0.0,
        )?;
        m.add_linear(format!("dv_hi{tag}"), vec![(v.dv, 1.0), (v.y, bv)], Sense::Le, bv)?;
        m.add_linear(format!("dv_lo{tag}"), vec![(v.dv, -1.0), (v.y, bv)], Sense::Le, bv)?;
        m.add_linear(
            format!("amp{tag}"),
            vec![(v.isqr, 1.0), (v.y, -br.i_max * br.i_max)],
            Sense::Le,
            0.0,
        )?;
        m.add_cone(format!("cone{tag}"), vsqr[j], v.isqr, v.p, v.q)?;
    }
    Ok(m)
}
