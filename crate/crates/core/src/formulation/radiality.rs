use std::collections::BTreeMap;

use serde::Serialize;

use super::distflow::{branch_tag, bus_tag};
use super::{fingerprint, FormulationError, FormulationKind, ModelIR, Sense, VarKind};
use crate::netmodel::{classify_buses, BusClass, Network};

/// A directed copy of a branch, in bus indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub branch: usize,
    pub tail: usize,
    pub head: usize,
}

/// Directed arcs used by a formulation. Arc `2k` runs along the dataset
/// orientation of branch `k`, arc `2k + 1` against it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcMap {
    pub arcs: Vec<Arc>,
    /// One `yD[i->j] + yD[j->i] = y[i,j]` row per branch when directed.
    pub linking_rows: usize,
}

impl ArcMap {
    pub fn n_directed_binaries(&self) -> usize {
        self.arcs.len()
    }
}

fn all_arcs(net: &Network) -> Vec<Arc> {
    (0..net.n_branches())
        .flat_map(|k| {
            let (a, b) = net.endpoints(k);
            [
                Arc {
                    branch: k,
                    tail: a,
                    head: b,
                },
                Arc {
                    branch: k,
                    tail: b,
                    head: a,
                },
            ]
        })
        .collect()
}

pub fn directed_arc_map(net: &Network, kind: FormulationKind) -> ArcMap {
    if kind.is_directed() {
        ArcMap {
            arcs: all_arcs(net),
            linking_rows: net.n_branches(),
        }
    } else {
        ArcMap {
            arcs: Vec::new(),
            linking_rows: 0,
        }
    }
}

fn arc_tag(net: &Network, a: &Arc) -> String {
    format!("[{}->{}]", net.bus(a.tail).id, net.bus(a.head).id)
}

fn lookup(m: &ModelIR, name: String) -> Result<usize, FormulationError> {
    m.var_index(&name).ok_or(FormulationError::MissingVariable(name))
}

/// Sums duplicate variables and drops cancelled ones so every row lists each
/// variable at most once.
fn merged(terms: impl IntoIterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (v, c) in terms {
        *acc.entry(v).or_insert(0.0) += c;
    }
    acc.into_iter().filter(|&(_, c)| c != 0.0).collect()
}

/// Appends the radiality family `kind` to a model built by
/// `build_core_model` over the same network.
pub fn add_radiality(mut m: ModelIR, kind: FormulationKind, net: &Network) -> Result<ModelIR, FormulationError> {
    if m.fingerprint() != Some(fingerprint(net)) {
        return Err(FormulationError::FingerprintMismatch);
    }
    if let Some(existing) = m.radiality() {
        return Err(FormulationError::RadialityPresent(existing));
    }
    let part = classify_buses(net);
    let class = part.class_of(net.n_buses());
    let nb = net.n_branches();
    let y: Vec<usize> = (0..nb)
        .map(|k| lookup(&m, format!("y{}", branch_tag(net, k))))
        .collect::<Result<_, _>>()?;

    if kind.has_cardinality() {
        m.add_linear(
            "card",
            y.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Le,
            net.radial_branch_count() as f64,
        )?;
    }

    let arcs = directed_arc_map(net, kind).arcs;
    let mut yd = Vec::with_capacity(arcs.len());
    for a in &arcs {
        yd.push(m.add_var(format!("yD{}", arc_tag(net, a)), VarKind::Binary, 0.0, 1.0)?);
    }
    if kind.is_directed() {
        for k in 0..nb {
            m.add_linear(
                format!("link{}", branch_tag(net, k)),
                vec![(yd[2 * k], 1.0), (yd[2 * k + 1], 1.0), (y[k], -1.0)],
                Sense::Eq,
                0.0,
            )?;
        }
    }
    if kind.has_parent_child() {
        for k in 0..nb {
            m.add_linear(
                format!("pc{}", branch_tag(net, k)),
                vec![(yd[2 * k], 1.0), (yd[2 * k + 1], 1.0)],
                Sense::Le,
                1.0,
            )?;
        }
    }

    // in_arcs[j]: arcs whose head is bus j
    let mut in_arcs = vec![Vec::new(); net.n_buses()];
    let mut out_arcs = vec![Vec::new(); net.n_buses()];
    for (a, arc) in arcs.iter().enumerate() {
        in_arcs[arc.head].push(a);
        out_arcs[arc.tail].push(a);
    }

    if kind.has_spanning_tree() {
        for j in 0..net.n_buses() {
            if in_arcs[j].is_empty() {
                continue;
            }
            let (sense, rhs) = match class[j] {
                BusClass::Demand => (Sense::Eq, 1.0),
                BusClass::ZeroDemand => (Sense::Le, 1.0),
                BusClass::Substation => (Sense::Eq, 0.0),
            };
            m.add_linear(
                format!("st{}", bus_tag(net, j)),
                in_arcs[j].iter().map(|&a| (yd[a], 1.0)).collect(),
                sense,
                rhs,
            )?;
        }
    }

    if kind.has_single_commodity() {
        let big_m = net.radial_branch_count() as f64;
        let f: Vec<usize> = (0..nb)
            .map(|k| m.add_var(format!("f{}", branch_tag(net, k)), VarKind::Continuous, -big_m, big_m))
            .collect::<Result<_, _>>()?;
        let inc = net.incidence();
        for i in 0..net.n_buses() {
            let rhs = match class[i] {
                BusClass::Substation => continue,
                BusClass::Demand => 1.0,
                BusClass::ZeroDemand => 0.0,
            };
            let terms = merged(inc[i].iter().map(|&k| {
                let (from, _) = net.endpoints(k);
                (f[k], if from == i { -1.0 } else { 1.0 })
            }));
            if terms.is_empty() {
                continue;
            }
            m.add_linear(format!("scf{}", bus_tag(net, i)), terms, Sense::Eq, rhs)?;
        }
        for k in 0..nb {
            let tag = branch_tag(net, k);
            // With directed binaries from ST the flow follows the chosen
            // orientation; otherwise it is signed and gated by y.
            let (fwd, bwd) = if kind.has_spanning_tree() {
                (yd[2 * k], yd[2 * k + 1])
            } else {
                (y[k], y[k])
            };
            m.add_linear(format!("scf_hi{tag}"), vec![(f[k], 1.0), (fwd, -big_m)], Sense::Le, 0.0)?;
            m.add_linear(
                format!("scf_lo{tag}"),
                vec![(f[k], -1.0), (bwd, -big_m)],
                Sense::Le,
                0.0,
            )?;
        }
    }

    if kind.has_multi_commodity() {
        for &dest in &part.demand {
            let ktag = bus_tag(net, dest);
            let fk: Vec<usize> = arcs
                .iter()
                .map(|a| m.add_var(format!("fk{ktag}{}", arc_tag(net, a)), VarKind::Continuous, 0.0, 1.0))
                .collect::<Result<_, _>>()?;
            let net_inflow = |i: usize| {
                in_arcs[i]
                    .iter()
                    .map(|&a| (fk[a], 1.0))
                    .chain(out_arcs[i].iter().map(|&a| (fk[a], -1.0)))
                    .collect::<Vec<_>>()
            };
            // Substations supply the commodity jointly.
            let src = merged(part.substations.iter().flat_map(|&s| net_inflow(s)));
            m.add_linear(format!("mcf_src{ktag}"), src, Sense::Eq, -1.0)?;
            m.add_linear(format!("mcf_dst{ktag}"), merged(net_inflow(dest)), Sense::Eq, 1.0)?;
            for i in 0..net.n_buses() {
                if i == dest || class[i] == BusClass::Substation {
                    continue;
                }
                let terms = merged(net_inflow(i));
                if terms.is_empty() {
                    continue;
                }
                m.add_linear(format!("mcf_mid{ktag}{}", bus_tag(net, i)), terms, Sense::Eq, 0.0)?;
            }
            for (a, arc) in arcs.iter().enumerate() {
                m.add_linear(
                    format!("mcf_cap{ktag}{}", arc_tag(net, arc)),
                    vec![(fk[a], 1.0), (yd[a], -1.0)],
                    Sense::Le,
                    0.0,
                )?;
            }
        }
    }

    m.set_radiality(kind);
    Ok(m)
}
