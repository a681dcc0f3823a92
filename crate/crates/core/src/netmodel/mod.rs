//! Electrical network data model.
//!
//! A [`Network`] is built once (usually by [`parse_network`]) and never mutated
//! afterwards; unit conversion returns a new value. Buses and branches keep the
//! order in which the dataset lists them, and every other module indexes them
//! by that position.

mod branch_list;
mod parse;
mod perunit;
mod validate;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use branch_list::{parse_branch_list, BranchListOptions};
pub use parse::{parse_network, parse_network_with, serialize_network, ParseError, ParseOptions};
pub use perunit::{current_base_amps, impedance_base_ohms, to_per_unit, to_physical};
pub use validate::{validate, Diagnostic, Location, Severity};

/// Bus label as written in the dataset.
pub type BusId = i64;

/// Ampacity assumed when a dataset leaves it out, in per-unit.
pub const DEFAULT_IMAX_PU: f64 = 10.0;
/// Voltage limits assumed for load buses when a dataset leaves them out.
pub const DEFAULT_LOAD_VMIN: f64 = 0.93;
pub const DEFAULT_LOAD_VMAX: f64 = 1.05;
/// Substation voltage setpoint (pu).
pub const SUBSTATION_VOLTAGE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: BusId,
    /// Active demand: kW in physical units, pu after conversion.
    pub p_demand: f64,
    /// Reactive demand: kvar in physical units, pu after conversion.
    pub q_demand: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub is_substation: bool,
}

impl Bus {
    pub fn has_demand(&self) -> bool {
        self.p_demand != 0.0 || self.q_demand != 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub from_bus: BusId,
    pub to_bus: BusId,
    /// Resistance: ohm in physical units, pu after conversion.
    pub r: f64,
    pub x: f64,
    /// Ampacity: A in physical units, pu after conversion.
    pub i_max: f64,
    pub switchable: bool,
    pub initially_closed: bool,
}

impl Branch {
    /// Squared impedance magnitude.
    pub fn z_sqr(&self) -> f64 {
        self.r * self.r + self.x * self.x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    Physical,
    PerUnit,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("duplicate bus id {0}")]
    DuplicateBus(BusId),
    #[error("branch {branch} references unknown bus {bus}")]
    UnknownBus { branch: usize, bus: BusId },
    #[error("network has no substation")]
    NoSubstation,
    #[error("no spanning forest possible: {branches} branches for {required} non-substation buses")]
    NoSpanningForest { branches: usize, required: usize },
    #[error("base values must be positive and finite (base_kv={base_kv}, base_mva={base_mva})")]
    NonPositiveBase { base_kv: f64, base_mva: f64 },
}

#[derive(Debug, Clone)]
pub struct Network {
    base_kv: f64,
    base_mva: f64,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
    units: Units,
    index: HashMap<BusId, usize>,
    ends: Vec<(usize, usize)>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.base_kv == other.base_kv
            && self.base_mva == other.base_mva
            && self.units == other.units
            && self.buses == other.buses
            && self.branches == other.branches
    }
}

impl Network {
    /// Builds a network in physical units.
    pub fn new(base_kv: f64, base_mva: f64, buses: Vec<Bus>, branches: Vec<Branch>) -> Result<Self, NetworkError> {
        Self::with_units(base_kv, base_mva, buses, branches, Units::Physical)
    }

    pub fn with_units(
        base_kv: f64,
        base_mva: f64,
        buses: Vec<Bus>,
        branches: Vec<Branch>,
        units: Units,
    ) -> Result<Self, NetworkError> {
        if !(base_kv > 0.0 && base_kv.is_finite() && base_mva > 0.0 && base_mva.is_finite()) {
            return Err(NetworkError::NonPositiveBase { base_kv, base_mva });
        }
        let mut index = HashMap::with_capacity(buses.len());
        for (k, bus) in buses.iter().enumerate() {
            if index.insert(bus.id, k).is_some() {
                return Err(NetworkError::DuplicateBus(bus.id));
            }
        }
        let mut ends = Vec::with_capacity(branches.len());
        for (k, br) in branches.iter().enumerate() {
            let lookup = |id: BusId| {
                index
                    .get(&id)
                    .copied()
                    .ok_or(NetworkError::UnknownBus { branch: k, bus: id })
            };
            ends.push((lookup(br.from_bus)?, lookup(br.to_bus)?));
        }
        let n_sub = buses.iter().filter(|b| b.is_substation).count();
        if n_sub == 0 {
            return Err(NetworkError::NoSubstation);
        }
        let required = buses.len() - n_sub;
        if branches.len() < required {
            return Err(NetworkError::NoSpanningForest {
                branches: branches.len(),
                required,
            });
        }
        Ok(Self {
            base_kv,
            base_mva,
            buses,
            branches,
            units,
            index,
            ends,
        })
    }

    pub fn base_kv(&self) -> f64 {
        self.base_kv
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn bus(&self, k: usize) -> &Bus {
        &self.buses[k]
    }

    pub fn branch(&self, k: usize) -> &Branch {
        &self.branches[k]
    }

    /// Position of a bus id in [`Network::buses`].
    pub fn bus_index(&self, id: BusId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Bus positions of branch `k` as (from, to).
    pub fn endpoints(&self, k: usize) -> (usize, usize) {
        self.ends[k]
    }

    pub fn substations(&self) -> Vec<usize> {
        (0..self.buses.len()).filter(|&k| self.buses[k].is_substation).collect()
    }

    pub fn n_substations(&self) -> usize {
        self.buses.iter().filter(|b| b.is_substation).count()
    }

    /// Number of closed branches in any radial configuration.
    pub fn radial_branch_count(&self) -> usize {
        self.n_buses() - self.n_substations()
    }

    /// Independent loops of the all-closed graph.
    pub fn loop_count(&self) -> usize {
        self.n_branches() + self.n_substations() - self.n_buses()
    }

    /// Branches incident to each bus, in branch order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.buses.len()];
        for (k, &(a, b)) in self.ends.iter().enumerate() {
            inc[a].push(k);
            if b != a {
                inc[b].push(k);
            }
        }
        inc
    }

    pub(crate) fn map_values(
        &self,
        base_kv: f64,
        base_mva: f64,
        units: Units,
        bus_fn: impl Fn(&Bus) -> Bus,
        branch_fn: impl Fn(&Branch) -> Branch,
    ) -> Self {
        Self {
            base_kv,
            base_mva,
            buses: self.buses.iter().map(bus_fn).collect(),
            branches: self.branches.iter().map(branch_fn).collect(),
            units,
            index: self.index.clone(),
            ends: self.ends.clone(),
        }
    }
}

/// Partition of buses into substations, demand buses and zero-demand buses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BusPartition {
    pub substations: Vec<usize>,
    pub demand: Vec<usize>,
    pub zero_demand: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BusClass {
    Substation,
    Demand,
    ZeroDemand,
}

impl BusPartition {
    pub fn class_of(&self, n_buses: usize) -> Vec<BusClass> {
        let mut out = vec![BusClass::ZeroDemand; n_buses];
        for &k in &self.substations {
            out[k] = BusClass::Substation;
        }
        for &k in &self.demand {
            out[k] = BusClass::Demand;
        }
        out
    }
}

pub fn classify_buses(net: &Network) -> BusPartition {
    let mut part = BusPartition {
        substations: Vec::new(),
        demand: Vec::new(),
        zero_demand: Vec::new(),
    };
    for (k, bus) in net.buses().iter().enumerate() {
        if bus.is_substation {
            part.substations.push(k);
        } else if bus.has_demand() {
            part.demand.push(k);
        } else {
            part.zero_demand.push(k);
        }
    }
    part
}
