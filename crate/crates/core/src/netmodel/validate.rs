use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{BusId, Network};
use crate::unionfind::UnionFind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Location {
    System,
    Bus(BusId),
    /// Zero-based branch position.
    Branch(usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::System => write!(f, "system"),
            Location::Bus(id) => write!(f, "bus {id}"),
            Location::Branch(k) => write!(f, "branch #{}", k + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}: {}", self.location, self.message)
    }
}

/// Checks every structural invariant of a network. An empty result means the
/// network is usable by all other modules.
pub fn validate(net: &Network) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut error = |location: Location, message: String| {
        out.push(Diagnostic {
            severity: Severity::Error,
            location,
            message,
        })
    };

    if !(net.base_kv() > 0.0) {
        error(
            Location::System,
            format!("base_kv must be positive, got {}", net.base_kv()),
        );
    }
    if !(net.base_mva() > 0.0) {
        error(
            Location::System,
            format!("base_mva must be positive, got {}", net.base_mva()),
        );
    }

    for bus in net.buses() {
        let loc = Location::Bus(bus.id);
        if !(bus.v_min > 0.0) {
            error(loc, format!("v_min must be positive, got {}", bus.v_min));
        }
        if !(bus.v_min <= bus.v_max) {
            error(loc, format!("v_min {} exceeds v_max {}", bus.v_min, bus.v_max));
        }
        if !(bus.p_demand >= 0.0) {
            error(loc, format!("negative active demand {}", bus.p_demand));
        }
        if !bus.q_demand.is_finite() {
            error(loc, "non-finite reactive demand".into());
        }
    }

    let mut pairs = HashSet::new();
    for (k, br) in net.branches().iter().enumerate() {
        let loc = Location::Branch(k);
        if !(br.r >= 0.0 && br.x >= 0.0) {
            error(loc, format!("negative impedance r={} x={}", br.r, br.x));
        } else if br.r == 0.0 && br.x == 0.0 {
            error(loc, "zero impedance (r = x = 0)".into());
        }
        if !(br.i_max > 0.0) {
            error(loc, format!("ampacity must be positive, got {}", br.i_max));
        }
        if br.from_bus == br.to_bus {
            error(loc, format!("self-loop at bus {}", br.from_bus));
        }
        let key = (br.from_bus.min(br.to_bus), br.from_bus.max(br.to_bus));
        if !pairs.insert(key) {
            error(loc, format!("duplicate branch between buses {} and {}", key.0, key.1));
        }
    }

    let mut uf = UnionFind::new(net.n_buses());
    for k in 0..net.n_branches() {
        let (a, b) = net.endpoints(k);
        uf.union(a, b);
    }
    let mut fed = vec![false; net.n_buses()];
    for s in net.substations() {
        let root = uf.find(s);
        fed[root] = true;
    }
    let mut reported = HashSet::new();
    for k in 0..net.n_buses() {
        let root = uf.find(k);
        if !fed[root] && reported.insert(root) {
            error(
                Location::Bus(net.bus(k).id),
                "not connected to any substation with all branches closed".into(),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn triangle() -> Network {
        Network::new(
            10.0,
            1.0,
            vec![bus(1, 0.0, 0.0, true), bus(2, 1.0, 0.5, false), bus(3, 1.0, 0.5, false)],
            vec![branch(1, 2, 0.1, 0.1), branch(2, 3, 0.1, 0.1), branch(3, 1, 0.1, 0.1)],
        )
        .unwrap()
    }

    #[test]
    fn clean_network_has_no_diagnostics() {
        assert!(validate(&triangle()).is_empty());
    }

    #[test]
    fn inverted_voltage_limits() {
        let mut buses = triangle().buses().to_vec();
        buses[1].v_min = 1.1;
        buses[1].v_max = 1.0;
        let net = Network::new(10.0, 1.0, buses, triangle().branches().to_vec()).unwrap();
        let diags = validate(&net);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].location, Location::Bus(2));
        assert_eq!(diags[0].severity, Severity::Error);
    }

    #[test]
    fn disconnected_island_without_substation() {
        let net = Network::new(
            10.0,
            1.0,
            vec![
                bus(1, 0.0, 0.0, true),
                bus(2, 1.0, 0.0, false),
                bus(3, 1.0, 0.0, false),
                bus(4, 1.0, 0.0, false),
            ],
            vec![branch(1, 2, 0.1, 0.1), branch(3, 4, 0.1, 0.1), branch(4, 3, 0.2, 0.1)],
        )
        .unwrap();
        let diags = validate(&net);
        assert!(diags.iter().any(|d| d.message.contains("not connected")));
        assert!(diags.iter().any(|d| d.message.contains("duplicate branch")));
    }

    #[test]
    fn degenerate_branches() {
        let mut branches = triangle().branches().to_vec();
        branches[0].r = 0.0;
        branches[0].x = 0.0;
        branches[1].i_max = 0.0;
        let net = Network::new(10.0, 1.0, triangle().buses().to_vec(), branches).unwrap();
        let diags = validate(&net);
        assert_eq!(diags.len(), 2);
        assert_eq!(diags[0].location, Location::Branch(0));
    }
}
