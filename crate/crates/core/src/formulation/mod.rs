//! Solver-agnostic optimization model for minimum-loss reconfiguration.
//!
//! [`build_core_model`] emits the DistFlow branch-flow model with switch
//! binaries; [`add_radiality`] appends one of eight radiality families.
//! Variable names follow a fixed catalogue so emitted files are stable:
//!
//! | name            | meaning                                   |
//! |-----------------|-------------------------------------------|
//! | `Vsqr[i]`       | squared voltage magnitude at bus i        |
//! | `PS[i]`,`QS[i]` | substation injection                      |
//! | `y[i,j]`        | branch switch state                       |
//! | `P[i,j]`,`Q[i,j]` | flow measured at the receiving bus j    |
//! | `Isqr[i,j]`     | squared current magnitude                 |
//! | `dV[i,j]`       | voltage slack of an open branch           |
//! | `yD[i->j]`      | directed switch state                     |
//! | `f[i,j]`        | single-commodity fictitious flow (signed) |
//! | `fk[k][i->j]`   | flow of the commodity destined to bus k   |
//!
//! Bus ids are the dataset ids and `i,j` is the dataset orientation of the
//! branch.

mod distflow;
mod feasible;
mod ir;
mod point;
mod radiality;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netmodel::Diagnostic;

pub use distflow::build_core_model;
pub use feasible::{binary_feasible_set, MAX_FEASIBLE_SCAN_BRANCHES};
pub use ir::{model_stats, ConeConstraint, LinearConstraint, ModelIR, ModelStats, Residuals, Sense, VarKind, Variable};
pub use point::{radial_point, CoreFlows};
pub use radiality::{add_radiality, directed_arc_map, Arc, ArcMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulationError {
    #[error("network has {} validation error(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
    #[error("network must be in per-unit")]
    NotPerUnit,
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("variable `{name}` has lower bound {lb} above upper bound {ub}")]
    BadBounds { name: String, lb: f64, ub: f64 },
    #[error("constraint `{row}` references variable #{var} which does not exist")]
    UnknownVariable { row: String, var: usize },
    #[error("model has no variable `{0}`")]
    MissingVariable(String),
    #[error("model was built for a different network")]
    FingerprintMismatch,
    #[error("model already carries `{0}` radiality constraints")]
    RadialityPresent(FormulationKind),
    #[error("exhaustive scan needs at most {max} branches, network has {got}")]
    TooLarge { max: usize, got: usize },
    #[error("unknown formulation `{0}` (expected base|pc|st|scf|scf+st|mcf|mcf+st|mcf+scf)")]
    UnknownKind(String),
    #[error("configuration is not radial")]
    NotRadial,
}

/// The radiality constraint families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FormulationKind {
    Base,
    PC,
    ST,
    SCF,
    ScfSt,
    MCF,
    McfSt,
    McfScf,
}

impl FormulationKind {
    pub const ALL: [FormulationKind; 8] = [
        FormulationKind::Base,
        FormulationKind::PC,
        FormulationKind::ST,
        FormulationKind::SCF,
        FormulationKind::ScfSt,
        FormulationKind::MCF,
        FormulationKind::McfSt,
        FormulationKind::McfScf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulationKind::Base => "base",
            FormulationKind::PC => "pc",
            FormulationKind::ST => "st",
            FormulationKind::SCF => "scf",
            FormulationKind::ScfSt => "scf+st",
            FormulationKind::MCF => "mcf",
            FormulationKind::McfSt => "mcf+st",
            FormulationKind::McfScf => "mcf+scf",
        }
    }

    /// Whether the cardinality row `sum y <= |N| - |N_s|` is emitted.
    pub fn has_cardinality(self) -> bool {
        !self.has_spanning_tree()
    }

    pub fn has_parent_child(self) -> bool {
        self == FormulationKind::PC
    }

    pub fn has_spanning_tree(self) -> bool {
        matches!(
            self,
            FormulationKind::ST | FormulationKind::ScfSt | FormulationKind::McfSt
        )
    }

    pub fn has_single_commodity(self) -> bool {
        matches!(
            self,
            FormulationKind::SCF | FormulationKind::ScfSt | FormulationKind::McfScf
        )
    }

    pub fn has_multi_commodity(self) -> bool {
        matches!(
            self,
            FormulationKind::MCF | FormulationKind::McfSt | FormulationKind::McfScf
        )
    }

    /// Whether each branch gets a pair of directed binaries.
    pub fn is_directed(self) -> bool {
        self.has_parent_child() || self.has_spanning_tree() || self.has_multi_commodity()
    }
}

impl fmt::Display for FormulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulationKind {
    type Err = FormulationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        FormulationKind::ALL
            .into_iter()
            .find(|k| k.as_str() == t)
            .ok_or_else(|| FormulationError::UnknownKind(s.to_string()))
    }
}

impl TryFrom<String> for FormulationKind {
    type Error = FormulationError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<FormulationKind> for String {
    fn from(k: FormulationKind) -> String {
        k.as_str().to_string()
    }
}

/// Stable 64-bit FNV-1a digest of everything the model depends on.
pub(crate) fn fingerprint(net: &crate::netmodel::Network) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(&net.base_kv().to_bits().to_le_bytes());
    eat(&net.base_mva().to_bits().to_le_bytes());
    for b in net.buses() {
        eat(&b.id.to_le_bytes());
        for v in [b.p_demand, b.q_demand, b.v_min, b.v_max] {
            eat(&v.to_bits().to_le_bytes());
        }
        eat(&[b.is_substation as u8]);
    }
    for br in net.branches() {
        eat(&br.from_bus.to_le_bytes());
        eat(&br.to_bus.to_le_bytes());
        for v in [br.r, br.x, br.i_max] {
            eat(&v.to_bits().to_le_bytes());
        }
        eat(&[br.switchable as u8, br.initially_closed as u8]);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_strings() {
        for k in FormulationKind::ALL {
            assert_eq!(k.as_str().parse::<FormulationKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<FormulationKind>(&json).unwrap(), k);
        }
        assert_eq!("MCF+ST".parse::<FormulationKind>().unwrap(), FormulationKind::McfSt);
        assert!("st+mcf".parse::<FormulationKind>().is_err());
    }

    #[test]
    fn directed_families() {
        use FormulationKind::*;
        let directed: Vec<_> = FormulationKind::ALL.into_iter().filter(|k| k.is_directed()).collect();
        assert_eq!(directed, vec![PC, ST, ScfSt, MCF, McfSt, McfScf]);
    }
}
