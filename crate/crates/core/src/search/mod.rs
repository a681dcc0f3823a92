//! Native minimum-loss search: exhaustive enumeration of radial
//! configurations and branch-exchange local search.
//!
//! Both modes compare candidates by `(losses, configuration)` so that ties
//! resolve to the lexicographically smallest switch vector, independent of
//! thread scheduling.

mod enumerate;
mod exchange;

use std::cmp::Ordering;
use std::time::Duration;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::netmodel::{to_per_unit, Network, NetworkError};
use crate::powerflow::EvalOptions;
use crate::topology::Configuration;

pub use enumerate::enumerate_radial;
pub use exchange::{local_search_branch_exchange, multistart, random_spanning_forest};

pub const DEFAULT_MAX_TREES: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("{count} radial configurations exceed the budget of {max}; use local search instead")]
    BudgetExceeded { count: BigUint, max: u64 },
    #[error("start configuration is not radial")]
    NotRadial,
    #[error("multistart needs at least one start")]
    NoStarts,
    #[error("network admits no radial configuration")]
    NoRadialConfiguration,
    #[error("no radial configuration has finite losses")]
    NoFeasibleConfiguration,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBudget {
    /// Exact mode refuses networks with more radial configurations.
    pub max_trees: u64,
    /// Cap on accepted exchange moves per local search.
    pub max_moves: usize,
    pub eval: EvalOptions,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_trees: DEFAULT_MAX_TREES,
            max_moves: 10_000,
            eval: EvalOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    LocalSearch,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Exact => "exact",
            SearchMode::LocalSearch => "local_search",
        }
    }
}

/// One accepted exchange move (1-based branch numbers).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub closed: usize,
    pub opened: usize,
    pub losses_kw: f64,
}

fn seconds<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub best_cfg: Configuration,
    pub best_losses_kw: f64,
    pub configurations_evaluated: u64,
    /// Exact mode only.
    pub trees_enumerated: Option<u64>,
    #[serde(rename = "wall_time_s", serialize_with = "seconds")]
    pub wall_time: Duration,
    pub mode: SearchMode,
    pub trace: Vec<TraceEntry>,
}

impl SearchReport {
    /// 1-based positions of the open branches.
    pub fn open_branches(&self) -> Vec<usize> {
        self.best_cfg.open_indices().into_iter().map(|k| k + 1).collect()
    }
}

/// Total order on candidates: lower losses first, then smaller vector.
pub(crate) fn better(a: (f64, &Configuration), b: (f64, &Configuration)) -> bool {
    match a.0.total_cmp(&b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

pub(crate) fn per_unit(net: &Network) -> Result<Network, SearchError> {
    Ok(to_per_unit(net)?)
}
