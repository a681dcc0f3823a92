//! Reconfiguration toolkit for radial distribution networks.
//!
//! The crate covers the whole pipeline from a dataset file to either an
//! optimization model for an external MIP solver or a natively found
//! minimum-loss radial configuration:
//!
//! - [`netmodel`]: network data, canonical file format, per-unit conversion.
//! - [`topology`]: radiality, components, loops, matrix-tree counting.
//! - [`formulation`]: DistFlow core model plus eight radiality families.
//! - [`emitter`]: deterministic LP and MPS text.
//! - [`powerflow`]: backward/forward sweep evaluator.
//! - [`search`]: exact enumeration and branch-exchange local search.
//! - [`harness`]: benchmark matrix and reports.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emitter;
pub mod formulation;
pub mod harness;
pub mod netmodel;
pub mod powerflow;
pub mod search;
pub mod topology;
mod unionfind;

pub use unionfind::UnionFind;
