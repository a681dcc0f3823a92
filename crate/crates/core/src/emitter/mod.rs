//! LP and MPS text for external MIP/MISOCP solvers.
//!
//! Output is a pure function of the model and options: LF line endings,
//! ASCII, rows and columns in model insertion order. Each rotated cone
//! `u*v >= p^2 + q^2` is written as the quadratic row
//! `p^2 + q^2 - u*v <= 0`.

mod lp;
mod mps;
mod number;
mod readback;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formulation::ModelStats;

pub use lp::write_lp;
pub use mps::write_mps;
pub use number::format_number;
pub use readback::{check_round_trip, read_back_stats};

pub const DEFAULT_PRECISION: u8 = 12;
pub const MAX_MPS_NAME: usize = 255;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmitError {
    #[error("precision {0} outside 6..=17")]
    Precision(u8),
    #[error("name `{0}` contains characters the LP format forbids")]
    ForbiddenName(String),
    #[error("names `{0}` and `{1}` collide after LP sanitization")]
    NameCollision(String, String),
    #[error("name of {len} characters exceeds {MAX_MPS_NAME}: `{name}`")]
    NameTooLong { name: String, len: usize },
    #[error("name `{0}` is empty or contains whitespace")]
    BadMpsName(String),
    #[error("not emitter output: {0}")]
    Foreign(String),
    #[error("read-back counts {got:?} differ from model counts {expected:?}")]
    Mismatch { expected: ModelStats, got: ModelStats },
    #[error("unknown format `{0}` (expected lp or mps)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Lp,
    Mps,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Lp => "lp",
            Format::Mps => "mps",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for Format {
    type Err = EmitError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(Format::Lp),
            "mps" => Ok(Format::Mps),
            _ => Err(EmitError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    pub format: Format,
    /// Significant digits for every number.
    pub precision: u8,
    pub objective_name: String,
}

impl Default for EmitOptions {
    fn default() -> Self {
        Self {
            format: Format::Lp,
            precision: DEFAULT_PRECISION,
            objective_name: "obj".to_string(),
        }
    }
}

impl EmitOptions {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<(), EmitError> {
        if !(6..=17).contains(&self.precision) {
            return Err(EmitError::Precision(self.precision));
        }
        Ok(())
    }
}

/// Emits in the format selected by `opts`.
pub fn write_model(model: &crate::formulation::ModelIR, opts: &EmitOptions) -> Result<String, EmitError> {
    match opts.format {
        Format::Lp => write_lp(model, opts),
        Format::Mps => write_mps(model, opts),
    }
}
