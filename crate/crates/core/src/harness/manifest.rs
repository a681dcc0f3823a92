use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::emitter::Format;
use crate::formulation::FormulationKind;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_STARTS: usize = 20;

/// Native search run once per system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NativeMode {
    Exact,
    Local,
    Multistart,
}

impl NativeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NativeMode::Exact => "exact",
            NativeMode::Local => "local",
            NativeMode::Multistart => "multistart",
        }
    }
}

impl fmt::Display for NativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NativeMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(NativeMode::Exact),
            "local" => Ok(NativeMode::Local),
            "multistart" => Ok(NativeMode::Multistart),
            _ => Err(HarnessError::UnknownMode(s.to_string())),
        }
    }
}

/// One system of the matrix.
///
/// ```toml
/// [[system]]
/// name = "33bus"
/// file = "33bus.net"
/// formulations = ["base", "mcf+st"]   # omitted: all eight
/// mode = "exact"                      # omitted: emission only
/// target_kw = 139.55
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemEntry {
    pub name: String,
    /// Relative paths resolve against the manifest's directory.
    pub file: PathBuf,
    #[serde(default = "all_kinds")]
    pub formulations: Vec<FormulationKind>,
    #[serde(default)]
    pub mode: Option<NativeMode>,
    #[serde(default)]
    pub target_kw: Option<f64>,
    #[serde(default)]
    pub starts: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub max_trees: Option<u64>,
}

fn all_kinds() -> Vec<FormulationKind> {
    FormulationKind::ALL.to_vec()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_format() -> Format {
    Format::Lp
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// Seed for systems that do not set their own.
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Format timed in `emit_s`.
    #[serde(default = "default_format")]
    pub format: Format,
    #[serde(default, rename = "system")]
    pub systems: Vec<SystemEntry>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            format: Format::Lp,
            systems: Vec::new(),
            base_dir: PathBuf::new(),
        }
    }
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let m: Manifest = toml::from_str(text).map_err(|e| HarnessError::Manifest(e.to_string()))?;
        for s in &m.systems {
            if s.starts == Some(0) {
                return Err(HarnessError::Manifest(format!(
                    "system `{}`: starts must be positive",
                    s.name
                )));
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut m = Self::parse(&text)?;
        m.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(m)
    }

    pub fn resolve(&self, entry: &SystemEntry) -> PathBuf {
        if entry.file.is_absolute() {
            entry.file.clone()
        } else {
            self.base_dir.join(&entry.file)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let m = Manifest::parse("[[system]]\nname = \"a\"\nfile = \"a.net\"\n").unwrap();
        assert_eq!(m.seed, DEFAULT_SEED);
        assert_eq!(m.systems[0].formulations.len(), 8);
        assert_eq!(m.systems[0].mode, None);
    }

    #[test]
    fn kinds_and_modes_parse() {
        let m = Manifest::parse(
            "seed = 7\nformat = \"mps\"\n[[system]]\nname = \"a\"\nfile = \"/x/a.net\"\nformulations = [\"MCF+ST\", \"st\"]\nmode = \"multistart\"\nstarts = 3\n",
        )
        .unwrap();
        assert_eq!(m.format, Format::Mps);
        assert_eq!(
            m.systems[0].formulations,
            vec![FormulationKind::McfSt, FormulationKind::ST]
        );
        assert_eq!(m.systems[0].mode, Some(NativeMode::Multistart));
        assert_eq!(m.resolve(&m.systems[0]), PathBuf::from("/x/a.net"));
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(Manifest::parse("[[system]]\nname = \"a\"\n").is_err());
        assert!(Manifest::parse("[[system]]\nname = \"a\"\nfile = \"a\"\nmode = \"tabu\"\n").is_err());
        assert!(Manifest::parse("[[system]]\nname = \"a\"\nfile = \"a\"\nstarts = 0\n").is_err());
        assert!(Manifest::parse("colour = 1\n").is_err());
        assert_eq!(Manifest::parse("").unwrap().systems, vec![]);
    }
}
