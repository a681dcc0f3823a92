//! Benchmark matrix: systems × formulations, with model statistics,
//! emission timings and one native search per system.
//!
//! Rows are a pure function of the manifest apart from the timing columns
//! (`emit_s`, `solve_s`). Failures are recorded in the affected rows and
//! never abort the matrix.

mod manifest;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emitter::{write_model, EmitOptions};
use crate::formulation::{add_radiality, build_core_model, model_stats, FormulationKind, ModelStats};
use crate::netmodel::{parse_network, to_per_unit, Network};
use crate::search::{enumerate_radial, local_search_branch_exchange, multistart, SearchBudget};
use crate::topology::Configuration;

pub use manifest::{Manifest, NativeMode, SystemEntry, DEFAULT_SEED, DEFAULT_STARTS};
pub use report::{render_report, ReportFormat, CSV_HEADER};

/// Caps the worker pool when set to a positive integer.
pub const THREADS_ENV: &str = "RADKIT_THREADS";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("unknown search mode `{0}` (expected exact, local or multistart)")]
    UnknownMode(String),
    #[error("unknown report format `{0}` (expected csv, json or markdown)")]
    UnknownFormat(String),
    #[error("{THREADS_ENV}=`{0}` is not a positive integer")]
    Threads(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NativeResult {
    pub mode: NativeMode,
    pub losses_kw: f64,
    pub seconds: f64,
    /// Exact mode only.
    pub trees: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub system: String,
    pub formulation: FormulationKind,
    /// Absent when the model could not be built.
    pub stats: Option<ModelStats>,
    pub emit_seconds: Option<f64>,
    pub native: Option<NativeResult>,
    pub target_losses_kw: Option<f64>,
    pub deviation_pct: Option<f64>,
    /// External-solver columns, left for users to fill in.
    pub gap_pct: Option<f64>,
    pub ram_mb: Option<f64>,
    pub error: Option<String>,
}

pub fn deviation_pct(losses: f64, target: f64) -> f64 {
    100.0 * (losses - target).abs() / target
}

/// Builds the thread pool `RADKIT_THREADS` asks for, or `None` for rayon's
/// global pool.
pub fn thread_pool_from_env() -> Result<Option<rayon::ThreadPool>, HarnessError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return Err(HarnessError::Threads(raw)),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| HarnessError::Threads(e.to_string()))
}

struct Emitted {
    stats: Option<ModelStats>,
    seconds: Option<f64>,
    error: Option<String>,
}

fn emit_one(net: &Network, kind: FormulationKind, opts: &EmitOptions) -> Emitted {
    let t0 = Instant::now();
    let built = build_core_model(net)
        .and_then(|m| add_radiality(m, kind, net))
        .map_err(|e| e.to_string())
        .and_then(|m| write_model(&m, opts).map(|_| m).map_err(|e| e.to_string()));
    let seconds = t0.elapsed().as_secs_f64();
    match built {
        Ok(m) => Emitted {
            stats: Some(model_stats(&m)),
            seconds: Some(seconds),
            error: None,
        },
        Err(e) => Emitted {
            stats: None,
            seconds: None,
            error: Some(e),
        },
    }
}

fn search_one(net: &Network, entry: &SystemEntry, mode: NativeMode, seed: u64) -> Result<NativeResult, String> {
    let budget = SearchBudget {
        max_trees: entry.max_trees.unwrap_or(SearchBudget::default().max_trees),
        ..SearchBudget::default()
    };
    let report = match mode {
        NativeMode::Exact => enumerate_radial(net, &budget),
        NativeMode::Local => local_search_branch_exchange(net, &Configuration::initial(net), &budget),
        NativeMode::Multistart => multistart(net, entry.starts.unwrap_or(DEFAULT_STARTS), seed, &budget),
    }
    .map_err(|e| e.to_string())?;
    Ok(NativeResult {
        mode,
        losses_kw: report.best_losses_kw,
        seconds: report.wall_time.as_secs_f64(),
        trees: report.trees_enumerated,
    })
}

fn load(manifest: &Manifest, entry: &SystemEntry) -> Result<Network, String> {
    let path = manifest.resolve(entry);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let net = parse_network(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    to_per_unit(&net).map_err(|e| e.to_string())
}

fn run_system(manifest: &Manifest, entry: &SystemEntry) -> Vec<BenchRow> {
    let net = match load(manifest, entry) {
        Ok(net) => net,
        Err(e) => {
            return entry
                .formulations
                .iter()
                .map(|&kind| BenchRow {
                    system: entry.name.clone(),
                    formulation: kind,
                    stats: None,
                    emit_seconds: None,
                    native: None,
                    target_losses_kw: entry.target_kw,
                    deviation_pct: None,
                    gap_pct: None,
                    ram_mb: None,
                    error: Some(e.clone()),
                })
                .collect();
        }
    };
    let opts = EmitOptions::new(manifest.format);
    let seed = entry.seed.unwrap_or(manifest.seed);
    let (native, emitted) = rayon::join(
        || entry.mode.map(|mode| search_one(&net, entry, mode, seed)),
        || {
            entry
                .formulations
                .par_iter()
                .map(|&kind| emit_one(&net, kind, &opts))
                .collect::<Vec<_>>()
        },
    );
    let (native, search_error) = match native {
        Some(Ok(r)) => (Some(r), None),
        Some(Err(e)) => (None, Some(format!("search: {e}"))),
        None => (None, None),
    };
    let deviation = match (&native, entry.target_kw) {
        (Some(n), Some(t)) => Some(deviation_pct(n.losses_kw, t)),
        _ => None,
    };
    entry
        .formulations
        .iter()
        .zip(emitted)
        .map(|(&kind, em)| {
            let error = match (em.error, &search_error) {
                (Some(a), Some(b)) => Some(format!("{a}; {b}")),
                (a, b) => a.or_else(|| b.clone()),
            };
            BenchRow {
                system: entry.name.clone(),
                formulation: kind,
                stats: em.stats,
                emit_seconds: em.seconds,
                native: native.clone(),
                target_losses_kw: entry.target_kw,
                deviation_pct: deviation,
                gap_pct: None,
                ram_mb: None,
                error,
            }
        })
        .collect()
}

/// Runs the whole matrix. Rows come out in manifest order: systems as
/// listed, formulations as listed within each system.
pub fn run_bench(manifest: &Manifest) -> Vec<BenchRow> {
    manifest
        .systems
        .par_iter()
        .map(|entry| run_system(manifest, entry))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::serialize_network;
    use crate::topology::test_graph;

    fn manifest_with(dir: &std::path::Path, body: &str) -> Manifest {
        let net = test_graph(4, &[0], &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        std::fs::write(dir.join("loop.net"), serialize_network(&net)).unwrap();
        let mut m = Manifest::parse(body).unwrap();
        m.base_dir = dir.to_path_buf();
        m
    }

    #[test]
    fn empty_manifest_gives_no_rows() {
        assert!(run_bench(&Manifest::default()).is_empty());
    }

    #[test]
    fn search_result_is_shared_by_every_row() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest_with(
            dir.path(),
            "[[system]]\nname = \"loop\"\nfile = \"loop.net\"\nmode = \"exact\"\ntarget_kw = 1.0\n",
        );
        let rows = run_bench(&m);
        assert_eq!(rows.len(), 8);
        let kinds: Vec<_> = rows.iter().map(|r| r.formulation).collect();
        assert_eq!(kinds, FormulationKind::ALL.to_vec());
        let first = rows[0].native.clone().unwrap();
        assert_eq!(first.trees, Some(4));
        for r in &rows {
            assert_eq!(r.error, None);
            assert!(r.stats.is_some());
            assert_eq!(r.native.as_ref().unwrap().losses_kw, first.losses_kw);
            assert_eq!(r.deviation_pct, Some(deviation_pct(first.losses_kw, 1.0)));
        }
    }

    #[test]
    fn failures_stay_in_their_rows() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest_with(
            dir.path(),
            "[[system]]\nname = \"gone\"\nfile = \"missing.net\"\nformulations = [\"st\"]\n\
             [[system]]\nname = \"loop\"\nfile = \"loop.net\"\nformulations = [\"pc\"]\nmode = \"exact\"\nmax_trees = 2\n",
        );
        let rows = run_bench(&m);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.as_deref().unwrap().contains("missing.net"));
        assert!(rows[1].stats.is_some());
        assert!(rows[1].native.is_none());
        assert!(rows[1].error.as_deref().unwrap().starts_with("search:"));
    }

    #[test]
    fn emission_only_rows_have_no_native_result() {
        let dir = tempfile::tempdir().unwrap();
        let m = manifest_with(
            dir.path(),
            "[[system]]\nname = \"loop\"\nfile = \"loop.net\"\nformulations = [\"mcf+st\"]\ntarget_kw = 5.0\n",
        );
        let rows = run_bench(&m);
        assert!(rows[0].stats.unwrap().n_binary > 0);
        assert_eq!(rows[0].native, None);
        assert_eq!(rows[0].deviation_pct, None);
    }
}
