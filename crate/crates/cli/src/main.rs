use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use radkit::emitter::{write_model, EmitOptions, Format, DEFAULT_PRECISION};
use radkit::formulation::{add_radiality, build_core_model, model_stats, FormulationKind};
use radkit::harness::{
    render_report, run_bench, thread_pool_from_env, Manifest, NativeMode, ReportFormat, DEFAULT_STARTS,
};
use radkit::netmodel::{parse_branch_list, parse_network, to_per_unit, validate, BranchListOptions, Network, Severity};
use radkit::powerflow::{solve_distflow, EvalOptions, SweepOptions};
use radkit::search::{enumerate_radial, local_search_branch_exchange, multistart, SearchBudget, DEFAULT_MAX_TREES};
use radkit::topology::{is_radial, Configuration};

/// Radial distribution network reconfiguration.
#[derive(Parser)]
#[command(name = "radkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArgs {
    /// Network file (canonical format unless --branch-list).
    #[arg(long)]
    system: PathBuf,
    /// Read a from,to,r_ohm,x_ohm,p_kw,q_kvar branch list instead.
    #[arg(long, requires_all = ["base_kv", "base_mva"])]
    branch_list: bool,
    #[arg(long)]
    base_kv: Option<f64>,
    #[arg(long)]
    base_mva: Option<f64>,
    /// Substation bus id for --branch-list.
    #[arg(long, default_value_t = 1)]
    substation: radkit::netmodel::BusId,
}

#[derive(Args)]
struct SwitchArgs {
    /// Closed branches, 1-based, comma separated; the rest are open.
    #[arg(long, value_delimiter = ',', conflicts_with = "open")]
    closed: Option<Vec<usize>>,
    /// Open branches, 1-based, comma separated; the rest are closed.
    #[arg(long, value_delimiter = ',')]
    open: Option<Vec<usize>>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a network file and list diagnostics.
    Validate {
        #[command(flatten)]
        sys: SystemArgs,
    },
    /// Decide whether a switch configuration is radial.
    CheckRadial {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        switches: SwitchArgs,
    },
    /// Run the backward/forward sweep; defaults to the dataset switch states.
    Powerflow {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        switches: SwitchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for the minimum-loss radial configuration.
    Solve {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long, default_value = "exact")]
        mode: NativeMode,
        #[arg(long, default_value_t = radkit::harness::DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_TREES)]
        max_trees: u64,
        #[arg(long, default_value_t = DEFAULT_STARTS)]
        starts: usize,
        /// Reject configurations that violate voltage or current limits.
        #[arg(long)]
        hard_limits: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the optimization model as LP or MPS.
    Emit {
        #[command(flatten)]
        sys: SystemArgs,
        #[arg(long)]
        formulation: FormulationKind,
        #[arg(long, default_value = "lp")]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_PRECISION)]
        precision: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Model sizes per formulation as JSON.
    Stats {
        #[command(flatten)]
        sys: SystemArgs,
        /// Defaults to all eight.
        #[arg(long)]
        formulation: Option<FormulationKind>,
    },
    /// Run a benchmark manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "csv")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(sys: &SystemArgs) -> Result<Network> {
    let text = read(&sys.system)?;
    let net = if sys.branch_list {
        let opts = BranchListOptions {
            base_kv: sys.base_kv.unwrap_or_default(),
            base_mva: sys.base_mva.unwrap_or_default(),
            substation: sys.substation,
        };
        parse_branch_list(&text, &opts)
    } else {
        parse_network(&text)
    };
    net.with_context(|| sys.system.display().to_string())
}

fn configuration(net: &Network, sw: &SwitchArgs) -> Result<Configuration> {
    let n = net.n_branches();
    let zero_based = |list: &[usize]| -> Result<Vec<usize>> {
        list.iter()
            .map(|&k| match k {
                1.. if k <= n => Ok(k - 1),
                _ => bail!("branch {k} out of range 1..={n}"),
            })
            .collect()
    };
    Ok(match (&sw.closed, &sw.open) {
        (Some(c), _) => Configuration::from_closed_indices(n, &zero_based(c)?),
        (None, Some(o)) => Configuration::with_open(n, &zero_based(o)?),
        (None, None) => Configuration::initial(net),
    })
}

fn emit_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Validate { sys } => {
            let net = load(&sys)?;
            let diags = validate(&net);
            for d in &diags {
                eprintln!("{d}");
            }
            let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
            if errors > 0 {
                bail!("{errors} error(s)");
            }
            println!(
                "ok: {} buses, {} branches, {} substation(s), {} loop(s)",
                net.n_buses(),
                net.n_branches(),
                net.n_substations(),
                net.loop_count()
            );
        }
        Command::CheckRadial { sys, switches } => {
            let net = load(&sys)?;
            let cfg = configuration(&net, &switches)?;
            println!("radial: {}", is_radial(&net, &cfg)?);
        }
        Command::Powerflow { sys, switches, out } => {
            let net = to_per_unit(&load(&sys)?)?;
            let cfg = configuration(&net, &switches)?;
            let r = solve_distflow(&net, &cfg, &SweepOptions::default())?;
            emit_out(out.as_deref(), &pretty(&r.to_json(&net, &cfg)))?;
        }
        Command::Solve {
            sys,
            mode,
            seed,
            max_trees,
            starts,
            hard_limits,
            out,
        } => {
            let net = load(&sys)?;
            let budget = SearchBudget {
                max_trees,
                eval: EvalOptions {
                    hard_limits,
                    ..EvalOptions::default()
                },
                ..SearchBudget::default()
            };
            let r = match mode {
                NativeMode::Exact => enumerate_radial(&net, &budget)?,
                NativeMode::Local => local_search_branch_exchange(&net, &Configuration::initial(&net), &budget)?,
                NativeMode::Multistart => multistart(&net, starts, seed, &budget)?,
            };
            let doc = json!({
                "system": sys.system.display().to_string(),
                "mode": mode,
                "losses_kw": r.best_losses_kw,
                "open_branches": r.open_branches(),
                "configurations_evaluated": r.configurations_evaluated,
                "trees_enumerated": r.trees_enumerated,
                "wall_time_s": r.wall_time.as_secs_f64(),
                "trace": r.trace,
                "seed": matches!(mode, NativeMode::Multistart).then_some(seed),
            });
            emit_out(out.as_deref(), &pretty(&doc))?;
        }
        Command::Emit {
            sys,
            formulation,
            format,
            precision,
            out,
        } => {
            let net = to_per_unit(&load(&sys)?)?;
            let model = add_radiality(build_core_model(&net)?, formulation, &net)?;
            let opts = EmitOptions {
                precision,
                ..EmitOptions::new(format)
            };
            emit_out(out.as_deref(), &write_model(&model, &opts)?)?;
        }
        Command::Stats { sys, formulation } => {
            let net = to_per_unit(&load(&sys)?)?;
            let kinds = formulation.map_or(FormulationKind::ALL.to_vec(), |k| vec![k]);
            let mut doc = serde_json::Map::new();
            for k in kinds {
                let m = add_radiality(build_core_model(&net)?, k, &net)?;
                doc.insert(k.to_string(), serde_json::to_value(model_stats(&m))?);
            }
            emit_out(None, &pretty(&doc.into()))?;
        }
        Command::Bench { manifest, format, out } => {
            let m = Manifest::load(&manifest)?;
            let rows = run_bench(&m);
            for r in &rows {
                if let Some(e) = &r.error {
                    eprintln!("{} {}: {e}", r.system, r.formulation);
                }
            }
            emit_out(out.as_deref(), &render_report(&rows, format))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let pool = match thread_pool_from_env() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match pool {
        Some(pool) => pool.install(|| run(cli.command)),
        None => run(cli.command),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
