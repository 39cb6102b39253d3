//! `flocstat`: command-line front end for the flocculation chemostat model.
//!
//! Subcommands map onto the library's analysis surfaces: steady states,
//! trajectory simulation, one-parameter bifurcation diagrams, operating
//! diagrams, special points, and flocculation-rate sweeps. Every artifact
//! embeds the fully resolved configuration that produced it.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 inconclusive result (e.g. an unbracketable cycle-death search).

// `!(x > 0.0)` comparisons are deliberate: they reject NaN inputs too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use clap::{Args, Parser, Subcommand};
use config::ScenarioConfig;
use flocstat_core::diagrams::{
    bifurcation_1d, flocculation_sweep, operating_diagram, special_points, RegionTag,
};
use flocstat_core::dynamics::integrate_sampled;
use flocstat_core::equilibria::find_steady_states;
use flocstat_core::export;
use flocstat_core::model::{BioParams, OperatingPoint, State};
use flocstat_core::stability::classify;
use flocstat_core::CoreError;
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "flocstat",
    version,
    about = "Steady states, stability, bifurcation curves, and operating diagrams of a flocculation chemostat"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named parameter preset (line1, line2, line3, line5)
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// List all steady states with eigenvalues and stability verdicts
    SteadyStates {
        #[command(flatten)]
        common: Common,
        /// Inflow substrate concentration (g/l)
        #[arg(long)]
        sin: Option<f64>,
        /// Dilution rate (1/h)
        #[arg(long)]
        d: Option<f64>,
        /// Also write the JSON to this path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a trajectory and write it as CSV
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sin: Option<f64>,
        #[arg(long)]
        d: Option<f64>,
        /// Initial state as "S,u,v"
        #[arg(long)]
        init: Option<String>,
        /// Integration horizon (h)
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        abs_tol: Option<f64>,
        #[arg(long)]
        rel_tol: Option<f64>,
        /// Dense output samples
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-parameter bifurcation diagram at fixed dilution
    Bifurcation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<f64>,
        /// Inflow range as "lo:hi"
        #[arg(long)]
        sin: Option<String>,
        /// Probe limit cycles and locate cycle-death events
        #[arg(long)]
        cycles: bool,
        /// Artifact prefix (writes <prefix>_branches.csv and <prefix>_events.json)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Region-classified operating diagram with curve and point overlays
    OperatingDiagram {
        #[command(flatten)]
        common: Common,
        /// Inflow range as "lo:hi"
        #[arg(long)]
        sin: Option<String>,
        /// Dilution range as "lo:hi"
        #[arg(long)]
        d: Option<String>,
        /// Grid as "NXxNY"
        #[arg(long)]
        grid: Option<String>,
        /// Artifact prefix (writes <prefix>_grid.csv, <prefix>_curves.csv,
        /// <prefix>_points.csv, <prefix>.svg)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codimension-two special points over a dilution range
    SpecialPoints {
        #[command(flatten)]
        common: Common,
        /// Dilution range as "lo:hi"
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Operating diagrams for a list of attachment/detachment pairs
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Pairs as "a:b,a:b,..."
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long)]
        sin: Option<String>,
        #[arg(long)]
        d: Option<String>,
        #[arg(long)]
        grid: Option<String>,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Config(String),
    Core(CoreError),
    Io(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Core(
                CoreError::Inconclusive(_)
                | CoreError::PeriodUnresolved { .. }
                | CoreError::Boundary { .. },
            ) => "inconclusive",
            CliError::Core(_) => "numeric",
            CliError::Io(_) => "io",
        }
    }

    fn code(&self) -> u8 {
        match self.kind() {
            "config" => 2,
            "inconclusive" => 4,
            _ => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Config(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

fn write_artifact(path: &Path, content: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn load_scenario(common: &Common) -> CliResult<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            ScenarioConfig::from_toml(&text).map_err(CliError::Config)?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(preset) = &common.preset {
        cfg.preset = Some(preset.clone());
        cfg.params = None;
    }
    cfg.validate().map_err(CliError::Config)?;
    Ok(cfg)
}

fn parse_range(text: &str, flag: &str) -> CliResult<[f64; 2]> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        return config_err(format!("{flag} expects \"lo:hi\", got {text:?}"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Config(format!("{flag}: bad number {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Config(format!("{flag}: bad number {:?}", parts[1])))?;
    if !(hi > lo) {
        return config_err(format!("{flag}: need lo < hi, got {text:?}"));
    }
    Ok([lo, hi])
}

fn parse_grid(text: &str) -> CliResult<[usize; 2]> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return config_err(format!("--grid expects \"NXxNY\", got {text:?}"));
    }
    let nx = parts[0]
        .parse()
        .map_err(|_| CliError::Config(format!("--grid: bad count {:?}", parts[0])))?;
    let ny = parts[1]
        .parse()
        .map_err(|_| CliError::Config(format!("--grid: bad count {:?}", parts[1])))?;
    Ok([nx, ny])
}

fn parse_init(text: &str) -> CliResult<[f64; 3]> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return config_err(format!("--init expects \"S,u,v\", got {text:?}"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("--init: bad number {part:?}")))?;
    }
    Ok(out)
}

fn parse_pairs(text: &str) -> CliResult<Vec<[f64; 2]>> {
    text.split(',')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(':').collect();
            if parts.len() != 2 {
                return config_err(format!("--pairs expects \"a:b,a:b\", got {pair:?}"));
            }
            let a = parts[0]
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--pairs: bad number {:?}", parts[0])))?;
            let b = parts[1]
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--pairs: bad number {:?}", parts[1])))?;
            Ok([a, b])
        })
        .collect()
}

fn require<T>(value: Option<T>, what: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Config(format!("missing {what} (flag or config file)")))
}

/// The resolved configuration embedded into every artifact.
fn resolved_json(command: &str, params: &BioParams, args: serde_json::Value) -> String {
    serde_json::to_string(&json!({
        "command": command,
        "params": params,
        "args": args,
    }))
    .expect("config serializes")
}

fn csv_with_config(config_line: &str, body: &str) -> String {
    format!("# config: {config_line}\n{body}")
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let stem = prefix
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".to_string());
    prefix.with_file_name(format!("{stem}{suffix}"))
}

#[derive(Serialize)]
struct SteadyStateOut {
    kind: &'static str,
    s: f64,
    u: f64,
    v: f64,
    stable: bool,
    marginal: bool,
    mechanism: String,
    eigenvalues: [[f64; 2]; 3],
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::SteadyStates {
            common,
            sin,
            d,
            out,
        } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.steady_states.clone().unwrap_or_default();
            let s_in = require(sin.or(block.s_in), "--sin")?;
            let d = require(d.or(block.d), "--d")?;
            let out = out.or(block.out);
            let op = OperatingPoint::new(s_in, d);
            let states = find_steady_states(&op, &params)?;
            let mut listed = Vec::new();
            for e in &states {
                let verdict = classify(e, &op, &params)?;
                listed.push(SteadyStateOut {
                    kind: e.kind.name(),
                    s: e.state.s,
                    u: e.state.u,
                    v: e.state.v,
                    stable: verdict.stable,
                    marginal: verdict.is_marginal(),
                    mechanism: format!("{:?}", verdict.mechanism),
                    eigenvalues: verdict.eigenvalues.map(|z| [z.re, z.im]),
                });
            }
            let config_line =
                resolved_json("steady-states", &params, json!({"s_in": s_in, "d": d}));
            let doc = json!({
                "config": serde_json::from_str::<serde_json::Value>(&config_line).unwrap(),
                "states": listed,
            });
            let text = serde_json::to_string_pretty(&doc).expect("serializes");
            println!("{text}");
            if let Some(path) = out {
                write_artifact(&path, &text)?;
            }
            Ok(())
        }
        Command::Simulate {
            common,
            sin,
            d,
            init,
            t_end,
            abs_tol,
            rel_tol,
            samples,
            out,
        } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.simulate.clone().unwrap_or_default();
            let s_in = require(sin.or(block.s_in), "--sin")?;
            let d = require(d.or(block.d), "--d")?;
            let init = match init {
                Some(text) => parse_init(&text)?,
                None => block.init.unwrap_or([1.0, 1.0, 1.0]),
            };
            let t_end = t_end.or(block.t_end).unwrap_or(500.0);
            let abs_tol = abs_tol.or(block.abs_tol).unwrap_or(1e-8);
            let rel_tol = rel_tol.or(block.rel_tol).unwrap_or(1e-8);
            let samples = samples.or(block.samples).unwrap_or(2000);
            let out = out.or(block.out).unwrap_or_else(|| "trajectory.csv".into());
            let op = OperatingPoint::new(s_in, d);
            let traj = integrate_sampled(
                &State::new(init[0], init[1], init[2]),
                &op,
                &params,
                t_end,
                (abs_tol, rel_tol),
                samples,
            )?;
            let config_line = resolved_json(
                "simulate",
                &params,
                json!({
                    "s_in": s_in, "d": d, "init": init, "t_end": t_end,
                    "abs_tol": abs_tol, "rel_tol": rel_tol, "samples": samples,
                }),
            );
            write_artifact(&out, &csv_with_config(&config_line, &traj.to_csv()))?;
            println!(
                "{}",
                json!({
                    "artifacts": [out],
                    "accepted_steps": traj.accepted_steps,
                    "rejected_steps": traj.rejected_steps,
                })
            );
            Ok(())
        }
        Command::Bifurcation {
            common,
            d,
            sin,
            cycles,
            out,
        } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.bifurcation.clone().unwrap_or_default();
            let d = require(d.or(block.d), "--d")?;
            let s_in = match sin {
                Some(text) => parse_range(&text, "--sin")?,
                None => require(block.s_in, "--sin")?,
            };
            let cycles = cycles || block.cycles.unwrap_or(false);
            let prefix = out.or(block.out).unwrap_or_else(|| "bifurcation".into());
            let bd = bifurcation_1d(d, (s_in[0], s_in[1]), &params, cycles)?;
            let config_line = resolved_json(
                "bifurcation",
                &params,
                json!({"d": d, "s_in": s_in, "cycles": cycles}),
            );
            let branches_path = prefixed(&prefix, "_branches.csv");
            write_artifact(
                &branches_path,
                &csv_with_config(&config_line, &export::branches_csv(&bd)),
            )?;
            let events: Vec<_> = bd
                .events
                .iter()
                .map(|e| {
                    json!({
                        "s_in": e.s_in,
                        "type": e.event.to_string(),
                        "s_star": e.s_star,
                    })
                })
                .collect();
            let events_doc = serde_json::to_string_pretty(&json!({
                "config": serde_json::from_str::<serde_json::Value>(&config_line).unwrap(),
                "events": events,
                "notes": bd.notes,
            }))
            .expect("serializes");
            let events_path = prefixed(&prefix, "_events.json");
            write_artifact(&events_path, &events_doc)?;
            println!("{}", json!({"artifacts": [branches_path, events_path]}));
            Ok(())
        }
        Command::OperatingDiagram {
            common,
            sin,
            d,
            grid,
            out,
        } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.operating_diagram.clone().unwrap_or_default();
            let s_in = match sin {
                Some(text) => parse_range(&text, "--sin")?,
                None => require(block.s_in, "--sin")?,
            };
            let d = match d {
                Some(text) => parse_range(&text, "--d")?,
                None => require(block.d, "--d")?,
            };
            let grid = match grid {
                Some(text) => parse_grid(&text)?,
                None => block.grid.unwrap_or([200, 200]),
            };
            let prefix = out.or(block.out).unwrap_or_else(|| "diagram".into());
            let diag = operating_diagram(
                (s_in[0], s_in[1]),
                (d[0], d[1]),
                (grid[0], grid[1]),
                &params,
            )?;
            let config_line = resolved_json(
                "operating-diagram",
                &params,
                json!({"s_in": s_in, "d": d, "grid": grid}),
            );
            let grid_path = prefixed(&prefix, "_grid.csv");
            let curves_path = prefixed(&prefix, "_curves.csv");
            let points_path = prefixed(&prefix, "_points.csv");
            let svg_path = prefixed(&prefix, ".svg");
            write_artifact(
                &grid_path,
                &csv_with_config(&config_line, &export::grid_csv(&diag)),
            )?;
            write_artifact(
                &curves_path,
                &csv_with_config(&config_line, &export::curves_csv(&diag.curves)),
            )?;
            write_artifact(
                &points_path,
                &csv_with_config(&config_line, &export::special_points_csv(&diag.special_points)),
            )?;
            write_artifact(
                &svg_path,
                &export::diagram_svg(&diag, Some(&format!("config: {config_line}"))),
            )?;
            println!(
                "{}",
                json!({
                    "artifacts": [grid_path, curves_path, points_path, svg_path],
                    "labels": diag.labels_present().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "agreement": diag.agreement,
                })
            );
            Ok(())
        }
        Command::SpecialPoints { common, d, out } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.special_points.clone().unwrap_or_default();
            let d = match d {
                Some(text) => parse_range(&text, "--d")?,
                None => require(block.d, "--d")?,
            };
            let out = out
                .or(block.out)
                .unwrap_or_else(|| "special_points.csv".into());
            let points = special_points(&params, (d[0], d[1]));
            let config_line = resolved_json("special-points", &params, json!({"d": d}));
            write_artifact(
                &out,
                &csv_with_config(&config_line, &export::special_points_csv(&points)),
            )?;
            println!("{}", json!({"artifacts": [out], "count": points.len()}));
            Ok(())
        }
        Command::Sweep {
            common,
            pairs,
            sin,
            d,
            grid,
            out,
        } => {
            let cfg = load_scenario(&common)?;
            let params = cfg.resolve_params().map_err(CliError::Config)?;
            let block = cfg.sweep.clone().unwrap_or_default();
            let pairs = match pairs {
                Some(text) => parse_pairs(&text)?,
                None => require(block.pairs, "--pairs")?,
            };
            let s_in = match sin {
                Some(text) => parse_range(&text, "--sin")?,
                None => require(block.s_in, "--sin")?,
            };
            let d = match d {
                Some(text) => parse_range(&text, "--d")?,
                None => require(block.d, "--d")?,
            };
            let grid = match grid {
                Some(text) => parse_grid(&text)?,
                None => block.grid.unwrap_or([200, 200]),
            };
            let dir = out.or(block.out).unwrap_or_else(|| "sweep".into());
            let pair_tuples: Vec<(f64, f64)> = pairs.iter().map(|p| (p[0], p[1])).collect();
            let entries = flocculation_sweep(
                &pair_tuples,
                (s_in[0], s_in[1]),
                (d[0], d[1]),
                (grid[0], grid[1]),
                &params,
            )?;
            let mut artifacts = Vec::new();
            let mut summary = Vec::new();
            for entry in &entries {
                let swept = params.with_flocculation(entry.a, entry.b);
                let config_line = resolved_json(
                    "sweep",
                    &swept,
                    json!({"s_in": s_in, "d": d, "grid": grid, "a": entry.a, "b": entry.b}),
                );
                let stem = format!("a{}_b{}", entry.a, entry.b).replace('.', "p");
                let grid_path = dir.join(format!("{stem}_grid.csv"));
                let svg_path = dir.join(format!("{stem}.svg"));
                write_artifact(
                    &grid_path,
                    &csv_with_config(&config_line, &export::grid_csv(&entry.diagram)),
                )?;
                write_artifact(
                    &svg_path,
                    &export::diagram_svg(&entry.diagram, Some(&format!("config: {config_line}"))),
                )?;
                artifacts.push(grid_path);
                artifacts.push(svg_path);
                summary.push(json!({
                    "a": entry.a,
                    "b": entry.b,
                    "labels": entry.diagram.labels_present().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "i3_area": entry.diagram.region_area(RegionTag::I3),
                    "agreement": entry.diagram.agreement,
                }));
            }
            let summary_path = dir.join("summary.json");
            let summary_doc = serde_json::to_string_pretty(&json!({
                "config": serde_json::from_str::<serde_json::Value>(&resolved_json(
                    "sweep", &params,
                    json!({"s_in": s_in, "d": d, "grid": grid, "pairs": pairs}),
                )).unwrap(),
                "entries": summary,
            }))
            .expect("serializes");
            write_artifact(&summary_path, &summary_doc)?;
            artifacts.push(summary_path);
            println!("{}", json!({ "artifacts": artifacts }));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("FLOCSTAT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": e.kind(), "message": e.message()}})
            );
            ExitCode::from(e.code())
        }
    }
}
