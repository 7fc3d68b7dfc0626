//! `macts`: run scenarios, sweeps and spectral reports from the command line.

mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use macts::batch::run_batch_map;
use macts::config::{apply_override, parse_assignment};
use macts::graph::{spectral_report, SpectralReport, Topology};
use macts::metrics::{convergence_table, histogram, steady_state_series, Metric, RunSummary};
use macts::report;
use macts::{ProtocolKind, ScenarioConfig, SimError};

use crate::sweep::SweepSpec;

/// Largest topology for which `run` also reports the spectrum.
const SPECTRAL_NODE_LIMIT: usize = 600;

#[derive(Parser)]
#[command(name = "macts", version, about = "Average-consensus clock synchronization simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML). Defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Sets a config key, e.g. `--set h_initial=4` or `--set topology.rows=6`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, env = "MACTS_OUT_DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario; writes trace.csv, summary.txt and histogram.csv.
    Run(Common),
    /// Simulate the product of a sweep spec; writes table.csv and runs.csv.
    Sweep(Common),
    /// Print λ₂ of the H-hop union for H = 1..=h_max.
    Spectral {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        h_max: usize,
    },
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(_) | SimError::Graph(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(c) => cmd_run(&c),
        Command::Sweep(c) => cmd_sweep(&c),
        Command::Spectral { common, h_max } => cmd_spectral(&common, h_max),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("config error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("runtime error: {m}");
            ExitCode::from(2)
        }
    }
}

fn read_table(path: Option<&Path>) -> Result<toml::Table, Failure> {
    let Some(path) = path else { return Ok(toml::Table::new()) };
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn apply_sets(table: &mut toml::Table, sets: &[String]) -> Result<(), Failure> {
    for s in sets {
        let (k, v) = parse_assignment(s)?;
        apply_override(table, &k, &v)?;
    }
    Ok(())
}

/// Config file, then `--set`, then `--seed`.
fn resolve_scenario(c: &Common) -> Result<ScenarioConfig, Failure> {
    let mut table = read_table(c.config.as_deref())?;
    apply_sets(&mut table, &c.set)?;
    let mut cfg = ScenarioConfig::from_table(table)?;
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(c: &Common) -> PathBuf {
    c.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn write_files(dir: &Path, files: &[(&str, String)]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn spectral_ladder(topology: &Topology, h_max: usize) -> Result<Vec<SpectralReport>, Failure> {
    (1..=h_max).map(|h| spectral_report(topology, h).map_err(|e| Failure::from(SimError::from(e)))).collect()
}

fn cmd_run(c: &Common) -> Result<(), Failure> {
    let cfg = resolve_scenario(c)?;
    let topology = cfg.topology.build()?;
    if !topology.is_connected() {
        return Err(Failure::Config(format!("topology {} is not connected", cfg.topology.label())));
    }
    let spectral = if topology.n() <= SPECTRAL_NODE_LIMIT {
        let hops = match cfg.protocol {
            ProtocolKind::Ats => 1,
            ProtocolKind::Macts => cfg.h_initial.max(1) as usize,
        };
        Some(spectral_report(&topology, hops).map_err(|e| Failure::from(SimError::from(e)))?)
    } else {
        None
    };
    let trace = macts::simulator::run_on_topology(&cfg, &topology)?;

    let mut files = vec![
        ("trace.csv", report::trace_csv(&cfg, &trace)),
        ("summary.txt", report::render_record(&report::summary_record(&cfg, &trace, spectral.as_ref()))),
    ];
    if let Ok(series) = steady_state_series(&trace, Metric::MaxLocal) {
        if let Ok(bins) = histogram(&series, 1.0) {
            files.push(("histogram.csv", report::histogram_csv(&report::provenance(&cfg), &bins)));
        }
    }
    let dir = out_dir(c);
    write_files(&dir, &files)?;

    match trace.convergence_time_s {
        Some(t) => println!("converged at {t} s ({:.2} min), {} messages", t / 60.0, trace.messages_at_convergence().unwrap_or(0)),
        None => println!("not converged within {} s", cfg.sim_duration_s),
    }
    match spectral {
        Some(r) => println!(
            "lambda2 H={}: union {:.6}, bounds [{:.6}, {:.6}]",
            r.hops, r.lambda2_union, r.lower_bound, r.upper_bound
        ),
        None => println!("lambda2 skipped: {} nodes above {SPECTRAL_NODE_LIMIT}", topology.n()),
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn resolve_sweep(c: &Common) -> Result<SweepSpec, Failure> {
    let mut table = read_table(c.config.as_deref())?;
    {
        let base = table.entry("base").or_insert_with(|| toml::Value::Table(toml::Table::new()));
        let base = base.as_table_mut().ok_or_else(|| Failure::Config("`base` must be a table".into()))?;
        apply_sets(base, &c.set)?;
    }
    let mut spec: SweepSpec = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Failure::Config(e.to_string()))?;
    if let Some(seed) = c.seed {
        spec.sweep.seed = Some(vec![seed]);
    }
    Ok(spec)
}

fn cmd_sweep(c: &Common) -> Result<(), Failure> {
    let spec = resolve_sweep(c)?;
    let configs = spec.expand()?;
    for cfg in &configs {
        let t = cfg.topology.build()?;
        if !t.is_connected() {
            return Err(Failure::Config(format!("topology {} is not connected", cfg.topology.label())));
        }
    }
    let results = run_batch_map(&configs, |cfg, trace| {
        RunSummary::from_trace(cfg.protocol.label(), &cfg.topology.label(), cfg.h_initial, cfg.seed, &trace)
    });

    let provenance = spec.to_toml_string();
    let mut runs_csv = report::comment_block(&provenance);
    runs_csv.push_str("protocol,topology,h_initial,seed,convergence_time_s,msgs_at_convergence,status\n");
    let mut ok = Vec::new();
    let mut failed = 0usize;
    for (cfg, res) in configs.iter().zip(results) {
        let label = cfg.topology.label();
        match res {
            Ok(s) => {
                runs_csv.push_str(&format!(
                    "{},{},{},{},{},{},ok\n",
                    s.protocol,
                    label,
                    s.h_initial,
                    s.seed,
                    s.convergence_time_s.map(|t| t.to_string()).unwrap_or_else(|| "none".into()),
                    s.msgs_at_convergence.map(|m| m.to_string()).unwrap_or_else(|| "none".into()),
                ));
                ok.push(s);
            }
            Err(e) => {
                failed += 1;
                let msg = e.to_string().replace([',', '\n'], ";");
                runs_csv.push_str(&format!("{},{},{},{},none,none,failed: {msg}\n", cfg.protocol.label(), label, cfg.h_initial, cfg.seed));
            }
        }
    }
    let mut files = vec![("runs.csv", runs_csv)];
    match convergence_table(&ok) {
        Ok(rows) => {
            for r in &rows {
                let med = r.median_s.map(|s| format!("{:.2} min", s / 60.0)).unwrap_or_else(|| "none converged within horizon".into());
                println!("{} {} H={}: median {med}, {}/{} converged", r.protocol, r.topology, r.h_initial, r.converged, r.runs);
            }
            files.push(("table.csv", report::table_csv(&report::comment_block(&provenance), &rows)));
        }
        Err(e) => eprintln!("no aggregate table: {e}"),
    }
    let dir = out_dir(c);
    write_files(&dir, &files)?;
    println!("wrote {}", dir.display());
    if failed > 0 {
        return Err(Failure::Runtime(format!("{failed} of {} runs failed", configs.len())));
    }
    Ok(())
}

fn cmd_spectral(c: &Common, h_max: usize) -> Result<(), Failure> {
    if h_max == 0 {
        return Err(Failure::Config("--h-max must be at least 1".into()));
    }
    let cfg = resolve_scenario(c)?;
    let topology = cfg.topology.build()?;
    if !topology.is_connected() {
        return Err(Failure::Config(format!("topology {} is not connected", cfg.topology.label())));
    }
    let reports = spectral_ladder(&topology, h_max)?;
    let provenance = format!("topology = {}\nh_max = {h_max}\n{}", cfg.topology.label(), cfg.to_toml_string());
    let csv = report::spectral_csv(&report::comment_block(&provenance), &reports);
    print!("{}", report::strip_comments(&csv));
    if c.out.is_some() {
        let dir = out_dir(c);
        write_files(&dir, &[("spectral.csv", csv)])?;
    }
    Ok(())
}
