//! Output formats.
//!
//! Every CSV starts with `#` comment lines carrying the resolved input
//! (config TOML, seed), so a file is enough to reproduce the run that
//! wrote it. The summary record is flat `key = value` lines; config keys
//! appear under `config.` in the same dotted form `--set` accepts.

use std::fmt::Write as _;

use crate::config::ScenarioConfig;
use crate::graph::SpectralReport;
use crate::metrics::{Bin, Metric, TableRow};
use crate::simulator::RunTrace;

pub const TRACE_HEADER: &str = "probe_time_s,max_global_us,avg_global_us,max_local_us,avg_local_us,msg_total,msg_forwards";
pub const TABLE_HEADER: &str = "protocol,topology,mean_us,std,max_us,conv_time_min_lo,conv_time_min_hi,msgs_at_convergence";
pub const HISTOGRAM_HEADER: &str = "bin_left_us,count";
pub const SPECTRAL_HEADER: &str = "H,lambda2_union,lower_bound,upper_bound";

/// Prefixes each line of `text` with `# `.
pub fn comment_block(text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {line}");
        }
    }
    out
}

/// Provenance header for outputs of a single scenario.
pub fn provenance(cfg: &ScenarioConfig) -> String {
    let mut out = format!("# macts {}\n# seed = {}\n", env!("CARGO_PKG_VERSION"), cfg.seed);
    out.push_str(&comment_block(&cfg.to_toml_string()));
    out
}

/// Strips leading `#` lines, e.g. to compare the data part of two files.
pub fn strip_comments(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect()
}

/// Inverse of [`provenance`]: the config embedded in a file's header.
pub fn config_from_provenance(text: &str) -> Option<ScenarioConfig> {
    let body: String = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .skip(2)
        .map(|l| format!("{}\n", l.strip_prefix("# ").unwrap_or("")))
        .collect();
    ScenarioConfig::from_toml_str(&body).ok()
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".to_string())
}

pub fn trace_csv(cfg: &ScenarioConfig, trace: &RunTrace) -> String {
    let mut out = provenance(cfg);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for p in &trace.probes {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(p.time_s),
            num(p.max_global_us),
            num(p.avg_global_us),
            num(p.max_local_us),
            num(p.avg_local_us),
            p.msg_total(),
            p.msg_forwards
        );
    }
    out
}

/// Config keys flattened to dotted paths with TOML literal values.
pub fn flatten_config(cfg: &ScenarioConfig) -> Vec<(String, String)> {
    let table = toml::Table::try_from(cfg).expect("scenario config always serializes");
    let mut out = Vec::new();
    flatten_into("config", &table, &mut out);
    out
}

fn flatten_into(prefix: &str, table: &toml::Table, out: &mut Vec<(String, String)>) {
    for (k, v) in table {
        let key = format!("{prefix}.{k}");
        match v {
            toml::Value::Table(t) => flatten_into(&key, t, out),
            other => out.push((key, other.to_string())),
        }
    }
}

/// Flat record describing one run.
pub fn summary_record(cfg: &ScenarioConfig, trace: &RunTrace, spectral: Option<&SpectralReport>) -> Vec<(String, String)> {
    let mut rec: Vec<(String, String)> = vec![
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("seed".into(), cfg.seed.to_string()),
        ("protocol".into(), cfg.protocol_label()),
        ("topology".into(), cfg.topology.label()),
        ("convergence_time_s".into(), opt(trace.convergence_time_s)),
        ("convergence_rule".into(), format!("{:?}", cfg.convergence_rule).to_lowercase()),
        ("threshold_us".into(), num(trace.threshold_us)),
        ("msgs_at_convergence".into(), trace.messages_at_convergence().map(|m| m.to_string()).unwrap_or_else(|| "none".into())),
    ];
    if let Some(last) = trace.probes.last() {
        rec.push(("probes".into(), trace.probes.len().to_string()));
        rec.push(("msg_origin_total".into(), last.msg_origin.to_string()));
        rec.push(("msg_forwards_total".into(), last.msg_forwards.to_string()));
        rec.push(("final_max_global_us".into(), num(last.max_global_us)));
        rec.push(("final_h_max".into(), last.h_current.iter().max().copied().unwrap_or(0).to_string()));
    }
    rec.push(("dropped_malformed".into(), trace.dropped_malformed.to_string()));
    for (name, metric) in [("steady_max_global", Metric::MaxGlobal), ("steady_max_local", Metric::MaxLocal)] {
        match crate::metrics::steady_state_summary(trace, metric) {
            Ok(s) => {
                rec.push((format!("{name}.mean_us"), num(s.mean)));
                rec.push((format!("{name}.std_us"), num(s.std)));
                rec.push((format!("{name}.max_us"), num(s.max)));
                rec.push((format!("{name}.ci95_mean_lo"), num(s.ci95_mean_lo)));
                rec.push((format!("{name}.ci95_mean_hi"), num(s.ci95_mean_hi)));
                rec.push((format!("{name}.ci95_std_lo"), num(s.ci95_std_lo)));
                rec.push((format!("{name}.ci95_std_hi"), num(s.ci95_std_hi)));
                rec.push((format!("{name}.samples"), s.sample_count.to_string()));
            }
            Err(e) => rec.push((format!("{name}.status"), format!("{e}"))),
        }
    }
    if let Some(r) = spectral {
        rec.extend(r.to_record("spectral."));
    }
    rec.extend(flatten_config(cfg));
    rec
}

pub fn render_record(rec: &[(String, String)]) -> String {
    rec.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Aggregate table. Convergence times are in minutes. `header` is a
/// ready-made comment block such as [`comment_block`] returns.
pub fn table_csv(header: &str, rows: &[TableRow]) -> String {
    let mut out = header.to_string();
    out.push_str(TABLE_HEADER);
    out.push('\n');
    for r in rows {
        let label = if r.protocol == "ats" { r.protocol.clone() } else { format!("{}-h{}", r.protocol, r.h_initial) };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            label,
            r.topology,
            opt(r.mean_us),
            opt(r.std_us),
            opt(r.max_us),
            opt(r.min_s.map(|s| s / 60.0)),
            opt(r.max_s.map(|s| s / 60.0)),
            opt(r.mean_msgs_at_convergence)
        );
    }
    out
}

pub fn histogram_csv(header: &str, bins: &[Bin]) -> String {
    let mut out = header.to_string();
    out.push_str(HISTOGRAM_HEADER);
    out.push('\n');
    for b in bins {
        let _ = writeln!(out, "{},{}", num(b.left_us), b.count);
    }
    out
}

pub fn spectral_csv(header: &str, reports: &[SpectralReport]) -> String {
    let mut out = header.to_string();
    out.push_str(SPECTRAL_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{},{},{},{}", r.hops, num(r.lambda2_union), num(r.lower_bound), num(r.upper_bound));
    }
    out
}
