//! Scenario description.
//!
//! Scenarios are TOML documents. Every key names its unit (`_us`, `_s`,
//! `_ppm`); missing keys fall back to the defaults of [`ScenarioConfig`].

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::graph::{self, Topology};
use crate::protocol::{LocalErrorMode, ProtocolParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Grid { rows: usize, cols: usize },
    Line { n: usize },
    RandomGeometric { n: usize, radius: f64, seed: u64 },
    /// `i j weight` lines; see [`Topology::from_edge_list`].
    EdgeList { path: PathBuf },
}

impl TopologySpec {
    pub fn build(&self) -> Result<Topology, SimError> {
        let t = match self {
            Self::Grid { rows, cols } => graph::build_grid(*rows, *cols)?,
            Self::Line { n } => graph::build_line(*n)?,
            Self::RandomGeometric { n, radius, seed } => graph::build_random_geometric(*n, *radius, *seed)?,
            Self::EdgeList { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| SimError::Config(format!("cannot read edge list {}: {e}", path.display())))?;
                Topology::from_edge_list(&text)?
            }
        };
        Ok(t)
    }

    /// Short label such as `grid5x5`.
    pub fn label(&self) -> String {
        match self {
            Self::Grid { rows, cols } => format!("grid{rows}x{cols}"),
            Self::Line { n } => format!("line{n}"),
            Self::RandomGeometric { n, radius, seed } => format!("rgg{n}_r{radius}_s{seed}"),
            Self::EdgeList { path } => format!("edges:{}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Single-hop baseline.
    Ats,
    /// Multi-hop protocol with adaptive hop depth.
    Macts,
}

impl ProtocolKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Ats => "ats",
            Self::Macts => "macts",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceRule {
    /// First probe after which every probe stays under the threshold.
    #[default]
    Sustained,
    /// First probe under the threshold.
    FirstCrossing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub protocol: ProtocolKind,
    pub topology: TopologySpec,
    pub seed: u64,
    pub sim_duration_s: f64,
    pub broadcast_period_s: f64,
    pub delay_mean_us: f64,
    pub delay_std_us: f64,
    pub drift_ppm_bound: f64,
    pub boot_offset_max_s: f64,
    pub h_initial: u32,
    pub xi_us: f64,
    pub rho_v: f64,
    pub d_fixed_us: f64,
    /// Delay compensation used by the single-hop baseline.
    pub ats_d_fixed_us: f64,
    pub forward_latency_us: f64,
    pub local_error: LocalErrorMode,
    pub min_skew_baseline_s: f64,
    pub stale_after_periods: f64,
    pub measurement_interval_s: f64,
    pub convergence_threshold_us: f64,
    pub convergence_rule: ConvergenceRule,
    /// Reserved; must stay 0 for validated runs.
    pub loss_probability: f64,
    pub event_queue_cap: usize,
    /// Keep one record per received packet (offset residual diagnostics).
    pub record_offset_samples: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            protocol: ProtocolKind::Macts,
            topology: TopologySpec::Grid { rows: 5, cols: 5 },
            seed: 1,
            sim_duration_s: 3600.0,
            broadcast_period_s: 30.0,
            delay_mean_us: 3.33,
            delay_std_us: 0.07,
            drift_ppm_bound: 40.0,
            boot_offset_max_s: 500.0,
            h_initial: 2,
            xi_us: 5.0,
            rho_v: 0.5,
            d_fixed_us: 3.33,
            ats_d_fixed_us: 0.0,
            forward_latency_us: 500.0,
            local_error: LocalErrorMode::Compensated,
            min_skew_baseline_s: 28.5,
            stale_after_periods: 2.0,
            measurement_interval_s: 10.0,
            convergence_threshold_us: 20.0,
            convergence_rule: ConvergenceRule::Sustained,
            loss_probability: 0.0,
            event_queue_cap: 50_000_000,
            record_offset_samples: false,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn from_table(table: toml::Table) -> Result<Self, SimError> {
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| SimError::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config always serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |m: &str| Err(SimError::Config(m.to_string()));
        if !(self.delay_mean_us > 0.0) {
            return fail("delay_mean_us must be positive");
        }
        if !(self.delay_std_us >= 0.0) {
            return fail("delay_std_us must be non-negative");
        }
        if !(self.measurement_interval_s > 0.0) {
            return fail("measurement_interval_s must be positive");
        }
        if !(self.convergence_threshold_us > 0.0) {
            return fail("convergence_threshold_us must be positive");
        }
        if !(self.broadcast_period_s > 0.0) {
            return fail("broadcast_period_s must be positive");
        }
        if !(self.sim_duration_s > 0.0) {
            return fail("sim_duration_s must be positive");
        }
        if !(self.drift_ppm_bound >= 0.0 && self.drift_ppm_bound < 1e6) {
            return fail("drift_ppm_bound must lie in [0, 1e6)");
        }
        if !(self.boot_offset_max_s >= 0.0) {
            return fail("boot_offset_max_s must be non-negative");
        }
        if !(self.forward_latency_us >= 0.0) {
            return fail("forward_latency_us must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.loss_probability) {
            return fail("loss_probability must lie in [0, 1]");
        }
        self.protocol_params().validate().map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn protocol_params(&self) -> ProtocolParams {
        ProtocolParams {
            h_initial: self.h_initial,
            xi_us: self.xi_us,
            rho_v: self.rho_v,
            d_fixed_us: self.d_fixed_us,
            broadcast_period_s: self.broadcast_period_s,
            forward_latency_us: self.forward_latency_us,
            local_error: self.local_error,
            min_skew_baseline_us: self.min_skew_baseline_s * 1e6,
            stale_after_periods: self.stale_after_periods,
        }
    }

    /// Label used to group runs: `ats`, or `macts-h<H>`.
    pub fn protocol_label(&self) -> String {
        match self.protocol {
            ProtocolKind::Ats => "ats".to_string(),
            ProtocolKind::Macts => format!("macts-h{}", self.h_initial),
        }
    }
}

/// Sets `key` (dotted for nested tables) to `value` in a config table.
/// The value is read as a TOML literal when possible, otherwise as a
/// bare string.
pub fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<(), SimError> {
    let parsed = parse_literal(value);
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().filter(|k| !k.is_empty()).ok_or_else(|| SimError::Config(format!("empty override key {key:?}")))?;
    let mut cursor = table;
    for part in parts {
        let entry = cursor.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cursor = entry
            .as_table_mut()
            .ok_or_else(|| SimError::Config(format!("override {key:?}: {part:?} is not a table")))?;
    }
    cursor.insert(last.to_string(), parsed);
    Ok(())
}

fn parse_literal(value: &str) -> toml::Value {
    let doc = format!("v = {value}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(value.to_string())),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

/// Parses `key=value`.
pub fn parse_assignment(text: &str) -> Result<(String, String), SimError> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| SimError::Config(format!("expected key=value, got {text:?}")))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}
