//! Sweep specifications: a base scenario and axes to take the product of.

use macts::{ProtocolKind, ScenarioConfig, SimError, TopologySpec};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MAX_RUNS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    pub h_initial: Option<Vec<u32>>,
    pub topology: Option<Vec<TopologySpec>>,
    pub seed: Option<Vec<u64>>,
    pub protocol: Option<Vec<ProtocolKind>>,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
}

fn default_max_runs() -> usize {
    DEFAULT_MAX_RUNS
}

impl Default for Axes {
    fn default() -> Self {
        Self { h_initial: None, topology: None, seed: None, protocol: None, max_runs: DEFAULT_MAX_RUNS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub sweep: Axes,
    #[serde(default)]
    pub base: ScenarioConfig,
}

fn axis<T: Clone>(name: &str, values: &Option<Vec<T>>, fallback: T) -> Result<Vec<T>, SimError> {
    match values {
        None => Ok(vec![fallback]),
        Some(v) if v.is_empty() => Err(SimError::Config(format!("sweep axis {name:?} is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

impl SweepSpec {
    /// The product grid, ordered protocol, topology, H, seed.
    pub fn expand(&self) -> Result<Vec<ScenarioConfig>, SimError> {
        let protocols = axis("protocol", &self.sweep.protocol, self.base.protocol)?;
        let topologies = axis("topology", &self.sweep.topology, self.base.topology.clone())?;
        let hs = axis("h_initial", &self.sweep.h_initial, self.base.h_initial)?;
        let seeds = axis("seed", &self.sweep.seed, self.base.seed)?;
        let total = protocols.len() * topologies.len() * hs.len() * seeds.len();
        if total > self.sweep.max_runs {
            return Err(SimError::Config(format!("sweep has {total} runs, above max_runs = {}", self.sweep.max_runs)));
        }
        let mut out = Vec::with_capacity(total);
        for &protocol in &protocols {
            for topology in &topologies {
                for &h in &hs {
                    // The single-hop baseline ignores H; one H value is enough.
                    if protocol == ProtocolKind::Ats && self.sweep.h_initial.is_some() && h != hs[0] {
                        continue;
                    }
                    for &seed in &seeds {
                        let h_initial = if protocol == ProtocolKind::Ats { 1 } else { h };
                        let cfg = ScenarioConfig { protocol, topology: topology.clone(), h_initial, seed, ..self.base.clone() };
                        cfg.validate()?;
                        out.push(cfg);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("sweep spec always serializes")
    }
}
