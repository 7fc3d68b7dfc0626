//! Many independent runs at once.
//!
//! Runs share nothing, so a batch is data-parallel over scenarios; each
//! run's event loop stays single-threaded and its trace does not depend on
//! the worker count.

use crate::config::ScenarioConfig;
use crate::error::SimError;
use crate::par::*;
use crate::simulator::{run_scenario, RunTrace};

/// Runs every scenario, in parallel when the `parallel` feature is on.
/// Results keep input order.
pub fn run_batch(configs: &[ScenarioConfig]) -> Vec<Result<RunTrace, SimError>> {
    configs.par_iter().map(run_scenario).collect()
}

/// Same as [`run_batch`], always on the calling thread.
pub fn run_batch_sequential(configs: &[ScenarioConfig]) -> Vec<Result<RunTrace, SimError>> {
    configs.iter().map(run_scenario).collect()
}

/// Runs every scenario and reduces each trace with `f` as soon as it
/// finishes, so large batches need not hold every trace at once.
pub fn run_batch_map<T, F>(configs: &[ScenarioConfig], f: F) -> Vec<Result<T, SimError>>
where
    T: Send,
    F: Fn(&ScenarioConfig, RunTrace) -> T + Sync + Send,
{
    configs.par_iter().map(|c| run_scenario(c).map(|t| f(c, t))).collect()
}

/// Sequential counterpart of [`run_batch_map`].
pub fn run_batch_map_sequential<T, F>(configs: &[ScenarioConfig], f: F) -> Vec<Result<T, SimError>>
where
    F: Fn(&ScenarioConfig, RunTrace) -> T,
{
    configs.iter().map(|c| run_scenario(c).map(|t| f(c, t))).collect()
}

/// One config per seed.
pub fn seed_sweep(base: &ScenarioConfig, seeds: impl IntoIterator<Item = u64>) -> Vec<ScenarioConfig> {
    seeds.into_iter().map(|seed| ScenarioConfig { seed, ..base.clone() }).collect()
}
