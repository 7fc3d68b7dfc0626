//! Average-consensus time synchronization for wireless sensor networks.
//!
//! * [`clock`]: drifting hardware clocks and rate-adjustable logical clocks.
//! * [`graph`]: topologies, Laplacians, algebraic connectivity and H-hop
//!   augmentation.
//! * [`protocol`]: the multi-hop node state machine and the single-hop
//!   baseline.
//! * [`simulator`]: seeded discrete-event engine and sink-style probes.
//! * [`metrics`]: steady-state statistics, histograms, convergence tables.
//! * [`report`]: CSV and key-value output formats.
//! * [`batch`]: scenario-parallel execution.

pub mod batch;
pub mod clock;
pub mod config;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod par;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod simulator;

pub use config::{ConvergenceRule, ProtocolKind, ScenarioConfig, TopologySpec};
pub use error::{ClockError, GraphError, MetricsError, ProtocolError, SimError};
pub use graph::{SpectralReport, Topology};
pub use simulator::{run_scenario, RunTrace};
