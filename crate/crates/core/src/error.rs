use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClockError {
    #[error("rate multiplier must be positive and finite, got {0}")]
    NonPositiveRate(f64),
    #[error("hardware clock ran backwards: anchor {anchor_hw_us} µs, read {hw_now_us} µs")]
    Backwards { anchor_hw_us: i64, hw_now_us: i64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("topology dimensions must be positive and give at least two nodes ({0})")]
    BadDimensions(String),
    #[error("edge ({0}, {1}) is invalid: {2}")]
    BadEdge(usize, usize, String),
    #[error("topology is not connected")]
    Disconnected,
    #[error("no connected random geometric graph after {0} attempts")]
    NoConnectedInstance(usize),
    #[error("symmetric eigen procedure did not converge")]
    EigenNonConvergence,
    #[error("eigen residual {residual:e} exceeds tolerance {tolerance:e}")]
    EigenResidual { residual: f64, tolerance: f64 },
    #[error("edge list parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error("inputs to the rate-multiplier update must be positive (phi_i={phi_i}, phi_hat={phi_hat}, phi_j={phi_j}, rho={rho_v})")]
    NonPositiveInput { phi_i: f64, phi_hat: f64, phi_j: f64, rho_v: f64 },
    #[error("averaging factor must lie in (0, 1), got {0}")]
    BadAveragingFactor(f64),
    #[error("sample lists must have length {expected}, got {d} delay and {skew} skew samples")]
    LengthMismatch { expected: usize, d: usize, skew: usize },
    #[error("hop count must be at least 1")]
    ZeroHops,
    #[error(transparent)]
    Clock(#[from] ClockError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error("event queue exceeded its cap of {cap} pending events at t = {at_s:.3} s")]
    QueueOverflow { cap: usize, at_s: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("run did not converge")]
    NotConverged,
    #[error("need at least {needed} post-convergence probes, have {have}")]
    TooFewProbes { needed: usize, have: usize },
    #[error("series is empty")]
    Empty,
    #[error("bin width must be positive, got {0}")]
    BadBinWidth(f64),
    #[error("group {0} has fewer than {1} runs")]
    TooFewRuns(String, usize),
}
