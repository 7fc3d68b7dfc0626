//! Per-node consensus time synchronization.
//!
//! Every node periodically broadcasts `⟨H, L, φ, hops⟩`. A receiver
//!
//! 1. estimates the relative skew of the transmitter's oscillator from two
//!    hardware timestamp pairs,
//! 2. estimates the logical offset from one packet, compensating the mean
//!    timestamping delay,
//! 3. averages its rate multiplier toward `φ̂ · φ_j`, and
//! 4. moves its logical clock halfway toward the transmitter.
//!
//! [`NodeState`] adds multi-hop relaying on top: a packet that has travelled
//! fewer than `H` hops is relayed once per origin broadcast, re-stamped with
//! the relay's own clocks. The hop depth `H` adapts per node: it shrinks
//! while every neighbor agrees within `ξ` and grows back otherwise.
//! [`AtsNode`] is the single-hop baseline without relaying or controller.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clock::{HardwareClock, LogicalClock};
use crate::error::ProtocolError;

/// Broadcast packet. `hop_count` is 0 at the origin and grows by one per
/// relay; `origin_id`/`origin_seq` identify the originating broadcast so a
/// relay forwards each one at most once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncMessage {
    pub hw_ts_us: i64,
    pub logical_ts_us: i64,
    pub phi: f64,
    pub hop_count: u32,
    pub sender_id: usize,
    pub origin_id: usize,
    pub origin_seq: u64,
}

impl SyncMessage {
    /// Same packet identity, fresh transmitter timestamps.
    pub fn restamped(self, hw_ts_us: i64, logical_ts_us: i64, phi: f64) -> Self {
        Self { hw_ts_us, logical_ts_us, phi, ..self }
    }
}

/// How the controller measures a neighbor's disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LocalErrorMode {
    /// `|θ̂|`, the delay-compensated offset estimate.
    #[default]
    Compensated,
    /// `|L_i − L_j|` from raw timestamps.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub h_initial: u32,
    pub xi_us: f64,
    pub rho_v: f64,
    pub d_fixed_us: f64,
    pub broadcast_period_s: f64,
    pub forward_latency_us: f64,
    pub local_error: LocalErrorMode,
    /// Shortest receiver-side baseline accepted for a skew sample.
    pub min_skew_baseline_us: f64,
    /// Neighbors silent for longer than this many periods are ignored by
    /// the controller.
    pub stale_after_periods: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            h_initial: 2,
            xi_us: 5.0,
            rho_v: 0.5,
            d_fixed_us: 3.33,
            broadcast_period_s: 30.0,
            forward_latency_us: 500.0,
            local_error: LocalErrorMode::Compensated,
            min_skew_baseline_us: 28.5e6,
            stale_after_periods: 2.0,
        }
    }
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.h_initial == 0 {
            return Err(ProtocolError::ZeroHops);
        }
        if !(self.rho_v > 0.0 && self.rho_v < 1.0) {
            return Err(ProtocolError::BadAveragingFactor(self.rho_v));
        }
        Ok(())
    }
}

/// What a node remembers about one transmitter.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborRecord {
    pub neighbor_id: usize,
    /// `(receiver H, transmitter H)` of the last packet used as a skew anchor.
    pub hw_old_pair: Option<(i64, i64)>,
    pub phi_hat: f64,
    pub last_local_error_us: f64,
    pub last_heard_hw_us: i64,
}

impl NeighborRecord {
    pub fn new(neighbor_id: usize) -> Self {
        Self { neighbor_id, hw_old_pair: None, phi_hat: 1.0, last_local_error_us: f64::INFINITY, last_heard_hw_us: 0 }
    }

    /// Feeds a new `(receiver H, transmitter H)` pair and returns the skew
    /// estimate in force afterwards. The first pair is only stored. Pairs
    /// closer than `min_baseline_us` to the anchor leave everything as is;
    /// non-increasing timestamps are discarded.
    pub fn estimate_skew(&mut self, hw_rx_us: i64, hw_tx_us: i64, min_baseline_us: f64) -> f64 {
        match self.hw_old_pair {
            None => self.hw_old_pair = Some((hw_rx_us, hw_tx_us)),
            Some((rx_old, tx_old)) => {
                let rx_delta = hw_rx_us - rx_old;
                let tx_delta = hw_tx_us - tx_old;
                if rx_delta <= 0 || tx_delta <= 0 {
                    return self.phi_hat;
                }
                if (rx_delta as f64) < min_baseline_us {
                    return self.phi_hat;
                }
                self.phi_hat = tx_delta as f64 / rx_delta as f64;
                self.hw_old_pair = Some((hw_rx_us, hw_tx_us));
            }
        }
        self.phi_hat
    }
}

/// Offset of the receiver relative to the transmitter from one packet,
/// `L_rx − L_tx − D̂`. Positive means the receiver is ahead.
pub fn estimate_offset(logical_rx_us: f64, logical_tx_us: f64, d_fixed_us: f64) -> f64 {
    logical_rx_us - logical_tx_us - d_fixed_us
}

/// `ρ·φ_i + (1 − ρ)·φ̂·φ_j`.
pub fn update_rate_multiplier(phi_i: f64, phi_hat: f64, phi_j: f64, rho_v: f64) -> Result<f64, ProtocolError> {
    if !(phi_i > 0.0 && phi_hat > 0.0 && phi_j > 0.0) {
        return Err(ProtocolError::NonPositiveInput { phi_i, phi_hat, phi_j, rho_v });
    }
    if !(rho_v > 0.0 && rho_v < 1.0) {
        return Err(ProtocolError::BadAveragingFactor(rho_v));
    }
    Ok(rho_v * phi_i + (1.0 - rho_v) * phi_hat * phi_j)
}

/// Worst-case error gathered along a `k`-hop relay path: the per-hop delay
/// residuals plus the skew error accrued while each relay waits `T_d`.
pub fn by_hop_error_bound(
    k: usize,
    delays_us: &[f64],
    d_fixed_us: f64,
    skew_errors_ppm: &[f64],
    forward_latency_us: f64,
) -> Result<f64, ProtocolError> {
    if k == 0 {
        return Err(ProtocolError::ZeroHops);
    }
    if delays_us.len() != k || skew_errors_ppm.len() != k {
        return Err(ProtocolError::LengthMismatch { expected: k, d: delays_us.len(), skew: skew_errors_ppm.len() });
    }
    let delay_part: f64 = delays_us.iter().map(|d| d - d_fixed_us).sum();
    let skew_part: f64 = skew_errors_ppm.iter().map(|a| a.abs() * forward_latency_us).sum::<f64>() / 1e6;
    Ok(delay_part + skew_part)
}

/// Outcome of processing one packet.
#[derive(Debug, Clone, PartialEq)]
pub struct Reception {
    pub theta_hat_us: f64,
    pub phi_hat: f64,
    /// Relay packet, stamped at the moment of reception. The transmitter
    /// re-stamps it when it actually goes on air.
    pub forward: Option<SyncMessage>,
    pub dropped: bool,
}

impl Reception {
    fn dropped() -> Self {
        Self { theta_hat_us: 0.0, phi_hat: 1.0, forward: None, dropped: true }
    }
}

/// Common interface the simulator drives.
pub trait SyncNode {
    fn id(&self) -> usize;
    fn hardware(&self) -> &HardwareClock;
    fn logical(&self) -> &LogicalClock;
    fn h_current(&self) -> u32;
    fn on_broadcast_timer(&mut self, hw_now_us: i64, logical_now_us: i64) -> SyncMessage;
    fn on_receive(&mut self, msg: &SyncMessage, hw_rx_us: i64, logical_rx_us: i64) -> Result<Reception, ProtocolError>;
    /// Once per local period, before the node's own broadcast.
    fn controller_step(&mut self, _hw_now_us: i64) {}
}

/// Clocks plus per-neighbor estimation, shared by both protocols.
#[derive(Debug, Clone)]
struct Estimator {
    node_id: usize,
    hardware: HardwareClock,
    logical: LogicalClock,
    neighbors: BTreeMap<usize, NeighborRecord>,
    rho_v: f64,
    d_fixed_us: f64,
    min_skew_baseline_us: f64,
    local_error: LocalErrorMode,
    origin_seq: u64,
}

impl Estimator {
    fn broadcast(&mut self, hw_now_us: i64, logical_now_us: i64) -> SyncMessage {
        self.origin_seq += 1;
        SyncMessage {
            hw_ts_us: hw_now_us,
            logical_ts_us: logical_now_us,
            phi: self.logical.phi(),
            hop_count: 0,
            sender_id: self.node_id,
            origin_id: self.node_id,
            origin_seq: self.origin_seq,
        }
    }

    fn absorb(&mut self, msg: &SyncMessage, hw_rx_us: i64, logical_rx_us: i64) -> Result<(f64, f64), ProtocolError> {
        let record = self.neighbors.entry(msg.sender_id).or_insert_with(|| NeighborRecord::new(msg.sender_id));
        let phi_hat = record.estimate_skew(hw_rx_us, msg.hw_ts_us, self.min_skew_baseline_us);
        let theta_hat = estimate_offset(logical_rx_us as f64, msg.logical_ts_us as f64, self.d_fixed_us);
        record.last_local_error_us = match self.local_error {
            LocalErrorMode::Compensated => theta_hat.abs(),
            LocalErrorMode::Raw => (logical_rx_us - msg.logical_ts_us).abs() as f64,
        };
        record.last_heard_hw_us = hw_rx_us;

        let phi = update_rate_multiplier(self.logical.phi(), phi_hat, msg.phi, self.rho_v)?;
        // Halve the disagreement: step toward the transmitter by θ̂/2.
        self.logical = self.logical.apply_update(hw_rx_us, phi, -theta_hat / 2.0)?;
        Ok((theta_hat, phi_hat))
    }
}

/// Multi-hop node with adaptive hop depth.
#[derive(Debug, Clone)]
pub struct NodeState {
    core: Estimator,
    params: ProtocolParams,
    h_current: u32,
    last_forwarded: BTreeMap<usize, u64>,
    dropped_malformed: u64,
}

impl NodeState {
    pub fn new(node_id: usize, hardware: HardwareClock, logical: LogicalClock, params: ProtocolParams) -> Result<Self, ProtocolError> {
        params.validate()?;
        Ok(Self {
            core: Estimator {
                node_id,
                hardware,
                logical,
                neighbors: BTreeMap::new(),
                rho_v: params.rho_v,
                d_fixed_us: params.d_fixed_us,
                min_skew_baseline_us: params.min_skew_baseline_us,
                local_error: params.local_error,
                origin_seq: 0,
            },
            params,
            h_current: params.h_initial,
            last_forwarded: BTreeMap::new(),
            dropped_malformed: 0,
        })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    pub fn neighbor(&self, id: usize) -> Option<&NeighborRecord> {
        self.core.neighbors.get(&id)
    }

    pub fn neighbors(&self) -> impl Iterator<Item = &NeighborRecord> {
        self.core.neighbors.values()
    }

    pub fn dropped_malformed(&self) -> u64 {
        self.dropped_malformed
    }

    pub fn set_h_current(&mut self, h: u32) {
        self.h_current = h.clamp(1, self.params.h_initial);
    }

    /// True when every recently heard neighbor is within `ξ`. No recent
    /// neighbor counts as not converged.
    pub fn locally_converged(&self, hw_now_us: i64) -> bool {
        let horizon = self.params.stale_after_periods * self.params.broadcast_period_s * 1e6;
        let mut any = false;
        for rec in self.core.neighbors.values() {
            if ((hw_now_us - rec.last_heard_hw_us) as f64) > horizon {
                continue;
            }
            any = true;
            if !(rec.last_local_error_us < self.params.xi_us) {
                return false;
            }
        }
        any
    }
}

impl SyncNode for NodeState {
    fn id(&self) -> usize {
        self.core.node_id
    }

    fn hardware(&self) -> &HardwareClock {
        &self.core.hardware
    }

    fn logical(&self) -> &LogicalClock {
        &self.core.logical
    }

    fn h_current(&self) -> u32 {
        self.h_current
    }

    fn on_broadcast_timer(&mut self, hw_now_us: i64, logical_now_us: i64) -> SyncMessage {
        self.core.broadcast(hw_now_us, logical_now_us)
    }

    fn on_receive(&mut self, msg: &SyncMessage, hw_rx_us: i64, logical_rx_us: i64) -> Result<Reception, ProtocolError> {
        if msg.hop_count > self.params.h_initial {
            self.dropped_malformed += 1;
            return Ok(Reception::dropped());
        }
        let (theta_hat_us, phi_hat) = self.core.absorb(msg, hw_rx_us, logical_rx_us)?;

        let next_hop = msg.hop_count + 1;
        let mut forward = None;
        if next_hop < self.h_current && msg.origin_id != self.core.node_id {
            let seen = self.last_forwarded.get(&msg.origin_id).copied().unwrap_or(0);
            if msg.origin_seq > seen {
                self.last_forwarded.insert(msg.origin_id, msg.origin_seq);
                let logical_now = self.core.logical.read(hw_rx_us)?;
                forward = Some(SyncMessage {
                    hw_ts_us: hw_rx_us,
                    logical_ts_us: logical_now,
                    phi: self.core.logical.phi(),
                    hop_count: next_hop,
                    sender_id: self.core.node_id,
                    origin_id: msg.origin_id,
                    origin_seq: msg.origin_seq,
                });
            }
        }
        Ok(Reception { theta_hat_us, phi_hat, forward, dropped: false })
    }

    fn controller_step(&mut self, hw_now_us: i64) {
        self.h_current = if self.locally_converged(hw_now_us) {
            self.h_current.saturating_sub(1).max(1)
        } else {
            (self.h_current + 1).min(self.params.h_initial)
        };
    }
}

/// Single-hop average-consensus baseline.
#[derive(Debug, Clone)]
pub struct AtsNode {
    core: Estimator,
}

impl AtsNode {
    /// `delay_compensation_us` is subtracted from every offset estimate;
    /// the classic protocol uses 0.
    pub fn new(
        node_id: usize,
        hardware: HardwareClock,
        logical: LogicalClock,
        rho_v: f64,
        delay_compensation_us: f64,
        min_skew_baseline_us: f64,
    ) -> Result<Self, ProtocolError> {
        if !(rho_v > 0.0 && rho_v < 1.0) {
            return Err(ProtocolError::BadAveragingFactor(rho_v));
        }
        Ok(Self {
            core: Estimator {
                node_id,
                hardware,
                logical,
                neighbors: BTreeMap::new(),
                rho_v,
                d_fixed_us: delay_compensation_us,
                min_skew_baseline_us,
                local_error: LocalErrorMode::Compensated,
                origin_seq: 0,
            },
        })
    }

    pub fn neighbor(&self, id: usize) -> Option<&NeighborRecord> {
        self.core.neighbors.get(&id)
    }
}

impl SyncNode for AtsNode {
    fn id(&self) -> usize {
        self.core.node_id
    }

    fn hardware(&self) -> &HardwareClock {
        &self.core.hardware
    }

    fn logical(&self) -> &LogicalClock {
        &self.core.logical
    }

    fn h_current(&self) -> u32 {
        1
    }

    fn on_broadcast_timer(&mut self, hw_now_us: i64, logical_now_us: i64) -> SyncMessage {
        self.core.broadcast(hw_now_us, logical_now_us)
    }

    fn on_receive(&mut self, msg: &SyncMessage, hw_rx_us: i64, logical_rx_us: i64) -> Result<Reception, ProtocolError> {
        let (theta_hat_us, phi_hat) = self.core.absorb(msg, hw_rx_us, logical_rx_us)?;
        Ok(Reception { theta_hat_us, phi_hat, forward: None, dropped: false })
    }
}
