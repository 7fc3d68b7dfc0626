//! Hardware and logical clock models.
//!
//! A [`HardwareClock`] is a free-running oscillator with a constant drift and
//! a boot offset, read out in whole microseconds. A [`LogicalClock`] rides on
//! top of it: `L(t) = L(τ) + φ · (H(t) − H(τ))`, where `(H(τ), L(τ))` is the
//! anchor left behind by the most recent update. Anchors keep their
//! fractional part so that repeated updates never accumulate rounding drift.

use serde::{Deserialize, Serialize};

use crate::error::ClockError;

/// Readout quantum of every simulated clock, in microseconds.
pub const GRANULARITY_US: i64 = 1;

/// Free-running node oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardwareClock {
    /// Signed drift relative to nominal, in parts per million.
    pub rate_ppm: f64,
    /// Reading at true time zero, in microseconds.
    pub boot_offset_us: f64,
}

impl HardwareClock {
    pub fn new(rate_ppm: f64, boot_offset_us: f64) -> Self {
        Self { rate_ppm, boot_offset_us }
    }

    /// An ideal clock: no drift, no offset.
    pub fn ideal() -> Self {
        Self::new(0.0, 0.0)
    }

    /// Oscillator speed relative to true time, `1 + ppm·10⁻⁶`.
    pub fn rate(&self) -> f64 {
        1.0 + self.rate_ppm * 1e-6
    }

    /// Unquantized reading at `true_time_us`.
    pub fn exact(&self, true_time_us: f64) -> f64 {
        self.rate() * true_time_us + self.boot_offset_us
    }

    /// Quantized reading at `true_time_us`.
    pub fn read(&self, true_time_us: f64) -> i64 {
        quantize(self.exact(true_time_us))
    }

    /// True time at which the unquantized reading reaches `hw_us`.
    pub fn true_time_of(&self, hw_us: f64) -> f64 {
        (hw_us - self.boot_offset_us) / self.rate()
    }
}

/// Floor to the clock granularity.
fn quantize(value_us: f64) -> i64 {
    let ticks = (value_us / GRANULARITY_US as f64).floor() as i64;
    ticks * GRANULARITY_US
}

/// Software clock with a tunable rate multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalClock {
    phi: f64,
    anchor_hw_us: i64,
    anchor_logical_us: f64,
}

impl Default for LogicalClock {
    fn default() -> Self {
        Self { phi: 1.0, anchor_hw_us: 0, anchor_logical_us: 0.0 }
    }
}

impl LogicalClock {
    /// Logical clock that tracks the hardware clock from `hw_now_us` on.
    pub fn starting_at(hw_now_us: i64) -> Self {
        Self { phi: 1.0, anchor_hw_us: hw_now_us, anchor_logical_us: hw_now_us as f64 }
    }

    pub fn with_anchor(phi: f64, anchor_hw_us: i64, anchor_logical_us: f64) -> Result<Self, ClockError> {
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(ClockError::NonPositiveRate(phi));
        }
        Ok(Self { phi, anchor_hw_us, anchor_logical_us })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn anchor_hw_us(&self) -> i64 {
        self.anchor_hw_us
    }

    pub fn anchor_logical_us(&self) -> f64 {
        self.anchor_logical_us
    }

    /// Unquantized logical value at hardware reading `hw_now_us`.
    pub fn exact(&self, hw_now_us: i64) -> Result<f64, ClockError> {
        if hw_now_us < self.anchor_hw_us {
            return Err(ClockError::Backwards { anchor_hw_us: self.anchor_hw_us, hw_now_us });
        }
        Ok(self.anchor_logical_us + self.phi * (hw_now_us - self.anchor_hw_us) as f64)
    }

    /// Quantized logical reading at hardware reading `hw_now_us`.
    pub fn read(&self, hw_now_us: i64) -> Result<i64, ClockError> {
        self.exact(hw_now_us).map(quantize)
    }

    /// Re-anchors at `hw_now_us`: the value jumps by `offset_correction_us`
    /// and runs at `new_phi` afterwards.
    pub fn apply_update(
        &self,
        hw_now_us: i64,
        new_phi: f64,
        offset_correction_us: f64,
    ) -> Result<Self, ClockError> {
        if !(new_phi > 0.0) || !new_phi.is_finite() {
            return Err(ClockError::NonPositiveRate(new_phi));
        }
        let here = self.exact(hw_now_us)?;
        Ok(Self {
            phi: new_phi,
            anchor_hw_us: hw_now_us,
            anchor_logical_us: here + offset_correction_us,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hardware_read_examples() {
        assert_eq!(HardwareClock::ideal().read(1_000_000.0), 1_000_000);
        assert_eq!(HardwareClock::new(40.0, 0.0).read(1_000_000.0), 1_000_040);
        assert_eq!(HardwareClock::new(-40.0, 500_000_000.0).read(0.0), 500_000_000);
    }

    #[test]
    fn hardware_read_floors() {
        assert_eq!(HardwareClock::new(0.0, 0.7).read(10.0), 10);
        assert_eq!(HardwareClock::new(-40.0, 0.0).read(1_000_000.0), 999_960);
    }

    #[test]
    fn logical_read_examples() {
        let lc = LogicalClock::default();
        assert_eq!(lc.read(5_000).unwrap(), 5_000);
        let lc = LogicalClock::with_anchor(1.00004, 0, 0.0).unwrap();
        assert_eq!(lc.read(1_000_000).unwrap(), 1_000_040);
        let lc = LogicalClock::with_anchor(0.5, 100, 200.0).unwrap();
        assert_eq!(lc.read(300).unwrap(), 300);
    }

    #[test]
    fn logical_read_rejects_backwards_hardware() {
        let lc = LogicalClock::with_anchor(1.0, 100, 0.0).unwrap();
        assert!(matches!(lc.read(99), Err(ClockError::Backwards { .. })));
    }

    #[test]
    fn apply_update_jumps_by_correction() {
        let lc = LogicalClock::with_anchor(1.0, 0, 0.0).unwrap();
        assert_eq!(lc.read(1000).unwrap(), 1000);
        let next = lc.apply_update(1000, 1.0, 50.0).unwrap();
        assert_eq!(next.read(1000).unwrap(), 1050);

        let next = lc.apply_update(1000, 1.0, -50.0).unwrap();
        assert_eq!(next.read(1000).unwrap(), 950);
    }

    #[test]
    fn apply_update_changes_slope_continuously() {
        let lc = LogicalClock::with_anchor(1.0, 0, 0.0).unwrap();
        let next = lc.apply_update(1000, 2.0, 0.0).unwrap();
        assert_eq!(next.read(1000).unwrap(), 1000);
        assert_eq!(next.read(1100).unwrap(), 1200);
    }

    #[test]
    fn apply_update_rejects_non_positive_rate() {
        let lc = LogicalClock::default();
        assert!(lc.apply_update(0, 0.0, 0.0).is_err());
        assert!(lc.apply_update(0, -1.0, 0.0).is_err());
        assert!(LogicalClock::with_anchor(f64::NAN, 0, 0.0).is_err());
    }

    #[test]
    fn identity_update_is_noop() {
        let lc = LogicalClock::with_anchor(1.00002, 17, 123.25).unwrap();
        let same = lc.apply_update(500, lc.phi(), 0.0).unwrap();
        for hw in [500, 501, 10_000, 123_456_789] {
            assert_eq!(lc.read(hw).unwrap(), same.read(hw).unwrap());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn hardware_monotone(ppm in -40.0f64..40.0, boot in 0.0f64..5e8, t1 in 0.0f64..1e10, dt in 0.0f64..1e9) {
                let c = HardwareClock::new(ppm, boot);
                prop_assert!(c.read(t1) <= c.read(t1 + dt));
            }

            #[test]
            fn logical_monotone(phi in 0.5f64..2.0, a in 0i64..1_000_000, d1 in 0i64..1_000_000, d2 in 0i64..1_000_000) {
                let lc = LogicalClock::with_anchor(phi, a, a as f64).unwrap();
                prop_assert!(lc.read(a + d1).unwrap() <= lc.read(a + d1 + d2).unwrap());
            }

            #[test]
            fn relative_rate_identity(pi in -40.0f64..40.0, pj in -40.0f64..40.0,
                                      bi in 0.0f64..5e8, bj in 0.0f64..5e8,
                                      t1 in 0.0f64..1e9, dt in 1e6f64..1e9) {
                let ci = HardwareClock::new(pi, bi);
                let cj = HardwareClock::new(pj, bj);
                let t2 = t1 + dt;
                let di = (ci.read(t2) - ci.read(t1)) as f64;
                let dj = (cj.read(t2) - cj.read(t1)) as f64;
                let expected = cj.rate() / ci.rate();
                // (1 + r)·g / ΔH_i, i.e. 2·g/(t₂ − t₁) to first order in the drift.
                let tol = (1.0 + expected) * GRANULARITY_US as f64 / (ci.rate() * dt - 1.0);
                prop_assert!((dj / di - expected).abs() <= tol);
            }
        }
    }
}
