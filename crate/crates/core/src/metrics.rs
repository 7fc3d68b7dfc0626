//! Post-processing of run traces: steady-state statistics, histograms and
//! cross-run convergence tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};

use crate::error::MetricsError;
use crate::simulator::{Probe, RunTrace};

/// Probes skipped after the convergence probe before the steady-state
/// window opens.
pub const GUARD_PROBES: usize = 2;
/// Smallest steady-state window accepted by [`steady_state_summary`].
pub const MIN_STEADY_PROBES: usize = 30;
/// Smallest group accepted by [`convergence_table`].
pub const MIN_GROUP_RUNS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MaxGlobal,
    AvgGlobal,
    MaxLocal,
    AvgLocal,
}

impl Metric {
    pub fn of(&self, p: &Probe) -> f64 {
        match self {
            Self::MaxGlobal => p.max_global_us,
            Self::AvgGlobal => p.avg_global_us,
            Self::MaxLocal => p.max_local_us,
            Self::AvgLocal => p.avg_local_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
    pub max: f64,
    pub ci95_mean_lo: f64,
    pub ci95_mean_hi: f64,
    pub ci95_std_lo: f64,
    pub ci95_std_hi: f64,
    pub sample_count: usize,
    pub window_start_s: f64,
    pub window_end_s: f64,
}

impl SummaryStats {
    /// Statistics of a plain series. The window bounds are left at zero.
    ///
    /// The mean interval uses Student-t with n − 1 degrees of freedom and
    /// the std interval the chi-square pivot. A single sample gets a
    /// zero-width interval.
    pub fn of_series(series: &[f64]) -> Result<Self, MetricsError> {
        if series.is_empty() {
            return Err(MetricsError::Empty);
        }
        let n = series.len();
        let nf = n as f64;
        let mean = series.iter().sum::<f64>() / nf;
        let max = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let var = if n > 1 { series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (nf - 1.0) } else { 0.0 };
        let std = var.sqrt();
        let (mut ci95_mean_lo, mut ci95_mean_hi) = (mean, mean);
        let (mut ci95_std_lo, mut ci95_std_hi) = (std, std);
        if n > 1 && std > 0.0 {
            let dof = nf - 1.0;
            let t = StudentsT::new(0.0, 1.0, dof).expect("dof > 0").inverse_cdf(0.975);
            let half = t * std / nf.sqrt();
            ci95_mean_lo = mean - half;
            ci95_mean_hi = mean + half;
            let chi = ChiSquared::new(dof).expect("dof > 0");
            ci95_std_lo = (dof * var / chi.inverse_cdf(0.975)).sqrt();
            ci95_std_hi = (dof * var / chi.inverse_cdf(0.025)).sqrt();
        }
        Ok(Self {
            mean,
            std,
            max,
            ci95_mean_lo,
            ci95_mean_hi,
            ci95_std_lo,
            ci95_std_hi,
            sample_count: n,
            window_start_s: 0.0,
            window_end_s: 0.0,
        })
    }
}

/// Probes of the steady-state window: everything from the convergence
/// probe plus [`GUARD_PROBES`] onward.
pub fn steady_state_window(trace: &RunTrace) -> Result<&[Probe], MetricsError> {
    let t = trace.convergence_time_s.ok_or(MetricsError::NotConverged)?;
    let idx = trace.probes.iter().position(|p| p.time_s >= t).ok_or(MetricsError::NotConverged)?;
    Ok(trace.probes.get(idx + GUARD_PROBES..).unwrap_or(&[]))
}

pub fn steady_state_series(trace: &RunTrace, metric: Metric) -> Result<Vec<f64>, MetricsError> {
    Ok(steady_state_window(trace)?.iter().map(|p| metric.of(p)).collect())
}

pub fn steady_state_summary(trace: &RunTrace, metric: Metric) -> Result<SummaryStats, MetricsError> {
    let window = steady_state_window(trace)?;
    if window.len() < MIN_STEADY_PROBES {
        return Err(MetricsError::TooFewProbes { needed: MIN_STEADY_PROBES, have: window.len() });
    }
    let series: Vec<f64> = window.iter().map(|p| metric.of(p)).collect();
    let mut s = SummaryStats::of_series(&series)?;
    s.window_start_s = window[0].time_s;
    s.window_end_s = window[window.len() - 1].time_s;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub left_us: f64,
    pub count: usize,
}

/// Left-closed bins `[k·w, (k+1)·w)`, contiguous from the bin of the
/// smallest sample to the bin of the largest.
pub fn histogram(series: &[f64], bin_width_us: f64) -> Result<Vec<Bin>, MetricsError> {
    if !(bin_width_us > 0.0 && bin_width_us.is_finite()) {
        return Err(MetricsError::BadBinWidth(bin_width_us));
    }
    if series.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &x in series {
        *counts.entry((x / bin_width_us).floor() as i64).or_default() += 1;
    }
    let lo = *counts.keys().next().expect("non-empty");
    let hi = *counts.keys().next_back().expect("non-empty");
    Ok((lo..=hi)
        .map(|k| Bin { left_us: k as f64 * bin_width_us, count: counts.get(&k).copied().unwrap_or(0) })
        .collect())
}

/// The numbers [`convergence_table`] needs from one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub protocol: String,
    pub topology: String,
    pub h_initial: u32,
    pub seed: u64,
    pub convergence_time_s: Option<f64>,
    pub msgs_at_convergence: Option<u64>,
    /// Steady-state max-global statistics, when the run had a window.
    pub steady: Option<SummaryStats>,
}

impl RunSummary {
    pub fn from_trace(protocol: &str, topology: &str, h_initial: u32, seed: u64, trace: &RunTrace) -> Self {
        Self {
            protocol: protocol.to_string(),
            topology: topology.to_string(),
            h_initial,
            seed,
            convergence_time_s: trace.convergence_time_s,
            msgs_at_convergence: trace.messages_at_convergence(),
            steady: steady_state_summary(trace, Metric::MaxGlobal).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub protocol: String,
    pub topology: String,
    pub h_initial: u32,
    pub runs: usize,
    pub converged: usize,
    /// Median over all runs, counting unconverged runs as never; `None`
    /// when at least half the runs did not converge.
    pub median_s: Option<f64>,
    pub min_s: Option<f64>,
    pub max_s: Option<f64>,
    pub mean_msgs_at_convergence: Option<f64>,
    /// Pooled steady-state max-global statistics across runs.
    pub mean_us: Option<f64>,
    pub std_us: Option<f64>,
    pub max_us: Option<f64>,
}

/// Median of a sample where `None` sorts above every value.
pub fn median_with_missing(values: &[Option<f64>]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 };
    m.is_finite().then_some(m)
}

/// Groups runs by (protocol, topology, H) and aggregates each group.
/// The result does not depend on the order of `runs`.
pub fn convergence_table(runs: &[RunSummary]) -> Result<Vec<TableRow>, MetricsError> {
    let mut groups: BTreeMap<(String, String, u32), Vec<&RunSummary>> = BTreeMap::new();
    for r in runs {
        groups.entry((r.protocol.clone(), r.topology.clone(), r.h_initial)).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((protocol, topology, h_initial), mut members) in groups {
        if members.len() < MIN_GROUP_RUNS {
            return Err(MetricsError::TooFewRuns(format!("{protocol}/{topology}/H{h_initial}"), MIN_GROUP_RUNS));
        }
        // Fixed summation order regardless of input order.
        members.sort_by(|a, b| a.seed.cmp(&b.seed).then(a.convergence_time_s.partial_cmp(&b.convergence_time_s).unwrap_or(std::cmp::Ordering::Equal)));
        let times: Vec<Option<f64>> = members.iter().map(|r| r.convergence_time_s).collect();
        let done: Vec<f64> = times.iter().flatten().copied().collect();
        let msgs: Vec<f64> = members.iter().filter_map(|r| r.msgs_at_convergence).map(|m| m as f64).collect();
        let steady: Vec<&SummaryStats> = members.iter().filter_map(|r| r.steady.as_ref()).collect();
        let (mean_us, std_us, max_us) = pooled(&steady);
        rows.push(TableRow {
            protocol,
            topology,
            h_initial,
            runs: members.len(),
            converged: done.len(),
            median_s: median_with_missing(&times),
            min_s: done.iter().copied().reduce(f64::min),
            max_s: done.iter().copied().reduce(f64::max),
            mean_msgs_at_convergence: (!msgs.is_empty()).then(|| msgs.iter().sum::<f64>() / msgs.len() as f64),
            mean_us,
            std_us,
            max_us,
        });
    }
    Ok(rows)
}

/// Mean, std and max of the union of the samples behind several summaries.
fn pooled(parts: &[&SummaryStats]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let n: usize = parts.iter().map(|s| s.sample_count).sum();
    if n == 0 {
        return (None, None, None);
    }
    let nf = n as f64;
    let mean = parts.iter().map(|s| s.mean * s.sample_count as f64).sum::<f64>() / nf;
    let ss: f64 = parts
        .iter()
        .map(|s| (s.sample_count as f64 - 1.0).max(0.0) * s.std * s.std + s.sample_count as f64 * (s.mean - mean).powi(2))
        .sum();
    let std = if n > 1 { (ss / (nf - 1.0)).sqrt() } else { 0.0 };
    let max = parts.iter().map(|s| s.max).fold(f64::NEG_INFINITY, f64::max);
    (Some(mean), Some(std), Some(max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trace_from(series: &[f64], conv: Option<f64>) -> RunTrace {
        let probes = series
            .iter()
            .enumerate()
            .map(|(k, &g)| Probe {
                time_s: 10.0 * (k + 1) as f64,
                max_global_us: g,
                avg_global_us: g / 2.0,
                max_local_us: g / 3.0,
                avg_local_us: g / 4.0,
                msg_origin: k as u64,
                msg_forwards: 0,
                h_current: vec![1],
            })
            .collect();
        RunTrace {
            probes,
            convergence_time_s: conv,
            threshold_us: 20.0,
            broadcast_period_s: 30.0,
            origin_by_node: vec![],
            forwards_by_origin: vec![],
            dropped_malformed: 0,
            offset_samples: vec![],
        }
    }

    #[test]
    fn constant_series() {
        let s = SummaryStats::of_series(&[10.0; 40]).unwrap();
        assert_eq!((s.mean, s.std, s.max), (10.0, 0.0, 10.0));
        assert_eq!(s.ci95_mean_hi - s.ci95_mean_lo, 0.0);
        assert_eq!(s.ci95_std_hi - s.ci95_std_lo, 0.0);
    }

    #[test]
    fn alternating_series() {
        let v: Vec<f64> = (0..40).map(|k| if k % 2 == 0 { 9.0 } else { 11.0 }).collect();
        let s = SummaryStats::of_series(&v).unwrap();
        assert!((s.mean - 10.0).abs() < 1e-12);
        assert_eq!(s.max, 11.0);
    }

    #[test]
    fn t_interval_matches_table_value() {
        // t_{0.975, 9} = 2.2621571628
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        let s = SummaryStats::of_series(&v).unwrap();
        let half = 2.262_157_162_8 * s.std / 10f64.sqrt();
        assert!((s.ci95_mean_hi - s.mean - half).abs() < 1e-8);
        // chi2_{0.975, 9} = 19.0227678, chi2_{0.025, 9} = 2.7003895
        assert!((s.ci95_std_lo - (9.0 * s.std * s.std / 19.022_767_8).sqrt()).abs() < 1e-6);
        assert!((s.ci95_std_hi - (9.0 * s.std * s.std / 2.700_389_5).sqrt()).abs() < 1e-6);
    }

    #[test]
    fn steady_state_needs_convergence_and_length() {
        let long = trace_from(&[5.0; 50], None);
        assert!(matches!(steady_state_summary(&long, Metric::MaxGlobal), Err(MetricsError::NotConverged)));
        let short = trace_from(&[5.0; 20], Some(10.0));
        assert!(matches!(steady_state_summary(&short, Metric::MaxGlobal), Err(MetricsError::TooFewProbes { .. })));
    }

    #[test]
    fn steady_state_skips_guard_band() {
        // Converged at the third probe (30 s); it and the next are guards.
        let mut v = vec![100.0, 50.0, 19.0, 90.0];
        v.extend([4.0; 40]);
        let tr = trace_from(&v, Some(30.0));
        let s = steady_state_summary(&tr, Metric::MaxGlobal).unwrap();
        assert_eq!(s.window_start_s, 50.0);
        assert_eq!(s.sample_count, 40);
        assert_eq!(s.max, 4.0);
        let local = steady_state_summary(&tr, Metric::MaxLocal).unwrap();
        assert!((local.mean - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_small_example() {
        let h = histogram(&[1.0, 1.0, 2.0], 1.0).unwrap();
        assert_eq!(h, vec![Bin { left_us: 1.0, count: 2 }, Bin { left_us: 2.0, count: 1 }]);
        assert!(matches!(histogram(&[], 1.0), Err(MetricsError::Empty)));
        assert!(histogram(&[1.0], 0.0).is_err());
    }

    #[test]
    fn histogram_left_closed() {
        let h = histogram(&[0.0, 0.999, 1.0, 3.5], 1.0).unwrap();
        let counts: Vec<usize> = h.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![2, 1, 0, 1]);
    }

    fn summary(h: u32, seed: u64, conv: Option<f64>, msgs: Option<u64>) -> RunSummary {
        RunSummary {
            protocol: "macts".into(),
            topology: "grid5x5".into(),
            h_initial: h,
            seed,
            convergence_time_s: conv,
            msgs_at_convergence: msgs,
            steady: conv.map(|_| SummaryStats::of_series(&[seed as f64, 2.0 * seed as f64]).unwrap()),
        }
    }

    #[test]
    fn identical_runs_collapse() {
        let runs: Vec<_> = (0..4).map(|_| summary(2, 1, Some(300.0), Some(900))).collect();
        let rows = convergence_table(&runs).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.median_s, r.min_s, r.max_s), (Some(300.0), Some(300.0), Some(300.0)));
        assert_eq!(r.mean_msgs_at_convergence, Some(900.0));
    }

    #[test]
    fn unconverged_group_is_reported() {
        let runs: Vec<_> = (1..=3).map(|s| summary(1, s, None, None)).collect();
        let rows = convergence_table(&runs).unwrap();
        assert_eq!(rows[0].converged, 0);
        assert_eq!(rows[0].median_s, None);
        assert_eq!(rows[0].mean_msgs_at_convergence, None);
    }

    #[test]
    fn small_groups_rejected() {
        let runs = vec![summary(1, 1, Some(1.0), Some(1)), summary(1, 2, Some(1.0), Some(1))];
        assert!(matches!(convergence_table(&runs), Err(MetricsError::TooFewRuns(..))));
    }

    #[test]
    fn median_counts_missing_as_never() {
        assert_eq!(median_with_missing(&[Some(1.0), None, Some(3.0)]), Some(3.0));
        assert_eq!(median_with_missing(&[Some(1.0), None, None]), None);
        assert_eq!(median_with_missing(&[Some(1.0), Some(2.0), Some(4.0), Some(9.0)]), Some(3.0));
    }

    #[test]
    fn pooled_matches_concatenation() {
        let a = [1.0, 4.0, 2.0, 8.0];
        let b = [3.0, 3.5, 9.0];
        let sa = SummaryStats::of_series(&a).unwrap();
        let sb = SummaryStats::of_series(&b).unwrap();
        let all: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        let direct = SummaryStats::of_series(&all).unwrap();
        let (m, s, x) = pooled(&[&sa, &sb]);
        assert!((m.unwrap() - direct.mean).abs() < 1e-12);
        assert!((s.unwrap() - direct.std).abs() < 1e-12);
        assert_eq!(x.unwrap(), direct.max);
    }

    proptest! {
        #[test]
        fn histogram_counts_sum_to_len(v in prop::collection::vec(-1e4f64..1e4, 1..200), w in 0.01f64..50.0) {
            let h = histogram(&v, w).unwrap();
            prop_assert_eq!(h.iter().map(|b| b.count).sum::<usize>(), v.len());
            for x in &v {
                let hit = h.iter().filter(|b| *x >= b.left_us && *x < b.left_us + w).count();
                prop_assert!(hit <= 1);
            }
        }

        #[test]
        fn ci_contains_mean(v in prop::collection::vec(0.0f64..100.0, 2..100)) {
            let s = SummaryStats::of_series(&v).unwrap();
            prop_assert!(s.std >= 0.0);
            prop_assert!(s.ci95_mean_lo <= s.mean && s.mean <= s.ci95_mean_hi);
            prop_assert!(s.ci95_std_lo <= s.std + 1e-12 && s.std <= s.ci95_std_hi + 1e-12);
            prop_assert!(s.max >= s.mean - 1e-9);
        }

        #[test]
        fn table_is_permutation_invariant(
            conv in prop::collection::vec(prop::option::of(1.0f64..1e4), 6..18),
            rot in 0usize..17,
        ) {
            let runs: Vec<RunSummary> = conv
                .iter()
                .enumerate()
                .map(|(k, c)| summary((k % 2) as u32 + 1, k as u64, *c, c.map(|x| x as u64)))
                .collect();
            let mut shuffled = runs.clone();
            shuffled.rotate_left(rot % runs.len());
            shuffled.reverse();
            prop_assert_eq!(convergence_table(&runs).unwrap(), convergence_table(&shuffled).unwrap());
        }
    }
}
