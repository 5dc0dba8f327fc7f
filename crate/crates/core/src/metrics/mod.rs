// SPDX-License-Identifier: Apache-2.0

//! Measurement store filled by the engine, and the pure reducers that turn
//! it into headline numbers.

mod export;
mod reduce;

pub use export::{write_csvs, write_summary, CSV_FILES};
pub use reduce::{summarize, Report, SummaryRow};

use crate::aqm::{Departure, DropReason, DropRecord, QueueId, SignalProbabilities};
use crate::cc::CcKind;
use crate::packet::{EcnField, Packet};
use crate::scenario::Side;
use crate::time::SimTime;

/// Round trips of overhead assumed by the ideal completion time: one for
/// the handshake, one for the request.
pub const THEORETICAL_FCT_RTTS: f64 = 2.0;

/// Warm-up before long-flow metrics are sampled, seconds, for a link rate
/// in Mb/s and a base RTT in ms.
pub fn warmup_time(rate_mbps: f64, rtt_ms: f64) -> f64 {
    5.0 + rate_mbps * rtt_ms / 100.0
}

/// Nearest-rank percentile of a sorted slice: the element at rank
/// `ceil(q/100 * N)`. `None` for an empty slice.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let n = sorted.len();
    let rank = ((q / 100.0) * n as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, n) - 1])
}

pub fn percentile(samples: &[f64], q: f64) -> Option<f64> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    percentile_sorted(&v, q)
}

pub fn normalized_rate(rate: f64, capacity: f64, n_flows: usize) -> f64 {
    rate / (capacity / n_flows.max(1) as f64)
}

/// Window seen at the bottleneck: `r * (qd_avg + R)`.
pub fn window_estimate(rate_bytes_per_s: f64, qd_avg_s: f64, base_rtt_s: f64) -> f64 {
    rate_bytes_per_s * (qd_avg_s + base_rtt_s)
}

pub fn theoretical_fct(size_bytes: u64, base_rtt_s: f64, capacity_bps: f64) -> f64 {
    THEORETICAL_FCT_RTTS * base_rtt_s + size_bytes as f64 * 8.0 / capacity_bps
}

/// Ideal over actual completion time, clamped to 1 when the actual time
/// beats the ideal through measurement skew.
pub fn completion_efficiency(fct_s: f64, size_bytes: u64, base_rtt_s: f64, capacity_bps: f64) -> f64 {
    let ideal = theoretical_fct(size_bytes, base_rtt_s, capacity_bps);
    if fct_s <= ideal {
        1.0
    } else {
        ideal / fct_s
    }
}

/// `(value, fraction of samples strictly greater)` at each distinct value.
pub fn ccdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in v.iter().enumerate() {
        let above = (v.len() - i - 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = above,
            _ => out.push((x, above)),
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunMeta {
    pub scenario: String,
    pub capacity_bps: f64,
    pub duration: f64,
    pub warmup: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowRecord {
    pub id: u32,
    pub side: Side,
    pub cc: CcKind,
    pub ecn: EcnField,
    /// Bottleneck queue the flow's data joins.
    pub queue: QueueId,
    pub rtt_s: f64,
    pub start_s: f64,
    /// Bytes departed from the bottleneck after warm-up.
    pub bytes: u64,
    /// CE marks and virtual rounds counted by a scalable sender after warm-up.
    pub marks: u64,
    pub rounds: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FctRecord {
    pub flow_id: u32,
    pub side: Side,
    pub size: u64,
    pub start_s: f64,
    pub fct_s: f64,
    pub rtt_s: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QueueBin {
    pub packets: u64,
    pub bytes: u64,
    pub marks: u64,
    pub drops: u64,
    pub overflow: u64,
    pub sojourn_ns: u64,
}

impl QueueBin {
    /// Packets that reached the head of the queue in this second.
    pub fn passed(&self) -> u64 {
        self.packets + self.drops
    }

    pub fn mark_prob(&self) -> Option<f64> {
        (self.passed() > 0).then(|| self.marks as f64 / self.passed() as f64)
    }

    pub fn drop_prob(&self) -> Option<f64> {
        (self.passed() > 0).then(|| self.drops as f64 / self.passed() as f64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SecondBin {
    pub queues: [QueueBin; 2],
    pub prob_samples: u64,
    pub base_sum: f64,
    pub coupled_l_sum: f64,
    pub classic_sum: f64,
}

impl SecondBin {
    pub fn mean_probabilities(&self) -> Option<SignalProbabilities> {
        (self.prob_samples > 0).then(|| {
            let n = self.prob_samples as f64;
            SignalProbabilities {
                base: self.base_sum / n,
                coupled_l: self.coupled_l_sum / n,
                classic: self.classic_sum / n,
            }
        })
    }
}

/// Packet accounting for the conservation check, per queue.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Totals {
    pub offered: [u64; 2],
    pub departed: [u64; 2],
    pub signal_drops: [u64; 2],
    pub overflow: [u64; 2],
    pub residual: [u64; 2],
}

impl Totals {
    pub fn balanced(&self) -> bool {
        (0..2).all(|i| self.offered[i] == self.departed[i] + self.signal_drops[i] + self.overflow[i] + self.residual[i])
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricStore {
    pub meta: RunMeta,
    /// Long-running and UDP flows.
    pub flows: Vec<FlowRecord>,
    /// Per-packet sojourn after warm-up, nanoseconds, indexed by queue.
    pub qdelay: [Vec<u64>; 2],
    pub seconds: Vec<SecondBin>,
    /// Bytes per second for each entry of `flows`.
    pub flow_bytes: Vec<Vec<u64>>,
    pub fct: Vec<FctRecord>,
    pub totals: Totals,
    /// ECN-capable packets lost while the AQM was not in overload.
    pub ecn_losses_outside_overload: u64,
    warmup_at: SimTime,
}

impl MetricStore {
    pub fn new(meta: RunMeta) -> Self {
        let bins = meta.duration.ceil().max(0.0) as usize;
        let warmup_at = SimTime::from_secs_f64(meta.warmup);
        MetricStore { seconds: vec![SecondBin::default(); bins], warmup_at, meta, ..Default::default() }
    }

    pub fn warmup_at(&self) -> SimTime {
        self.warmup_at
    }

    /// Registers a measured flow and returns its index.
    pub fn add_flow(&mut self, record: FlowRecord) -> usize {
        self.flows.push(record);
        self.flow_bytes.push(vec![0; self.seconds.len()]);
        self.flows.len() - 1
    }

    fn bin(&mut self, now: SimTime) -> Option<&mut SecondBin> {
        self.seconds.get_mut(now.whole_secs() as usize)
    }

    pub fn on_enqueue(&mut self, queue: QueueId) {
        self.totals.offered[queue.index()] += 1;
    }

    pub fn on_overflow(&mut self, now: SimTime, queue: QueueId, pkt: &Packet) {
        let q = queue.index();
        self.totals.offered[q] += 1;
        self.totals.overflow[q] += 1;
        if pkt.ecn.is_ecn_capable() {
            self.ecn_losses_outside_overload += 1;
        }
        if let Some(b) = self.bin(now) {
            b.queues[q].overflow += 1;
        }
    }

    pub fn on_drop(&mut self, now: SimTime, drop: &DropRecord) {
        debug_assert_eq!(drop.reason, DropReason::Signal);
        let q = drop.queue.index();
        self.totals.signal_drops[q] += 1;
        if drop.packet.ecn.is_ecn_capable() && !drop.overloaded {
            self.ecn_losses_outside_overload += 1;
        }
        if let Some(b) = self.bin(now) {
            b.queues[q].drops += 1;
        }
    }

    pub fn on_departure(&mut self, now: SimTime, dep: &Departure, flow: Option<usize>) {
        let q = dep.queue.index();
        self.totals.departed[q] += 1;
        let size = u64::from(dep.packet.size);
        let sojourn = dep.sojourn.as_nanos();
        let sec = now.whole_secs() as usize;
        if let Some(b) = self.seconds.get_mut(sec) {
            let qb = &mut b.queues[q];
            qb.packets += 1;
            qb.bytes += size;
            qb.marks += u64::from(dep.marked);
            qb.sojourn_ns += sojourn;
        }
        if let Some(i) = flow {
            if let Some(slot) = self.flow_bytes[i].get_mut(sec) {
                *slot += size;
            }
            if now >= self.warmup_at {
                self.flows[i].bytes += size;
            }
        }
        if now >= self.warmup_at {
            self.qdelay[q].push(sojourn);
        }
    }

    pub fn on_probabilities(&mut self, now: SimTime, p: SignalProbabilities) {
        if let Some(b) = self.bin(now) {
            b.prob_samples += 1;
            b.base_sum += p.base;
            b.coupled_l_sum += p.coupled_l;
            b.classic_sum += p.classic;
        }
    }

    pub fn on_fct(&mut self, record: FctRecord) {
        self.fct.push(record);
    }

    /// Whole seconds inside the measurement window.
    pub fn measured_seconds(&self) -> std::ops::Range<usize> {
        let first = self.meta.warmup.ceil() as usize;
        let last = (self.meta.duration.floor() as usize).min(self.seconds.len());
        first.min(last)..last
    }

    /// Length of the measurement window, seconds.
    pub fn measured_span(&self) -> f64 {
        (self.meta.duration - self.meta.warmup).max(0.0)
    }

    pub fn qdelay_ms(&self, queue: QueueId) -> Vec<f64> {
        self.qdelay[queue.index()].iter().map(|&ns| ns as f64 / 1e6).collect()
    }

    pub fn mean_qdelay_s(&self, queue: QueueId) -> Option<f64> {
        let v = &self.qdelay[queue.index()];
        (!v.is_empty()).then(|| v.iter().map(|&x| x as f64).sum::<f64>() / v.len() as f64 / 1e9)
    }

    /// Average post-warm-up rate of a measured flow, bytes per second.
    pub fn flow_rate(&self, index: usize) -> f64 {
        let span = self.measured_span();
        if span > 0.0 {
            self.flows[index].bytes as f64 / span
        } else {
            0.0
        }
    }

    pub fn flows_on(&self, side: Side) -> impl Iterator<Item = (usize, &FlowRecord)> {
        self.flows.iter().enumerate().filter(move |(_, f)| f.side == side)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn warmup_examples() {
        assert!((warmup_time(4.0, 5.0) - 5.2).abs() < 1e-12);
        assert!((warmup_time(40.0, 10.0) - 9.0).abs() < 1e-12);
        assert_eq!(warmup_time(0.0, 77.0), 5.0);
    }

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 99.0), Some(99.0));
        assert_eq!(percentile(&v, 1.0), Some(1.0));
        assert_eq!(percentile(&v, 25.0), Some(25.0));
        assert_eq!(percentile(&[7.0], 1.0), Some(7.0));
        assert_eq!(percentile(&[7.0], 99.0), Some(7.0));
        assert_eq!(percentile(&[], 50.0), None);
        let c = [3.0; 10];
        assert_eq!(percentile(&c, 1.0), percentile(&c, 99.0));
    }

    #[test]
    fn normalized_rates() {
        assert_eq!(normalized_rate(50.0, 100.0, 2), 1.0);
        assert_eq!(normalized_rate(50.0, 100.0, 4), 2.0);
    }

    #[test]
    fn window_examples() {
        assert!((window_estimate(500_000.0, 0.005, 0.010) - 7500.0).abs() < 1e-9);
        assert!((window_estimate(500_000.0, 0.0, 0.010) - 5000.0).abs() < 1e-9);
        assert_eq!(window_estimate(0.0, 0.005, 0.010), 0.0);
    }

    #[test]
    fn completion_examples() {
        let ideal = theoretical_fct(1_000_000, 0.010, 40e6);
        assert!((ideal - 0.22).abs() < 1e-12);
        assert_eq!(completion_efficiency(ideal, 1_000_000, 0.010, 40e6), 1.0);
        assert!((completion_efficiency(2.0 * ideal, 1_000_000, 0.010, 40e6) - 0.5).abs() < 1e-12);
        assert_eq!(completion_efficiency(0.1, 1_000_000, 0.010, 40e6), 1.0);
    }

    #[test]
    fn ccdf_shape() {
        assert_eq!(ccdf(&[2.0, 2.0, 2.0]), vec![(2.0, 0.0)]);
        let c = ccdf(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.first().unwrap().1, 0.75);
        assert_eq!(c.last().unwrap().1, 0.0);
        assert!(c.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn measured_window() {
        let s = MetricStore::new(RunMeta { duration: 60.0, warmup: 9.0, ..Default::default() });
        assert_eq!(s.measured_seconds(), 9..60);
        let s = MetricStore::new(RunMeta { duration: 10.5, warmup: 2.5, ..Default::default() });
        assert_eq!(s.measured_seconds(), 3..10);
    }
}
