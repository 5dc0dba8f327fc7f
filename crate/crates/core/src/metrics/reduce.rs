// SPDX-License-Identifier: Apache-2.0

use crate::aqm::QueueId;
use crate::scenario::Side;

use super::{completion_efficiency, normalized_rate, percentile_sorted, window_estimate, MetricStore};

/// Mean and nearest-rank percentiles of one headline metric.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub metric: String,
    pub mean: f64,
    pub p1: f64,
    pub p25: f64,
    pub p99: f64,
    pub count: usize,
}

impl SummaryRow {
    pub fn from_samples(metric: &str, mut samples: Vec<f64>) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_by(f64::total_cmp);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Some(SummaryRow {
            metric: metric.to_string(),
            mean,
            p1: percentile_sorted(&samples, 1.0)?,
            p25: percentile_sorted(&samples, 25.0)?,
            p99: percentile_sorted(&samples, 99.0)?,
            count: samples.len(),
        })
    }

    pub fn scalar(metric: &str, value: f64) -> Self {
        SummaryRow { metric: metric.to_string(), mean: value, p1: value, p25: value, p99: value, count: 1 }
    }
}

/// Headline metrics of one run. Metrics without samples are absent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub rows: Vec<SummaryRow>,
}

impl Report {
    pub fn get(&self, metric: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn mean(&self, metric: &str) -> Option<f64> {
        self.get(metric).map(|r| r.mean)
    }

    fn push(&mut self, row: Option<SummaryRow>) {
        self.rows.extend(row);
    }
}

fn side_key(side: Side) -> &'static str {
    side.as_str()
}

pub fn summarize(store: &MetricStore) -> Report {
    let mut r = Report { scenario: store.meta.scenario.clone(), rows: Vec::new() };
    let secs = store.measured_seconds();
    let capacity = store.meta.capacity_bps;

    for q in QueueId::BOTH {
        let key = format!("qdelay_{}_ms", q.as_str().to_lowercase());
        r.push(SummaryRow::from_samples(&key, store.qdelay_ms(q)));
    }

    let util: Vec<f64> = store.seconds[secs.clone()]
        .iter()
        .map(|b| (b.queues[0].bytes + b.queues[1].bytes) as f64 * 8.0 / capacity)
        .collect();
    r.push(SummaryRow::from_samples("utilization", util));

    for q in QueueId::BOTH {
        let lower = q.as_str().to_lowercase();
        let bins = &store.seconds[secs.clone()];
        let marks: Vec<f64> = bins.iter().filter_map(|b| b.queues[q.index()].mark_prob()).collect();
        let drops: Vec<f64> = bins.iter().filter_map(|b| b.queues[q.index()].drop_prob()).collect();
        r.push(SummaryRow::from_samples(&format!("mark_prob_{lower}"), marks));
        r.push(SummaryRow::from_samples(&format!("drop_prob_{lower}"), drops));
    }

    let n_flows = store.flows.len();
    let mut side_rate_means = [None; 3];
    let mut side_window_means = [None; 3];
    for (si, side) in [Side::Ecn, Side::Classic, Side::Udp].into_iter().enumerate() {
        let idx: Vec<usize> = store.flows_on(side).map(|(i, _)| i).collect();
        if idx.is_empty() {
            continue;
        }
        let per_second: Vec<f64> = idx
            .iter()
            .flat_map(|&i| {
                store.flow_bytes[i][secs.clone()].iter().map(|&b| normalized_rate(b as f64 * 8.0, capacity, n_flows))
            })
            .collect();
        r.push(SummaryRow::from_samples(&format!("norm_rate_{}", side_key(side)), per_second));

        let aggregate: Vec<f64> =
            secs.clone().map(|s| idx.iter().map(|&i| store.flow_bytes[i][s]).sum::<u64>() as f64 * 8.0 / 1e6).collect();
        r.push(SummaryRow::from_samples(&format!("throughput_{}_mbps", side_key(side)), aggregate));

        let rates: Vec<f64> = idx.iter().map(|&i| store.flow_rate(i)).collect();
        let mean_rate = rates.iter().sum::<f64>() / rates.len() as f64;
        side_rate_means[si] = Some(mean_rate);
        let windows: Vec<f64> = idx
            .iter()
            .map(|&i| {
                let f = &store.flows[i];
                let qd = store.mean_qdelay_s(f.queue).unwrap_or(0.0);
                window_estimate(store.flow_rate(i), qd, f.rtt_s)
            })
            .collect();
        side_window_means[si] = Some(windows.iter().sum::<f64>() / windows.len() as f64);
    }

    let tcp: Vec<usize> = store.flows.iter().enumerate().filter(|(_, f)| f.side != Side::Udp).map(|(i, _)| i).collect();
    if !tcp.is_empty() {
        let aggregate: Vec<f64> =
            secs.clone().map(|s| tcp.iter().map(|&i| store.flow_bytes[i][s]).sum::<u64>() as f64 * 8.0 / 1e6).collect();
        r.push(SummaryRow::from_samples("throughput_tcp_mbps", aggregate));
    }

    if let (Some(e), Some(c)) = (side_rate_means[0], side_rate_means[1]) {
        if c > 0.0 {
            r.push(Some(SummaryRow::scalar("rate_ratio", e / c)));
        }
    }
    if let (Some(e), Some(c)) = (side_window_means[0], side_window_means[1]) {
        if c > 0.0 {
            r.push(Some(SummaryRow::scalar("window_ratio", e / c)));
        }
    }

    let mpr: Vec<f64> = store.flows.iter().filter(|f| f.rounds > 0).map(|f| f.marks as f64 / f.rounds as f64).collect();
    r.push(SummaryRow::from_samples("marks_per_round", mpr));

    let eff: Vec<f64> = store.fct.iter().map(|f| completion_efficiency(f.fct_s, f.size, f.rtt_s, capacity)).collect();
    r.push(SummaryRow::from_samples("completion_efficiency", eff));
    r.push(SummaryRow::from_samples("fct_ms", store.fct.iter().map(|f| f.fct_s * 1e3).collect()));

    r.push(Some(SummaryRow::scalar("ecn_losses_outside_overload", store.ecn_losses_outside_overload as f64)));
    r
}
