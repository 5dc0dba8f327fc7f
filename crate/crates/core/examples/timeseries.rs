// SPDX-License-Identifier: Apache-2.0

//! Prints per-second rates and queue delays of one basic scenario.
//!
//! `cargo run --release --example timeseries -- dualpi2 200 100 60`

use dualq::aqm::QueueId;
use dualq::harness::run_one;
use dualq::scenario::AqmKind;
use dualq::workload::basic_scenario;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let aqm = match args.first().map(String::as_str) {
        Some("pie") => AqmKind::Pie,
        Some("pi2") => AqmKind::Pi2,
        _ => AqmKind::Dualpi2,
    };
    let num = |i: usize, d: f64| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let sc = basic_scenario(aqm, num(1, 40.0), num(2, 10.0), num(3, 60.0), 1);
    let out = run_one(&sc).expect("scenario runs");
    let s = &out.store;
    println!("second  ecn_mbps  classic_mbps  l_ms  c_ms  p_base");
    for (sec, bin) in s.seconds.iter().enumerate() {
        let mbps = |i: usize| s.flow_bytes[i][sec] as f64 * 8e-6;
        let delay = |q: QueueId| {
            let b = &bin.queues[q.index()];
            if b.packets > 0 {
                b.sojourn_ns as f64 / b.packets as f64 / 1e6
            } else {
                0.0
            }
        };
        let p = bin.mean_probabilities().map_or(0.0, |p| p.base);
        println!(
            "{sec:>6} {:>9.2} {:>13.2} {:>5.2} {:>5.2} {:>7.4}",
            mbps(0),
            mbps(1),
            delay(QueueId::L),
            delay(QueueId::C),
            p
        );
    }
}
