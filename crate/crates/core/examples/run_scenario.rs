// SPDX-License-Identifier: Apache-2.0

//! Runs one basic scenario and prints its headline metrics.
//!
//! `cargo run --release --example run_scenario -- dualpi2 40 10 60`

use std::time::Instant;

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
    let t = Instant::now();
    let out = run_one(&sc).expect("scenario runs");
    println!("{} in {:.2?}", sc.name, t.elapsed());
    for r in &out.report.rows {
        println!("{:<30} mean {:>10.4} p1 {:>10.4} p25 {:>10.4} p99 {:>10.4}", r.metric, r.mean, r.p1, r.p25, r.p99);
    }
}
