// SPDX-License-Identifier: Apache-2.0

//! Runs a scenario grid and prints a compact table of headline metrics.
//!
//! `cargo run --release --example grid_table -- basic 60 [name-filter]`

use dualq::harness::run_batch;
use dualq::workload::{build_scenario_grid, GridKind};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: GridKind = args.first().map_or("basic", String::as_str).parse().expect("grid kind");
    let duration = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(60.0);
    let filter = args.get(2).cloned().unwrap_or_default();
    let grid: Vec<_> =
        build_scenario_grid(kind, duration, 1).into_iter().filter(|s| s.name.contains(&filter)).collect();
    let metrics = [
        "qdelay_l_ms",
        "qdelay_c_ms",
        "utilization",
        "rate_ratio",
        "marks_per_round",
        "norm_rate_ecn",
        "norm_rate_classic",
        "drop_prob_l",
        "completion_efficiency",
    ];
    print!("{:<28}", "scenario");
    for m in metrics {
        print!(" {:>14}", m.trim_end_matches("_ms"));
    }
    println!("  (l_p99, c_p99)");
    for (sc, out) in grid.iter().zip(run_batch(&grid)) {
        let out = out.expect("run");
        print!("{:<28}", sc.name);
        for m in metrics {
            match out.report.mean(m) {
                Some(v) => print!(" {v:>14.4}"),
                None => print!(" {:>14}", "-"),
            }
        }
        let p99 = |m: &str| out.report.get(m).map_or(f64::NAN, |r| r.p99);
        println!("  ({:.3}, {:.3})", p99("qdelay_l_ms"), p99("qdelay_c_ms"));
    }
}
