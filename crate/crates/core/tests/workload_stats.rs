// SPDX-License-Identifier: Apache-2.0

//! Statistical checks of the web traffic generator.

use dualq::rng::Rng;
use dualq::workload::{gen_web_arrivals, WebLevel, WebLoadProfile, MAX_ITEM_BYTES, MIN_ITEM_BYTES, PARETO_ALPHA};

#[test]
fn exponential_interarrival_mean() {
    let profile = WebLoadProfile::new(WebLevel::High, 120.0);
    assert_eq!(profile.arrival_rate, 300.0);
    let mut rng = Rng::substream(5, 1);
    let reqs = gen_web_arrivals(&profile, &mut rng, 40.0);
    let n = 10_000;
    assert!(reqs.len() > n);
    let gaps: Vec<f64> = reqs.windows(2).take(n).map(|w| w[1].start - w[0].start).collect();
    let mean = gaps.iter().sum::<f64>() / n as f64;
    let want = 1.0 / profile.arrival_rate;
    assert!((mean - want).abs() / want < 0.03, "mean gap {mean} vs {want}");
    assert!(gaps.iter().all(|&g| g > 0.0));
}

#[test]
fn sizes_bounded_with_pareto_tail() {
    let profile = WebLoadProfile::new(WebLevel::High, 200.0);
    let mut rng = Rng::substream(6, 1);
    let sizes: Vec<f64> = gen_web_arrivals(&profile, &mut rng, 400.0).iter().map(|r| r.size as f64).collect();
    assert!(sizes.len() > 100_000);
    assert!(sizes.iter().all(|&s| (MIN_ITEM_BYTES..=MAX_ITEM_BYTES).contains(&s)));

    let n = sizes.len() as f64;
    let points: Vec<(f64, f64)> = [2e3, 5e3, 1e4, 2e4, 5e4, 1e5]
        .iter()
        .map(|&x: &f64| (x.ln(), (sizes.iter().filter(|&&s| s > x).count() as f64 / n).ln()))
        .collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + PARETO_ALPHA).abs() <= 0.1, "log-survival slope {slope}");
}

#[test]
fn arrivals_are_ordered_and_inside_duration() {
    let profile = WebLoadProfile::new(WebLevel::Low, 40.0);
    let mut rng = Rng::substream(7, 1);
    let reqs = gen_web_arrivals(&profile, &mut rng, 100.0);
    assert!(reqs.windows(2).all(|w| w[0].start < w[1].start));
    assert!(reqs.iter().all(|r| r.start > 0.0 && r.start < 100.0));
}
