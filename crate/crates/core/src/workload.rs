// SPDX-License-Identifier: Apache-2.0

//! Traffic generators and the standard scenario grids.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cc::CcKind;
use crate::error::{Error, Result};
use crate::packet::EcnField;
use crate::rng::Rng;
use crate::scenario::{AqmKind, FlowSpec, Scenario, WebLoad, WebSide};

pub const PARETO_ALPHA: f64 = 0.9;
pub const MIN_ITEM_BYTES: f64 = 1_000.0;
pub const MAX_ITEM_BYTES: f64 = 1_000_000.0;

pub const LINK_RATES_MBPS: [f64; 5] = [4.0, 12.0, 40.0, 120.0, 200.0];
pub const BASE_RTTS_MS: [f64; 5] = [5.0, 10.0, 20.0, 50.0, 100.0];
/// UDP sending rates of the overload grid, as fractions of capacity.
pub const OVERLOAD_UDP_FRACTIONS: [f64; 5] = [0.5, 0.7, 1.0, 1.4, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WebLevel {
    Low,
    High,
}

impl WebLevel {
    /// Requests per second per 4 Mb/s of link capacity.
    pub fn requests_per_4mbps(self) -> f64 {
        match self {
            WebLevel::Low => 1.0,
            WebLevel::High => 10.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WebLevel::Low => "low",
            WebLevel::High => "high",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WebLoadProfile {
    pub level: WebLevel,
    /// Requests per second.
    pub arrival_rate: f64,
    pub pareto_alpha: f64,
    pub min_bytes: f64,
    pub max_bytes: f64,
}

impl WebLoadProfile {
    pub fn new(level: WebLevel, link_mbps: f64) -> Self {
        WebLoadProfile {
            level,
            arrival_rate: level.requests_per_4mbps() * link_mbps / 4.0,
            pareto_alpha: PARETO_ALPHA,
            min_bytes: MIN_ITEM_BYTES,
            max_bytes: MAX_ITEM_BYTES,
        }
    }

    /// Inverse-CDF of the truncated Pareto item size.
    pub fn size_for(&self, u: f64) -> u64 {
        let u = u.max(f64::MIN_POSITIVE);
        let x = self.min_bytes * u.powf(-1.0 / self.pareto_alpha);
        x.clamp(self.min_bytes, self.max_bytes).round() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WebRequest {
    /// Seconds since simulation start.
    pub start: f64,
    pub size: u64,
}

/// Poisson request arrivals with Pareto item sizes over `[0, duration)`.
pub fn gen_web_arrivals(profile: &WebLoadProfile, rng: &mut Rng, duration: f64) -> Vec<WebRequest> {
    let mut out = Vec::new();
    if profile.arrival_rate <= 0.0 {
        return out;
    }
    let mut t = 0.0;
    loop {
        t += rng.exponential(profile.arrival_rate);
        if t >= duration {
            break;
        }
        let u = 1.0 - rng.uniform();
        out.push(WebRequest { start: t, size: profile.size_for(u) });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    Basic,
    Multiflow,
    MixedRtt,
    Dynamic,
    Overload,
}

impl GridKind {
    pub const ALL: [GridKind; 5] =
        [GridKind::Basic, GridKind::Multiflow, GridKind::MixedRtt, GridKind::Dynamic, GridKind::Overload];

    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::Basic => "basic",
            GridKind::Multiflow => "multiflow",
            GridKind::MixedRtt => "mixed_rtt",
            GridKind::Dynamic => "dynamic",
            GridKind::Overload => "overload",
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GridKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.as_str().replace('_', "-") == s)
            .ok_or_else(|| Error::UnknownGrid(s.to_string()))
    }
}

/// The three compared AQMs. Each entry gives the ECN-capable side's flow
/// template; the Classic side is always CUBIC.
pub const GRID_AQMS: [AqmKind; 3] = [AqmKind::Dualpi2, AqmKind::Pie, AqmKind::Pi2];

/// ECN-capable flow used against `aqm`: the scalable control in the DualQ,
/// ECN-CUBIC on the single-queue baselines.
pub fn ecn_flow(aqm: AqmKind, rtt_ms: f64) -> FlowSpec {
    match aqm {
        AqmKind::Dualpi2 => FlowSpec::long(CcKind::Scalable, rtt_ms),
        _ => FlowSpec::long(CcKind::Cubic, rtt_ms).with_ecn(EcnField::Ect0),
    }
}

pub fn classic_flow(rtt_ms: f64) -> FlowSpec {
    FlowSpec::long(CcKind::Cubic, rtt_ms)
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        format!("{x}").replace('.', "p")
    }
}

/// One ECN-capable and one Classic long flow.
pub fn basic_scenario(aqm: AqmKind, rate_mbps: f64, rtt_ms: f64, duration: f64, seed: u64) -> Scenario {
    let name = format!("{}_r{}_rtt{}", aqm.as_str(), fmt_num(rate_mbps), fmt_num(rtt_ms));
    Scenario::new(name, aqm, rate_mbps)
        .with_flow(ecn_flow(aqm, rtt_ms))
        .with_flow(classic_flow(rtt_ms))
        .with_duration(duration)
        .with_seed(seed)
}

pub fn multiflow_scenario(aqm: AqmKind, n_ecn: u32, n_classic: u32, duration: f64, seed: u64) -> Scenario {
    let mut sc = Scenario::new(format!("{}_a{n_ecn}_b{n_classic}", aqm.as_str()), aqm, 40.0)
        .with_duration(duration)
        .with_seed(seed);
    if n_ecn > 0 {
        sc.flows.push(ecn_flow(aqm, 10.0).with_count(n_ecn));
    }
    if n_classic > 0 {
        sc.flows.push(classic_flow(10.0).with_count(n_classic));
    }
    sc
}

/// Flow A is the ECN-capable side, flow B the Classic side unless `b_cc`
/// says otherwise.
pub fn mixed_rtt_scenario(aqm: AqmKind, a_rtt: f64, b: FlowSpec, duration: f64, seed: u64) -> Scenario {
    let name = format!("{}_a{}_b{}{}", aqm.as_str(), fmt_num(a_rtt), b.cc.as_str(), fmt_num(b.rtt_ms));
    Scenario::new(name, aqm, 40.0).with_flow(ecn_flow(aqm, a_rtt)).with_flow(b).with_duration(duration).with_seed(seed)
}

pub fn dynamic_scenario(
    aqm: AqmKind,
    rate_mbps: f64,
    rtt_ms: f64,
    level: WebLevel,
    duration: f64,
    seed: u64,
) -> Scenario {
    let mut sc = basic_scenario(aqm, rate_mbps, rtt_ms, duration, seed);
    sc.name = format!("{}_{}", sc.name, level.as_str());
    let a = ecn_flow(aqm, rtt_ms);
    let b = classic_flow(rtt_ms);
    sc.web = Some(WebLoad {
        level,
        sides: vec![WebSide { cc: a.cc, ecn: a.ecn, rtt_ms }, WebSide { cc: b.cc, ecn: b.ecn, rtt_ms }],
    });
    sc
}

pub fn overload_scenario(udp_fraction: f64, udp_ecn: EcnField, duration: f64, seed: u64) -> Scenario {
    let class = if udp_ecn == EcnField::Ect1 { "ect1" } else { "notect" };
    let name = format!("dualpi2_udp{}_{class}", fmt_num(udp_fraction * 100.0));
    Scenario::new(name, AqmKind::Dualpi2, 100.0)
        .with_flow(FlowSpec::long(CcKind::Scalable, 10.0).with_count(5))
        .with_flow(FlowSpec::long(CcKind::Cubic, 10.0).with_count(5))
        .with_flow(FlowSpec::udp(udp_fraction, udp_ecn, 10.0))
        .with_duration(duration)
        .with_seed(seed)
}

pub fn build_scenario_grid(kind: GridKind, duration: f64, seed: u64) -> Vec<Scenario> {
    let mut out = Vec::new();
    match kind {
        GridKind::Basic => {
            for aqm in GRID_AQMS {
                for rate in LINK_RATES_MBPS {
                    for rtt in BASE_RTTS_MS {
                        out.push(basic_scenario(aqm, rate, rtt, duration, seed));
                    }
                }
            }
        }
        GridKind::Multiflow => {
            for aqm in GRID_AQMS {
                for a in 0..=10 {
                    for b in 0..=10 {
                        if a + b > 0 {
                            out.push(multiflow_scenario(aqm, a, b, duration, seed));
                        }
                    }
                }
            }
        }
        GridKind::MixedRtt => {
            for aqm in GRID_AQMS {
                for a in [5.0, 100.0] {
                    for b in BASE_RTTS_MS {
                        out.push(mixed_rtt_scenario(aqm, a, classic_flow(b), duration, seed));
                    }
                }
            }
            for b_cc in [CcKind::Reno, CcKind::Scalable] {
                for a in [5.0, 100.0] {
                    for b in BASE_RTTS_MS {
                        let flow = FlowSpec::long(b_cc, b);
                        out.push(mixed_rtt_scenario(AqmKind::Dualpi2, a, flow, duration, seed));
                    }
                }
            }
        }
        GridKind::Dynamic => {
            for level in [WebLevel::Low, WebLevel::High] {
                for aqm in GRID_AQMS {
                    for rate in LINK_RATES_MBPS {
                        for rtt in BASE_RTTS_MS {
                            out.push(dynamic_scenario(aqm, rate, rtt, level, duration, seed));
                        }
                    }
                }
            }
        }
        GridKind::Overload => {
            for ecn in [EcnField::Ect1, EcnField::NotEct] {
                for frac in OVERLOAD_UDP_FRACTIONS {
                    out.push(overload_scenario(frac, ecn, duration, seed));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrival_rate_scales_with_link() {
        assert_eq!(WebLoadProfile::new(WebLevel::Low, 4.0).arrival_rate, 1.0);
        assert_eq!(WebLoadProfile::new(WebLevel::High, 4.0).arrival_rate, 10.0);
        assert_eq!(WebLoadProfile::new(WebLevel::Low, 200.0).arrival_rate, 50.0);
        assert_eq!(WebLoadProfile::new(WebLevel::High, 200.0).arrival_rate, 500.0);
        assert_eq!(WebLoadProfile::new(WebLevel::High, 120.0).arrival_rate, 300.0);
    }

    #[test]
    fn inverse_cdf_points() {
        let p = WebLoadProfile::new(WebLevel::Low, 40.0);
        assert_eq!(p.size_for(1.0 - 1e-12), 1000);
        let expect = 1000.0 * 2f64.powf(1.0 / 0.9);
        assert_eq!(p.size_for(0.5), expect.round() as u64);
        assert_eq!(p.size_for(1e-9), 1_000_000);
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(build_scenario_grid(GridKind::Basic, 60.0, 1).len(), 75);
        assert_eq!(build_scenario_grid(GridKind::Overload, 60.0, 1).len(), 10);
        assert_eq!(build_scenario_grid(GridKind::Multiflow, 60.0, 1).len(), 3 * 120);
        assert_eq!(build_scenario_grid(GridKind::Dynamic, 60.0, 1).len(), 150);
        assert_eq!(build_scenario_grid(GridKind::MixedRtt, 60.0, 1).len(), 3 * 10 + 2 * 10);
    }

    #[test]
    fn grid_names_unique_and_valid() {
        for kind in GridKind::ALL {
            let grid = build_scenario_grid(kind, 60.0, 1);
            let mut names: Vec<_> = grid.iter().map(|s| s.name.clone()).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), grid.len(), "{kind}");
            for sc in &grid {
                sc.validate().unwrap();
            }
        }
    }

    #[test]
    fn multiflow_has_no_empty_cell() {
        let grid = build_scenario_grid(GridKind::Multiflow, 60.0, 1);
        assert!(grid.iter().all(|s| s.flows.iter().map(|f| f.count).sum::<u32>() > 0));
    }

    #[test]
    fn grid_kind_parses() {
        assert_eq!("mixed_rtt".parse::<GridKind>().unwrap(), GridKind::MixedRtt);
        assert_eq!("mixed-rtt".parse::<GridKind>().unwrap(), GridKind::MixedRtt);
        assert!("fq".parse::<GridKind>().is_err());
    }
}
