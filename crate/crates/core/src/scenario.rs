// SPDX-License-Identifier: Apache-2.0

//! Scenario description, loaded from and saved to TOML.
//!
//! ```toml
//! name = "dualpi2_r40_rtt10"
//! seed = 1
//! duration = 60.0
//! aqm = "dualpi2"
//!
//! [link]
//! rate_mbps = 40.0
//!
//! [dualpi2]          # optional, any field of the AQM's config
//! target = 0.015
//!
//! [[flow]]
//! cc = "scalable"
//! rtt_ms = 10.0
//!
//! [[flow]]
//! cc = "cubic"
//! rtt_ms = 10.0
//!
//! [web]              # optional short-flow load
//! level = "high"
//! [[web.side]]
//! cc = "scalable"
//! rtt_ms = 10.0
//! [[web.side]]
//! cc = "cubic"
//! rtt_ms = 10.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aqm::{
    Aqm, DualPi2, DualPi2Config, HeldConfig, HeldProbability, Pi2Single, Pi2SingleConfig, Pie, PieConfig, TailDrop,
    TailDropConfig,
};
use crate::cc::CcKind;
use crate::error::{Error, Result};
use crate::metrics::warmup_time;
use crate::packet::EcnField;
use crate::workload::WebLevel;

pub const DEFAULT_DURATION: f64 = 250.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AqmKind {
    #[default]
    Dualpi2,
    Pie,
    Pi2,
    Taildrop,
    /// Constant-probability signaller for open-loop tests.
    Held,
}

impl AqmKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AqmKind::Dualpi2 => "dualpi2",
            AqmKind::Pie => "pie",
            AqmKind::Pi2 => "pi2",
            AqmKind::Taildrop => "taildrop",
            AqmKind::Held => "held",
        }
    }
}

/// Which side of the comparison a flow belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// ECN-capable congestion control (Scalable, or ECN-Classic on baselines).
    Ecn,
    Classic,
    Udp,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Ecn => "ecn",
            Side::Classic => "classic",
            Side::Udp => "udp",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub rate_mbps: f64,
}

impl LinkSpec {
    pub fn rate_bps(&self) -> f64 {
        self.rate_mbps * 1e6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub cc: CcKind,
    /// Codepoint of data packets; defaults to ECT(1) for scalable and
    /// Not-ECT otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecn: Option<EcnField>,
    #[serde(default = "one")]
    pub count: u32,
    pub rtt_ms: f64,
    #[serde(default)]
    pub start_s: f64,
    /// Finite flow size; unbounded when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size_bytes: Option<u64>,
    /// UDP sending rate as a fraction of link capacity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_fraction: Option<f64>,
    /// Pace a Classic sender (scalable senders always pace).
    #[serde(default, skip_serializing_if = "is_false")]
    pub pacing: bool,
}

fn one() -> u32 {
    1
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl FlowSpec {
    pub fn long(cc: CcKind, rtt_ms: f64) -> Self {
        FlowSpec { cc, ecn: None, count: 1, rtt_ms, start_s: 0.0, size_bytes: None, rate_fraction: None, pacing: false }
    }

    pub fn with_ecn(mut self, ecn: EcnField) -> Self {
        self.ecn = Some(ecn);
        self
    }

    pub fn with_count(mut self, count: u32) -> Self {
        self.count = count;
        self
    }

    pub fn starting_at(mut self, start_s: f64) -> Self {
        self.start_s = start_s;
        self
    }

    pub fn udp(rate_fraction: f64, ecn: EcnField, rtt_ms: f64) -> Self {
        FlowSpec {
            cc: CcKind::UdpCbr,
            ecn: Some(ecn),
            count: 1,
            rtt_ms,
            start_s: 0.0,
            size_bytes: None,
            rate_fraction: Some(rate_fraction),
            pacing: false,
        }
    }

    pub fn data_ecn(&self) -> EcnField {
        self.ecn.unwrap_or(default_ecn(self.cc))
    }

    pub fn side(&self) -> Side {
        side_of(self.cc, self.data_ecn())
    }
}

pub fn default_ecn(cc: CcKind) -> EcnField {
    match cc {
        CcKind::Scalable => EcnField::Ect1,
        _ => EcnField::NotEct,
    }
}

pub fn side_of(cc: CcKind, ecn: EcnField) -> Side {
    match cc {
        CcKind::UdpCbr => Side::Udp,
        _ if ecn.is_ecn_capable() => Side::Ecn,
        _ => Side::Classic,
    }
}

/// Web traffic: a single request stream whose requests alternate between
/// the listed server sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebLoad {
    pub level: WebLevel,
    #[serde(rename = "side")]
    pub sides: Vec<WebSide>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebSide {
    pub cc: CcKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecn: Option<EcnField>,
    pub rtt_ms: f64,
}

impl WebSide {
    pub fn data_ecn(&self) -> EcnField {
        self.ecn.unwrap_or(default_ecn(self.cc))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Simulated seconds.
    #[serde(default = "default_duration")]
    pub duration: f64,
    /// Measurement warm-up override, seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<f64>,
    pub aqm: AqmKind,
    pub link: LinkSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dualpi2: Option<DualPi2Config>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pie: Option<PieConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi2: Option<Pi2SingleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taildrop: Option<TailDropConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub held: Option<HeldConfig>,
    #[serde(default, rename = "flow", skip_serializing_if = "Vec::is_empty")]
    pub flows: Vec<FlowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub web: Option<WebLoad>,
}

fn default_duration() -> f64 {
    DEFAULT_DURATION
}

impl Scenario {
    pub fn new(name: impl Into<String>, aqm: AqmKind, rate_mbps: f64) -> Self {
        Scenario {
            name: name.into(),
            seed: 1,
            duration: DEFAULT_DURATION,
            warmup: None,
            aqm,
            link: LinkSpec { rate_mbps },
            dualpi2: None,
            pie: None,
            pi2: None,
            taildrop: None,
            held: None,
            flows: Vec::new(),
            web: None,
        }
    }

    pub fn with_flow(mut self, flow: FlowSpec) -> Self {
        self.flows.push(flow);
        self
    }

    pub fn with_duration(mut self, duration: f64) -> Self {
        self.duration = duration;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let sc = Scenario::from_toml_str(&text)
            .map_err(|e| Error::Parse { path: path.to_path_buf(), message: e.to_string() })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    /// Rejects scenarios that cannot be simulated meaningfully.
    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Scenario(m));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return err(format!("name `{}` must be non-empty and path-safe", self.name));
        }
        if !(self.link.rate_mbps > 0.0) {
            return err("link.rate_mbps must be positive".into());
        }
        if !(self.duration > 0.0) {
            return err("duration must be positive".into());
        }
        if self.flows.iter().map(|f| f.count).sum::<u32>() == 0 && self.web.is_none() {
            return err("scenario has no traffic".into());
        }
        for f in &self.flows {
            if !(f.rtt_ms > 0.0) {
                return err(format!("flow rtt_ms must be positive, got {}", f.rtt_ms));
            }
            if f.start_s < 0.0 {
                return err("flow start_s must be non-negative".into());
            }
            if f.cc == CcKind::UdpCbr {
                match f.rate_fraction {
                    Some(r) if r > 0.0 => {}
                    _ => return err("udp flows need a positive rate_fraction".into()),
                }
                if !matches!(f.data_ecn(), EcnField::Ect1 | EcnField::NotEct) {
                    return err("udp flows must be ect1 or not-ect".into());
                }
            }
            if f.size_bytes == Some(0) {
                return err("size_bytes must be positive".into());
            }
        }
        if let Some(web) = &self.web {
            if web.sides.is_empty() {
                return err("web load needs at least one side".into());
            }
            for w in &web.sides {
                if !(w.rtt_ms > 0.0) {
                    return err("web rtt_ms must be positive".into());
                }
                if w.cc == CcKind::UdpCbr {
                    return err("web traffic must use a responsive congestion control".into());
                }
            }
        }
        if let Some(w) = self.warmup {
            if !(w >= 0.0) {
                return err("warmup must be non-negative".into());
            }
        }
        self.build_aqm().map(|_| ())
    }

    pub fn build_aqm(&self) -> Result<Box<dyn Aqm>> {
        let rate = self.link.rate_bps();
        Ok(match self.aqm {
            AqmKind::Dualpi2 => Box::new(DualPi2::new(self.dualpi2.clone().unwrap_or_default(), rate)?),
            AqmKind::Pie => Box::new(Pie::new(self.pie.clone().unwrap_or_default())?),
            AqmKind::Pi2 => Box::new(Pi2Single::new(self.pi2.clone().unwrap_or_default())?),
            AqmKind::Taildrop => Box::new(TailDrop::new(self.taildrop.clone().unwrap_or_default())?),
            AqmKind::Held => Box::new(HeldProbability::new(self.held.clone().unwrap_or_default())?),
        })
    }

    /// Measurement warm-up in seconds.
    ///
    /// Defaults to `5 + rate_Mbps * rtt_ms / 100` on the longest long-flow
    /// RTT, capped at half the run so short desk runs still measure.
    pub fn warmup_secs(&self) -> f64 {
        if let Some(w) = self.warmup {
            return w.min(self.duration);
        }
        let rtt = self.flows.iter().filter(|f| f.size_bytes.is_none()).map(|f| f.rtt_ms).fold(0.0, f64::max);
        warmup_time(self.link.rate_mbps, rtt).min(self.duration / 2.0)
    }
}
