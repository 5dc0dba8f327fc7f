// SPDX-License-Identifier: Apache-2.0

//! Deterministic discrete-event simulator of a single bottleneck link
//! managed by the DualQ Coupled AQM (DualPI2) or a baseline AQM, driven by
//! Reno, CUBIC, scalable and constant-rate sources.
//!
//! ```no_run
//! use dualq::scenario::{AqmKind, FlowSpec, Scenario};
//! use dualq::cc::CcKind;
//!
//! let sc = Scenario::new("demo", AqmKind::Dualpi2, 40.0)
//!     .with_flow(FlowSpec::long(CcKind::Scalable, 10.0))
//!     .with_flow(FlowSpec::long(CcKind::Cubic, 10.0))
//!     .with_duration(30.0);
//! let out = dualq::harness::run_one(&sc).unwrap();
//! println!("{:?}", out.report.mean("qdelay_l_ms"));
//! ```

pub mod analysis;
pub mod aqm;
pub mod cc;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod packet;
pub mod rng;
pub mod scenario;
pub mod sim;
pub mod time;
pub mod workload;

pub use error::{Error, Result};
pub use time::SimTime;
