// SPDX-License-Identifier: Apache-2.0

//! Sender congestion controls.
//!
//! Windows are in MTU-sized segments and may be fractional. Every
//! multiplicative decrease is gated by a sequence fence so at most one
//! happens per round trip: after a decrease, feedback for packets sent
//! before the decrease is ignored.

mod cubic;
mod reno;
mod scalable;

use serde::{Deserialize, Serialize};

pub use cubic::{CubicState, CUBIC_BETA, CUBIC_C};
pub use reno::RENO_BETA;
pub use scalable::{ScalableState, EWMA_GAIN, VIRTUAL_RTT_FLOOR};

use crate::packet::MTU;
use crate::time::SimTime;

pub const MIN_CWND: f64 = 2.0;
pub const INITIAL_CWND: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcKind {
    Reno,
    Cubic,
    /// Prague-like scalable control with RTT independence.
    #[serde(alias = "prague")]
    Scalable,
    /// Unresponsive constant bit rate.
    #[serde(alias = "udp")]
    UdpCbr,
}

impl CcKind {
    /// Exponent `B` of the steady-state law `W ∝ 1/p^B`.
    pub fn response_exponent(self) -> Option<f64> {
        match self {
            CcKind::Reno => Some(0.5),
            CcKind::Cubic => Some(0.75),
            CcKind::Scalable => Some(1.0),
            CcKind::UdpCbr => None,
        }
    }

    pub fn is_scalable(self) -> bool {
        self.response_exponent().is_some_and(|b| b >= 1.0)
    }

    pub fn is_responsive(self) -> bool {
        !matches!(self, CcKind::UdpCbr)
    }

    /// Multiplicative decrease factor applied on a Classic congestion signal.
    pub fn classic_beta(self) -> f64 {
        match self {
            CcKind::Cubic => CUBIC_BETA,
            _ => RENO_BETA,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CcKind::Reno => "reno",
            CcKind::Cubic => "cubic",
            CcKind::Scalable => "scalable",
            CcKind::UdpCbr => "udp_cbr",
        }
    }
}

/// Feedback carried by one acknowledgement.
#[derive(Clone, Copy, Debug)]
pub struct AckEvent {
    pub now: SimTime,
    /// Transmission sequence number being acknowledged.
    pub seq: u64,
    pub ce: bool,
    pub rtt: Option<SimTime>,
    /// Next sequence number the sender will use.
    pub next_seq: u64,
}

#[derive(Clone, Debug)]
pub struct CcState {
    pub kind: CcKind,
    pub cwnd: f64,
    pub ssthresh: f64,
    pub in_slow_start: bool,
    /// Smoothed RTT, seconds; zero until the first sample.
    pub srtt: f64,
    /// Minimum observed RTT (the base RTT estimate), seconds.
    pub base_rtt: f64,
    /// Decreases are ignored for feedback on sequence numbers below this.
    pub(crate) cwr_end: u64,
    /// Fractional additive-increase carry, segments.
    pub(crate) ai_acc: f64,
    pub cubic: CubicState,
    pub scalable: ScalableState,
    /// Classic senders pace only when this is set.
    pub pace_classic: bool,
    decreases: u64,
}

impl CcState {
    pub fn new(kind: CcKind) -> Self {
        CcState {
            kind,
            cwnd: INITIAL_CWND,
            ssthresh: f64::INFINITY,
            in_slow_start: true,
            srtt: 0.0,
            base_rtt: f64::INFINITY,
            cwr_end: 0,
            ai_acc: 0.0,
            cubic: CubicState::default(),
            scalable: ScalableState::default(),
            pace_classic: false,
            decreases: 0,
        }
    }

    pub fn with_cwnd(kind: CcKind, cwnd: f64) -> Self {
        let mut s = CcState::new(kind);
        s.cwnd = cwnd.max(MIN_CWND);
        s
    }

    /// Virtual RTT: the base RTT floored at 25 ms.
    pub fn virtual_rtt(&self) -> f64 {
        scalable::virtual_rtt(self.base_rtt)
    }

    pub fn record_rtt(&mut self, sample: SimTime) {
        let r = sample.as_secs_f64();
        if self.srtt == 0.0 {
            self.srtt = r;
        } else {
            self.srtt = 0.875 * self.srtt + 0.125 * r;
        }
        self.base_rtt = self.base_rtt.min(r);
    }

    /// Number of multiplicative decreases applied so far.
    pub fn decreases(&self) -> u64 {
        self.decreases
    }

    pub fn on_ack(&mut self, ack: &AckEvent) {
        if let Some(rtt) = ack.rtt {
            self.record_rtt(rtt);
        }
        match self.kind {
            CcKind::Reno => reno::on_ack_reno(self, ack),
            CcKind::Cubic => cubic::on_ack_cubic(self, ack),
            CcKind::Scalable => scalable::on_ack_scalable(self, ack),
            CcKind::UdpCbr => {}
        }
    }

    /// A packet with sequence `seq` was detected lost.
    pub fn on_loss(&mut self, now: SimTime, seq: u64, next_seq: u64) {
        if !self.kind.is_responsive() || seq < self.cwr_end {
            return;
        }
        match self.kind {
            CcKind::Cubic => cubic::congestion_event(self, now),
            CcKind::Scalable => scalable::on_loss_scalable(self),
            _ => reno::halve(self),
        }
        self.enter_cwr(next_seq);
    }

    /// Retransmission timeout: collapse to the minimum window and slow start.
    pub fn on_timeout(&mut self, next_seq: u64) {
        if !self.kind.is_responsive() {
            return;
        }
        self.ssthresh = (self.cwnd * self.kind.classic_beta()).max(MIN_CWND);
        self.cwnd = MIN_CWND;
        self.in_slow_start = true;
        self.ai_acc = 0.0;
        self.cubic.epoch_start = None;
        self.cwr_end = next_seq;
        self.decreases += 1;
    }

    pub(crate) fn enter_cwr(&mut self, next_seq: u64) {
        self.cwr_end = next_seq;
        self.in_slow_start = false;
        self.decreases += 1;
    }

    pub(crate) fn may_decrease(&self, seq: u64) -> bool {
        seq >= self.cwr_end
    }

    /// Slow-start growth of one segment per acknowledged segment.
    pub(crate) fn slow_start(&mut self, acked: f64) {
        self.cwnd += acked;
        if self.cwnd >= self.ssthresh {
            self.cwnd = self.cwnd.max(self.ssthresh);
            self.in_slow_start = false;
        }
    }

    /// Whether this sender spaces its packets by [`pacing_rate`].
    pub fn is_paced(&self) -> bool {
        match self.kind {
            CcKind::Scalable => true,
            CcKind::Reno | CcKind::Cubic => self.pace_classic,
            CcKind::UdpCbr => false,
        }
    }
}

/// Pacing rate in bits per second: one window per smoothed RTT.
pub fn pacing_rate(state: &CcState) -> f64 {
    let srtt = if state.srtt > 0.0 { state.srtt } else { 0.1 };
    state.cwnd * f64::from(MTU) * 8.0 / srtt
}

/// Next departure of a constant-bit-rate source sending MTU packets.
pub fn udp_next_departure(rate_bps: f64, now: SimTime) -> SimTime {
    now + SimTime::serialization(MTU, rate_bps)
}
