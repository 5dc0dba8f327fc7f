// SPDX-License-Identifier: Apache-2.0

//! Sender-side state of one flow: congestion control plus the loss
//! detection and retransmission bookkeeping around it.

use std::collections::VecDeque;

use crate::cc::{AckEvent, CcKind, CcState};
use crate::packet::{EcnField, MIN_PACKET, MTU};
use crate::scenario::Side;
use crate::time::SimTime;

/// Later deliveries needed before a gap is declared lost.
pub const DUP_THRESHOLD: u32 = 3;
pub const MIN_RTO: f64 = 1.0;
pub const MAX_RTO: f64 = 60.0;
pub const SYN_RTO: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
struct InFlight {
    seq: u64,
    segment: u64,
    sent_at: SimTime,
    later_acks: u32,
}

#[derive(Debug)]
pub struct Flow {
    pub id: u32,
    pub side: Side,
    pub ecn: EcnField,
    pub rtt: SimTime,
    pub start: SimTime,
    pub cc: CcState,
    /// Index into the metric store's measured flows.
    pub metric: Option<usize>,
    /// UDP sending rate, bits per second.
    pub udp_rate: f64,

    pub handshake_attempts: u32,
    pub handshake_sent_at: SimTime,
    pub handshake_delivered: bool,
    pub established: bool,

    pub next_seq: u64,
    next_segment: u64,
    size: Option<u64>,
    segments: Option<u64>,
    inflight: VecDeque<InFlight>,
    retx: VecDeque<u64>,
    delivered: Vec<u64>,
    delivered_count: u64,
    last_delivery: SimTime,
    pub done: bool,

    pub next_send_at: SimTime,
    pub wake_pending: Option<SimTime>,
    backoff: u32,
    pub rto_deadline: Option<SimTime>,
    pub rto_check_pending: bool,
}

/// What the engine must do after an acknowledgement.
#[derive(Debug, Default, PartialEq)]
pub struct AckOutcome {
    pub losses_detected: u32,
    /// Completion time of a finite flow that just finished.
    pub completed: Option<SimTime>,
}

impl Flow {
    pub fn new(
        id: u32,
        side: Side,
        cc: CcKind,
        ecn: EcnField,
        rtt: SimTime,
        start: SimTime,
        size: Option<u64>,
    ) -> Self {
        let segments = size.map(|s| s.div_ceil(u64::from(MTU)).max(1));
        let words = segments.map_or(0, |n| n.div_ceil(64) as usize);
        Flow {
            id,
            side,
            ecn,
            rtt,
            start,
            cc: CcState::new(cc),
            metric: None,
            udp_rate: 0.0,
            handshake_attempts: 0,
            handshake_sent_at: SimTime::ZERO,
            handshake_delivered: false,
            established: false,
            next_seq: 0,
            next_segment: 0,
            size,
            segments,
            inflight: VecDeque::new(),
            retx: VecDeque::new(),
            delivered: vec![0; words],
            delivered_count: 0,
            last_delivery: SimTime::ZERO,
            done: false,
            next_send_at: SimTime::ZERO,
            wake_pending: None,
            backoff: 0,
            rto_deadline: None,
            rto_check_pending: false,
        }
    }

    pub fn is_udp(&self) -> bool {
        self.cc.kind == CcKind::UdpCbr
    }

    pub fn size(&self) -> Option<u64> {
        self.size
    }

    pub fn inflight(&self) -> usize {
        self.inflight.len()
    }

    /// Size of segment `seg` on the wire.
    pub fn segment_size(&self, seg: u64) -> u32 {
        match self.size {
            None => MTU,
            Some(total) => {
                let remaining = total.saturating_sub(seg * u64::from(MTU));
                (remaining.min(u64::from(MTU)) as u32).max(MIN_PACKET)
            }
        }
    }

    fn has_new_data(&self) -> bool {
        self.segments.is_none_or(|n| self.next_segment < n)
    }

    /// Window and data both allow another transmission.
    pub fn can_send(&self) -> bool {
        self.established
            && !self.done
            && (self.inflight.len() as f64) + 1.0 <= self.cc.cwnd
            && (!self.retx.is_empty() || self.has_new_data())
    }

    /// Takes the next segment to transmit (retransmissions first) and
    /// records it in flight under a fresh sequence number.
    pub fn take_segment(&mut self, now: SimTime) -> (u64, u64) {
        let segment = match self.retx.pop_front() {
            Some(s) => s,
            None => {
                let s = self.next_segment;
                self.next_segment += 1;
                s
            }
        };
        let seq = self.next_seq;
        self.next_seq += 1;
        self.inflight.push_back(InFlight { seq, segment, sent_at: now, later_acks: 0 });
        (seq, segment)
    }

    pub fn rto(&self) -> SimTime {
        let base = MIN_RTO.max(2.0 * self.cc.srtt);
        SimTime::from_secs_f64((base * f64::from(1u32 << self.backoff.min(16))).min(MAX_RTO))
    }

    fn is_delivered(&self, seg: u64) -> bool {
        self.delivered.get((seg / 64) as usize).is_some_and(|w| w & (1 << (seg % 64)) != 0)
    }

    fn mark_delivered(&mut self, seg: u64, at: SimTime) -> bool {
        let Some(w) = self.delivered.get_mut((seg / 64) as usize) else {
            return false;
        };
        let bit = 1 << (seg % 64);
        if *w & bit != 0 {
            return false;
        }
        *w |= bit;
        self.delivered_count += 1;
        self.last_delivery = self.last_delivery.max(at);
        true
    }

    pub fn on_ack(&mut self, now: SimTime, seq: u64, segment: u64, ce: bool, delivered_at: SimTime) -> AckOutcome {
        let mut out = AckOutcome::default();
        if self.done {
            return out;
        }
        let pos = self.inflight.binary_search_by_key(&seq, |e| e.seq);
        let rtt = pos.ok().map(|i| now.saturating_sub(self.inflight[i].sent_at));
        let before = match pos {
            Ok(i) | Err(i) => i,
        };
        let mut lost = Vec::new();
        let mut i = 0;
        let mut limit = before;
        while i < limit {
            let e = &mut self.inflight[i];
            e.later_acks += 1;
            if e.later_acks >= DUP_THRESHOLD {
                let e = self.inflight.remove(i).expect("index in range");
                lost.push(e);
                limit -= 1;
            } else {
                i += 1;
            }
        }
        if pos.is_ok() {
            self.inflight.remove(limit);
        }
        for e in &lost {
            if !self.is_delivered(e.segment) {
                self.retx.push_back(e.segment);
            }
            self.cc.on_loss(now, e.seq, self.next_seq);
        }
        out.losses_detected = lost.len() as u32;

        self.cc.on_ack(&AckEvent { now, seq, ce, rtt, next_seq: self.next_seq });
        self.backoff = 0;
        self.rto_deadline = (!self.inflight.is_empty()).then(|| now + self.rto());

        if self.segments.is_some()
            && self.mark_delivered(segment, delivered_at)
            && Some(self.delivered_count) == self.segments
        {
            self.done = true;
            self.inflight.clear();
            self.retx.clear();
            self.rto_deadline = None;
            out.completed = Some(self.last_delivery);
        }
        out
    }

    /// Retransmission timeout: everything in flight is presumed lost.
    pub fn on_timeout(&mut self) {
        let mut segs: Vec<u64> = self.inflight.drain(..).map(|e| e.segment).collect();
        segs.extend(self.retx.drain(..));
        segs.sort_unstable();
        segs.dedup();
        let delivered: Vec<bool> = segs.iter().map(|&s| self.is_delivered(s)).collect();
        self.retx = segs.into_iter().zip(delivered).filter(|&(_, d)| !d).map(|(s, _)| s).collect();
        self.cc.on_timeout(self.next_seq);
        self.backoff += 1;
    }

    pub fn arm_rto(&mut self, now: SimTime) {
        if self.rto_deadline.is_none() {
            self.rto_deadline = Some(now + self.rto());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flow(size: Option<u64>) -> Flow {
        let mut f =
            Flow::new(0, Side::Classic, CcKind::Reno, EcnField::NotEct, SimTime::from_millis(10), SimTime::ZERO, size);
        f.established = true;
        f
    }

    #[test]
    fn segment_sizes() {
        let f = flow(Some(3100));
        assert_eq!(f.segments, Some(3));
        assert_eq!(f.segment_size(0), 1500);
        assert_eq!(f.segment_size(1), 1500);
        assert_eq!(f.segment_size(2), 100);
        let f = flow(Some(10));
        assert_eq!(f.segment_size(0), MIN_PACKET);
    }

    #[test]
    fn window_limits_sending() {
        let mut f = flow(None);
        let mut n = 0;
        while f.can_send() {
            f.take_segment(SimTime::ZERO);
            n += 1;
        }
        assert_eq!(n, 10);
    }

    #[test]
    fn gap_detected_after_three_later_acks() {
        let mut f = flow(None);
        f.cc.in_slow_start = false;
        for _ in 0..6 {
            f.take_segment(SimTime::ZERO);
        }
        let t = SimTime::from_millis(10);
        // seq 1 was dropped.
        assert_eq!(f.on_ack(t, 0, 0, false, t).losses_detected, 0);
        assert_eq!(f.on_ack(t, 2, 2, false, t).losses_detected, 0);
        assert_eq!(f.on_ack(t, 3, 3, false, t).losses_detected, 0);
        assert_eq!(f.on_ack(t, 4, 4, false, t).losses_detected, 1);
        assert_eq!(f.retx, VecDeque::from(vec![1]));
        assert_eq!(f.cc.decreases(), 1);
        let (seq, seg) = f.take_segment(t);
        assert_eq!((seq, seg), (6, 1));
    }

    #[test]
    fn finite_flow_completes_at_last_delivery() {
        let mut f = flow(Some(3000));
        f.take_segment(SimTime::ZERO);
        f.take_segment(SimTime::ZERO);
        let t = SimTime::from_millis(20);
        assert_eq!(f.on_ack(t, 1, 1, false, SimTime::from_millis(15)).completed, None);
        let out = f.on_ack(t, 0, 0, false, SimTime::from_millis(12));
        assert_eq!(out.completed, Some(SimTime::from_millis(15)));
        assert!(f.done);
        assert!(!f.can_send());
    }

    #[test]
    fn timeout_requeues_everything() {
        let mut f = flow(Some(4500));
        for _ in 0..3 {
            f.take_segment(SimTime::ZERO);
        }
        let rto0 = f.rto();
        f.on_timeout();
        assert_eq!(f.inflight(), 0);
        assert_eq!(f.retx, VecDeque::from(vec![0, 1, 2]));
        assert_eq!(f.cc.cwnd, 2.0);
        assert_eq!(f.rto(), rto0 + rto0);
    }

    #[test]
    fn rto_floor() {
        let mut f = flow(None);
        assert_eq!(f.rto(), SimTime::from_secs(1));
        f.cc.srtt = 0.8;
        assert_eq!(f.rto(), SimTime::from_millis(1600));
    }
}
