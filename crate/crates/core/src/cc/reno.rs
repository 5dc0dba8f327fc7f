// SPDX-License-Identifier: Apache-2.0

use super::{AckEvent, CcState, MIN_CWND};

pub const RENO_BETA: f64 = 0.5;

/// Reno: slow start, one segment per window in congestion avoidance, and a
/// halving on the first CE or loss of a round. CE is handled exactly like
/// a loss (no retransmission).
pub fn on_ack_reno(state: &mut CcState, ack: &AckEvent) {
    if ack.ce && state.may_decrease(ack.seq) {
        halve(state);
        state.enter_cwr(ack.next_seq);
        return;
    }
    if state.in_slow_start {
        state.slow_start(1.0);
    } else {
        additive_increase(state, 1.0);
    }
}

/// Adds one segment for every `cwnd` segments acknowledged.
pub(crate) fn additive_increase(state: &mut CcState, acked: f64) {
    state.ai_acc += acked;
    while state.ai_acc >= state.cwnd {
        state.ai_acc -= state.cwnd;
        state.cwnd += 1.0;
    }
}

pub(crate) fn halve(state: &mut CcState) {
    state.cwnd = (state.cwnd * RENO_BETA).max(MIN_CWND);
    state.ssthresh = state.cwnd;
    state.ai_acc = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::CcKind;
    use crate::time::SimTime;

    fn ack(seq: u64, ce: bool) -> AckEvent {
        AckEvent { now: SimTime::ZERO, seq, ce, rtt: None, next_seq: 1000 }
    }

    #[test]
    fn ce_halves_once_per_round() {
        let mut s = CcState::with_cwnd(CcKind::Reno, 100.0);
        s.in_slow_start = false;
        s.on_ack(&ack(10, true));
        assert_eq!(s.cwnd, 50.0);
        // Same round: fenced.
        s.on_ack(&ack(11, true));
        s.on_loss(SimTime::ZERO, 12, 1000);
        assert!(s.cwnd >= 50.0);
        assert_eq!(s.decreases(), 1);
        // Next round.
        s.on_ack(&ack(1000, true));
        assert_eq!(s.cwnd, 25.0);
    }

    #[test]
    fn one_segment_per_window() {
        let mut s = CcState::with_cwnd(CcKind::Reno, 10.0);
        s.in_slow_start = false;
        for i in 0..10 {
            s.on_ack(&ack(i, false));
        }
        assert_eq!(s.cwnd, 11.0);
    }

    #[test]
    fn slow_start_doubles() {
        let mut s = CcState::with_cwnd(CcKind::Reno, 10.0);
        for i in 0..10 {
            s.on_ack(&ack(i, false));
        }
        assert_eq!(s.cwnd, 20.0);
    }

    #[test]
    fn floor_at_minimum() {
        let mut s = CcState::with_cwnd(CcKind::Reno, 3.0);
        s.on_loss(SimTime::ZERO, 5, 10);
        assert_eq!(s.cwnd, MIN_CWND);
    }
}
