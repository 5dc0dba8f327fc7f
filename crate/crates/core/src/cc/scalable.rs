// SPDX-License-Identifier: Apache-2.0

//! Prague-like scalable congestion control.
//!
//! DCTCP-style EWMA of the marked fraction, a decrease of `alpha/2` of the
//! window at most once per virtual round, and RTT independence: rounds are
//! stretched to the virtual RTT `max(base_rtt, 25 ms)` and the additive
//! increase is `base_rtt / virtual_rtt` segments per virtual round. In
//! steady state this gives `W = 2 (R_b / R_v) / p`, i.e. a rate of
//! `2 / (R_v p)` and about two marks per virtual round.

use super::{reno, AckEvent, CcState, MIN_CWND};
use crate::time::SimTime;

pub const EWMA_GAIN: f64 = 1.0 / 16.0;
pub const VIRTUAL_RTT_FLOOR: f64 = 0.025;

#[derive(Clone, Debug)]
pub struct ScalableState {
    /// EWMA of the per-round marked fraction.
    pub alpha: f64,
    round_start: Option<SimTime>,
    acked_in_round: u64,
    marked_in_round: u64,
    reduced_in_round: bool,
    /// Completed virtual rounds since the last stats reset.
    pub rounds: u64,
    /// CE marks received since the last stats reset.
    pub marks: u64,
}

impl Default for ScalableState {
    fn default() -> Self {
        ScalableState {
            alpha: 1.0,
            round_start: None,
            acked_in_round: 0,
            marked_in_round: 0,
            reduced_in_round: false,
            rounds: 0,
            marks: 0,
        }
    }
}

impl ScalableState {
    pub fn reset_stats(&mut self) {
        self.rounds = 0;
        self.marks = 0;
    }

    /// Average CE marks per completed virtual round since the last reset.
    pub fn marks_per_round(&self) -> Option<f64> {
        (self.rounds > 0).then(|| self.marks as f64 / self.rounds as f64)
    }
}

pub fn virtual_rtt(base_rtt: f64) -> f64 {
    if base_rtt.is_finite() {
        base_rtt.max(VIRTUAL_RTT_FLOOR)
    } else {
        VIRTUAL_RTT_FLOOR
    }
}

/// One EWMA step with the round's marked fraction `f`.
pub fn ewma_update(state: &mut CcState, f: f64) {
    let a = &mut state.scalable.alpha;
    *a = ((1.0 - EWMA_GAIN) * *a + EWMA_GAIN * f).clamp(0.0, 1.0);
}

/// `cwnd * (1 - alpha / 2)`, floored at the minimum window.
pub fn multiplicative_decrease(state: &mut CcState) {
    state.cwnd = (state.cwnd * (1.0 - state.scalable.alpha / 2.0)).max(MIN_CWND);
    state.ssthresh = state.cwnd;
}

fn round_length(state: &CcState) -> SimTime {
    SimTime::from_secs_f64(state.srtt.max(VIRTUAL_RTT_FLOOR))
}

pub fn on_ack_scalable(state: &mut CcState, ack: &AckEvent) {
    let round_start = *state.scalable.round_start.get_or_insert(ack.now);
    {
        let s = &mut state.scalable;
        s.acked_in_round += 1;
        if ack.ce {
            s.marked_in_round += 1;
            s.marks += 1;
        }
    }

    if ack.ce && !state.scalable.reduced_in_round && state.may_decrease(ack.seq) {
        multiplicative_decrease(state);
        state.scalable.reduced_in_round = true;
        state.enter_cwr(ack.next_seq);
    } else if !ack.ce {
        if state.in_slow_start {
            state.slow_start(1.0);
        } else {
            let ratio = state.base_rtt.min(virtual_rtt(state.base_rtt)) / virtual_rtt(state.base_rtt);
            // (R_b/R_v)^2 per real round is R_b/R_v per virtual round.
            state.cwnd += ratio * ratio / state.cwnd;
        }
    }

    if ack.now >= round_start + round_length(state) {
        let s = &state.scalable;
        let f = s.marked_in_round as f64 / s.acked_in_round.max(1) as f64;
        ewma_update(state, f);
        let s = &mut state.scalable;
        s.rounds += 1;
        s.acked_in_round = 0;
        s.marked_in_round = 0;
        s.reduced_in_round = false;
        s.round_start = Some(ack.now);
    }
}

/// Loss is answered like a Classic flow: halve.
pub(crate) fn on_loss_scalable(state: &mut CcState) {
    reno::halve(state);
}
