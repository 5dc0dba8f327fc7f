// SPDX-License-Identifier: Apache-2.0

//! CUBIC window growth with the Reno-friendly estimate and fast convergence.

use super::{AckEvent, CcState, MIN_CWND};
use crate::time::SimTime;

pub const CUBIC_C: f64 = 0.4;
pub const CUBIC_BETA: f64 = 0.7;

#[derive(Clone, Debug, Default)]
pub struct CubicState {
    pub w_max: f64,
    pub w_last_max: f64,
    pub epoch_start: Option<SimTime>,
    pub k: f64,
    pub origin: f64,
    /// Reno-friendly window estimate.
    pub w_est: f64,
}

/// AIMD increase that matches Reno's average rate with decrease `CUBIC_BETA`.
fn friendly_increase() -> f64 {
    3.0 * (1.0 - CUBIC_BETA) / (1.0 + CUBIC_BETA)
}

pub fn on_ack_cubic(state: &mut CcState, ack: &AckEvent) {
    if ack.ce && state.may_decrease(ack.seq) {
        congestion_event(state, ack.now);
        state.enter_cwr(ack.next_seq);
        return;
    }
    if state.in_slow_start {
        state.slow_start(1.0);
        return;
    }
    let cwnd = state.cwnd;
    let c = &mut state.cubic;
    let epoch = *c.epoch_start.get_or_insert_with(|| {
        if cwnd < c.w_max {
            c.k = ((c.w_max - cwnd) / CUBIC_C).cbrt();
            c.origin = c.w_max;
        } else {
            c.k = 0.0;
            c.origin = cwnd;
        }
        c.w_est = cwnd;
        ack.now
    });
    let t = (ack.now - epoch).as_secs_f64() + state.srtt;
    let w_cubic = CUBIC_C * (t - c.k).powi(3) + c.origin;
    c.w_est += friendly_increase() / cwnd;
    if w_cubic < c.w_est {
        state.cwnd = c.w_est;
    } else {
        let target = w_cubic.min(1.5 * cwnd);
        state.cwnd += (target - cwnd).max(0.0) / cwnd;
    }
}

/// Multiplicative decrease by `CUBIC_BETA` and a new growth epoch.
pub(crate) fn congestion_event(state: &mut CcState, _now: SimTime) {
    let cwnd = state.cwnd;
    let c = &mut state.cubic;
    c.w_max = if cwnd < c.w_last_max { cwnd * (1.0 + CUBIC_BETA) / 2.0 } else { cwnd };
    c.w_last_max = cwnd;
    c.epoch_start = None;
    state.cwnd = (cwnd * CUBIC_BETA).max(MIN_CWND);
    state.ssthresh = state.cwnd;
    state.ai_acc = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc::CcKind;

    fn ack(now_ms: u64, seq: u64, ce: bool) -> AckEvent {
        AckEvent { now: SimTime::from_millis(now_ms), seq, ce, rtt: None, next_seq: seq + 100 }
    }

    #[test]
    fn decrease_is_point_seven() {
        let mut s = CcState::with_cwnd(CcKind::Cubic, 100.0);
        s.in_slow_start = false;
        s.on_ack(&ack(0, 0, true));
        assert!((s.cwnd - 70.0).abs() < 1e-9);
        assert_eq!(s.cubic.w_max, 100.0);
    }

    #[test]
    fn fast_convergence_lowers_w_max() {
        let mut s = CcState::with_cwnd(CcKind::Cubic, 100.0);
        s.in_slow_start = false;
        s.cubic.w_last_max = 120.0;
        s.on_ack(&ack(0, 0, true));
        assert!((s.cubic.w_max - 85.0).abs() < 1e-9);
    }

    #[test]
    fn grows_without_signals() {
        let mut s = CcState::with_cwnd(CcKind::Cubic, 20.0);
        s.in_slow_start = false;
        s.srtt = 0.01;
        let mut seq = 0;
        for ms in 0..20_000u64 {
            for _ in 0..2 {
                s.on_ack(&ack(ms, seq, false));
                seq += 1;
            }
        }
        assert!(s.cwnd > 200.0, "cwnd {}", s.cwnd);
    }

    #[test]
    fn reno_friendly_region_dominates_short_epochs() {
        // Right after a decrease from 30 segments at 10 ms RTT, the cubic
        // curve is nearly flat while the friendly estimate grows ~0.53/RTT.
        let mut s = CcState::with_cwnd(CcKind::Cubic, 30.0);
        s.in_slow_start = false;
        s.srtt = 0.01;
        s.on_ack(&ack(0, 0, true));
        let start = s.cwnd;
        let mut seq = 200;
        for round in 0..10u64 {
            let w = s.cwnd.floor() as u64;
            for _ in 0..w {
                s.on_ack(&ack(1 + round * 10, seq, false));
                seq += 1;
            }
        }
        let growth = s.cwnd - start;
        assert!((growth - 5.3).abs() < 1.0, "growth {growth}");
    }
}
