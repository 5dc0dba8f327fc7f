// SPDX-License-Identifier: Apache-2.0

//! DualQ Coupled AQM with a PI² base controller.
//!
//! Packets are classified on the ECN LSB into an L4S queue (ECT(1), CE) and a
//! Classic queue (Not-ECT, ECT(0)). A PI controller driven by the larger of
//! the two head sojourn times produces the base probability `p'`; Classic
//! traffic sees `p' ^ 2`, L4S traffic sees `min(k * p', 1)` or the native step
//! AQM, whichever is higher. Above `p' = 1/k` the AQM is in overload and drops
//! ECN-capable packets from both queues at the Classic probability.

use serde::{Deserialize, Serialize};

use super::pi::PiCore;
use super::queue::PacketQueue;
use super::{Aqm, Departure, DropReason, DropRecord, EnqueueOutcome, QueueId, SignalProbabilities};
use crate::error::{Error, Result};
use crate::packet::{EcnField, Packet, MTU};
use crate::rng::Rng;
use crate::time::SimTime;

/// Fixed-point scale of the WRR credit counter.
const CREDIT_ONE: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheduler {
    #[default]
    Wrr,
    TimeShiftedFifo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualPi2Config {
    /// Classic queue-delay target, seconds.
    pub target: f64,
    /// PI update interval, seconds.
    pub tupdate: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Coupling factor between `p'` and the coupled L4S probability.
    pub k: f64,
    /// Native L4S marking threshold, seconds.
    pub l4s_threshold: f64,
    /// Share of both-backlogged scheduling opportunities given to Classic.
    pub classic_weight: f64,
    /// Shared buffer, packets.
    pub buffer_limit: usize,
    pub overload_drop: bool,
    pub scheduler: Scheduler,
    /// Head-of-line advantage given to L4S packets by the time-shifted FIFO.
    pub ts_shift: f64,
}

impl Default for DualPi2Config {
    fn default() -> Self {
        DualPi2Config {
            target: 0.015,
            tupdate: 0.016,
            alpha: 0.16,
            beta: 3.2,
            k: 2.0,
            l4s_threshold: 0.001,
            classic_weight: 0.10,
            buffer_limit: 40_000,
            overload_drop: true,
            scheduler: Scheduler::Wrr,
            ts_shift: 0.015,
        }
    }
}

impl DualPi2Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |key, reason: &str| Err(Error::Config { key, reason: reason.to_string() });
        if !(self.target > 0.0) {
            return bad("target", "must be positive");
        }
        if !(self.tupdate > 0.0) {
            return bad("tupdate", "must be positive");
        }
        if !(self.classic_weight > 0.0 && self.classic_weight < 0.5) {
            return bad("classic_weight", "must lie in (0, 0.5)");
        }
        if !(self.k >= 1.0) {
            return bad("k", "must be at least 1");
        }
        if !(self.l4s_threshold >= 0.0 && self.l4s_threshold < self.target) {
            return bad("l4s_threshold", "must be non-negative and below target");
        }
        if self.buffer_limit == 0 {
            return bad("buffer_limit", "must be at least one packet");
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0) {
            return bad("alpha", "gains must be non-negative");
        }
        Ok(())
    }
}

/// Classic-side controller state: base probability and the two derived ones.
#[derive(Clone, Debug, PartialEq)]
pub struct PiState {
    pub p_prime: f64,
    pub p_cl: f64,
    pub p_c: f64,
    pub prevq: f64,
    pub last_update: SimTime,
}

/// ECT(1) and CE go to L, Not-ECT and ECT(0) to C.
pub fn classify(pkt: &Packet) -> QueueId {
    classify_ecn(pkt.ecn)
}

pub(crate) fn classify_ecn(ecn: EcnField) -> QueueId {
    if ecn.lsb() == 1 {
        QueueId::L
    } else {
        QueueId::C
    }
}

/// Native L4S AQM: a step at `threshold`, floored at two MTU serialization
/// times so low-rate links are not marked below a two-packet queue.
/// Inclusive at the step.
pub fn laqm(sojourn: f64, link_rate_bps: f64, threshold: f64) -> f64 {
    let floor = 2.0 * f64::from(MTU) * 8.0 / link_rate_bps;
    if sojourn >= threshold.max(floor) {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug)]
pub struct DualPi2 {
    cfg: DualPi2Config,
    link_rate_bps: f64,
    lq: PacketQueue,
    cq: PacketQueue,
    pi: PiCore,
    state: PiState,
    credit: u32,
    credit_step: u32,
}

impl DualPi2 {
    pub fn new(cfg: DualPi2Config, link_rate_bps: f64) -> Result<Self> {
        cfg.validate()?;
        if !(link_rate_bps > 0.0) {
            return Err(Error::Config { key: "rate", reason: "link rate must be positive".into() });
        }
        let pi = PiCore::new(cfg.target, cfg.alpha, cfg.beta);
        let credit_step = (cfg.classic_weight * f64::from(CREDIT_ONE)).round() as u32;
        Ok(DualPi2 {
            cfg,
            link_rate_bps,
            lq: PacketQueue::new(),
            cq: PacketQueue::new(),
            pi,
            state: PiState { p_prime: 0.0, p_cl: 0.0, p_c: 0.0, prevq: 0.0, last_update: SimTime::ZERO },
            credit: 0,
            credit_step,
        })
    }

    pub fn config(&self) -> &DualPi2Config {
        &self.cfg
    }

    pub fn pi_state(&self) -> &PiState {
        &self.state
    }

    /// Overrides the base probability and re-derives the coupled ones.
    pub fn set_base_probability(&mut self, p_prime: f64) {
        self.pi.set_state(p_prime, self.state.prevq);
        self.derive(self.pi.probability());
    }

    fn derive(&mut self, p_prime: f64) {
        self.state.p_prime = p_prime;
        self.state.p_cl = (self.cfg.k * p_prime).min(1.0);
        self.state.p_c = p_prime * p_prime;
    }

    /// One PI step on the larger head sojourn of the two queues.
    pub fn pi_update(&mut self, now: SimTime) -> &PiState {
        let curq = self.cq.head_sojourn(now).max(self.lq.head_sojourn(now)).as_secs_f64();
        let p = self.pi.update(curq);
        self.derive(p);
        self.state.prevq = curq;
        self.state.last_update = now;
        &self.state
    }

    pub fn is_overloaded(&self) -> bool {
        self.cfg.overload_drop && self.state.p_prime >= 1.0 / self.cfg.k
    }

    pub fn laqm(&self, sojourn: f64) -> f64 {
        laqm(sojourn, self.link_rate_bps, self.cfg.l4s_threshold)
    }

    /// Weighted round robin between the queues; `None` when both are empty.
    ///
    /// With both queues backlogged a fixed-point credit grows by
    /// `classic_weight` per decision and C is served whenever it reaches one.
    pub fn schedule(&mut self) -> Option<QueueId> {
        match (self.lq.is_empty(), self.cq.is_empty()) {
            (true, true) => None,
            (false, true) => Some(QueueId::L),
            (true, false) => Some(QueueId::C),
            (false, false) => {
                self.credit += self.credit_step;
                if self.credit >= CREDIT_ONE {
                    self.credit -= CREDIT_ONE;
                    Some(QueueId::C)
                } else {
                    Some(QueueId::L)
                }
            }
        }
    }

    /// Earliest head timestamp wins, with L4S heads advanced by `ts_shift`.
    pub fn schedule_tsfifo(&self, ts_shift: SimTime) -> Option<QueueId> {
        match (self.lq.head(), self.cq.head()) {
            (None, None) => None,
            (Some(_), None) => Some(QueueId::L),
            (None, Some(_)) => Some(QueueId::C),
            (Some(l), Some(c)) => {
                let l_ts = l.enqueue_ts.saturating_sub(ts_shift);
                if l_ts <= c.enqueue_ts {
                    Some(QueueId::L)
                } else {
                    Some(QueueId::C)
                }
            }
        }
    }

    fn select(&mut self) -> Option<QueueId> {
        match self.cfg.scheduler {
            Scheduler::Wrr => self.schedule(),
            Scheduler::TimeShiftedFifo => self.schedule_tsfifo(SimTime::from_secs_f64(self.cfg.ts_shift)),
        }
    }
}

impl Aqm for DualPi2 {
    fn name(&self) -> &'static str {
        "dualpi2"
    }

    fn enqueue(&mut self, mut pkt: Packet, now: SimTime) -> EnqueueOutcome {
        if self.lq.len() + self.cq.len() >= self.cfg.buffer_limit {
            return EnqueueOutcome::DroppedOverflow(pkt);
        }
        pkt.stamp(now);
        match classify(&pkt) {
            QueueId::L => self.lq.push(pkt),
            QueueId::C => self.cq.push(pkt),
        }
        EnqueueOutcome::Accepted
    }

    fn queue_for(&self, pkt: &Packet) -> QueueId {
        classify(pkt)
    }

    fn dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure> {
        while let Some(queue) = self.select() {
            let overloaded = self.is_overloaded();
            match queue {
                QueueId::L => {
                    let mut pkt = self.lq.pop().expect("scheduled queue is non-empty");
                    let sojourn = pkt.sojourn(now);
                    if overloaded && self.state.p_c > rng.uniform() {
                        drops.push(DropRecord { packet: pkt, queue, reason: DropReason::Signal, overloaded });
                        continue;
                    }
                    let p_l = self.laqm(sojourn.as_secs_f64()).max(self.state.p_cl);
                    let marked = p_l > rng.uniform() && pkt.mark_ce();
                    return Some(Departure { packet: pkt, queue, sojourn, marked });
                }
                QueueId::C => {
                    let mut pkt = self.cq.pop().expect("scheduled queue is non-empty");
                    let sojourn = pkt.sojourn(now);
                    let mut marked = false;
                    if self.state.p_c > rng.uniform() {
                        if pkt.ecn == EcnField::NotEct || overloaded {
                            drops.push(DropRecord { packet: pkt, queue, reason: DropReason::Signal, overloaded });
                            continue;
                        }
                        marked = pkt.mark_ce();
                    }
                    return Some(Departure { packet: pkt, queue, sojourn, marked });
                }
            }
        }
        None
    }

    fn update_interval(&self) -> Option<SimTime> {
        Some(SimTime::from_secs_f64(self.cfg.tupdate))
    }

    fn update(&mut self, now: SimTime) {
        self.pi_update(now);
    }

    fn len(&self, queue: QueueId) -> usize {
        match queue {
            QueueId::L => self.lq.len(),
            QueueId::C => self.cq.len(),
        }
    }

    fn probabilities(&self) -> SignalProbabilities {
        SignalProbabilities { base: self.state.p_prime, coupled_l: self.state.p_cl, classic: self.state.p_c }
    }
}
