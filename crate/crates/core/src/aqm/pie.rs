// SPDX-License-Identifier: Apache-2.0

//! Simplified PIE: the shared PI core on head sojourn, applied linearly.
//!
//! No derandomization and no probability-dependent gain scaling. The raw
//! gains 1/16 and 10/16 are per update with delays in seconds.

use serde::{Deserialize, Serialize};

use super::pi::PiCore;
use super::queue::PacketQueue;
use super::{Aqm, Departure, DropReason, DropRecord, EnqueueOutcome, QueueId, SignalProbabilities};
use crate::error::{Error, Result};
use crate::packet::Packet;
use crate::rng::Rng;
use crate::time::SimTime;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PieConfig {
    pub target: f64,
    pub tupdate: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Signal-free window after the queue leaves idle, seconds.
    pub burst_allowance: f64,
    /// At or above this probability ECN-capable packets are dropped too.
    pub ecn_drop_threshold: f64,
    pub buffer_limit: usize,
}

impl Default for PieConfig {
    fn default() -> Self {
        PieConfig {
            target: 0.015,
            tupdate: 0.016,
            alpha: 1.0 / 16.0,
            beta: 10.0 / 16.0,
            burst_allowance: 0.100,
            ecn_drop_threshold: 0.25,
            buffer_limit: 40_000,
        }
    }
}

#[derive(Debug)]
pub struct Pie {
    cfg: PieConfig,
    queue: PacketQueue,
    pi: PiCore,
    burst_until: SimTime,
}

impl Pie {
    pub fn new(cfg: PieConfig) -> Result<Self> {
        if !(cfg.target > 0.0 && cfg.tupdate > 0.0) {
            return Err(Error::Config { key: "target", reason: "target and tupdate must be positive".into() });
        }
        if cfg.buffer_limit == 0 {
            return Err(Error::Config { key: "buffer_limit", reason: "must be at least one packet".into() });
        }
        let pi = PiCore::new(cfg.target, cfg.alpha, cfg.beta);
        Ok(Pie { cfg, queue: PacketQueue::new(), pi, burst_until: SimTime::ZERO })
    }

    pub fn probability(&self) -> f64 {
        self.pi.probability()
    }

    pub fn set_probability(&mut self, p: f64) {
        self.pi.set_state(p, self.pi.prevq());
    }

    pub fn in_burst_allowance(&self, now: SimTime) -> bool {
        now < self.burst_until
    }

    /// Dequeue with PIE's linear signal: mark below the ECN drop threshold,
    /// drop at or above it or for Not-ECT.
    pub fn pie_dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure> {
        while let Some(mut pkt) = self.queue.pop() {
            let sojourn = pkt.sojourn(now);
            let p = self.pi.probability();
            let mut marked = false;
            if !self.in_burst_allowance(now) && p > rng.uniform() {
                if pkt.ecn.is_ecn_capable() && p < self.cfg.ecn_drop_threshold {
                    marked = pkt.mark_ce();
                } else {
                    drops.push(DropRecord {
                        packet: pkt,
                        queue: QueueId::C,
                        reason: DropReason::Signal,
                        overloaded: false,
                    });
                    continue;
                }
            }
            return Some(Departure { packet: pkt, queue: QueueId::C, sojourn, marked });
        }
        None
    }
}

impl Aqm for Pie {
    fn name(&self) -> &'static str {
        "pie"
    }

    fn enqueue(&mut self, mut pkt: Packet, now: SimTime) -> EnqueueOutcome {
        if self.queue.len() >= self.cfg.buffer_limit {
            return EnqueueOutcome::DroppedOverflow(pkt);
        }
        // Idle to busy while the controller is quiescent opens a new burst window.
        if self.queue.is_empty() && self.pi.probability() == 0.0 && now >= self.burst_until {
            self.burst_until = now + SimTime::from_secs_f64(self.cfg.burst_allowance);
        }
        pkt.stamp(now);
        self.queue.push(pkt);
        EnqueueOutcome::Accepted
    }

    fn dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure> {
        self.pie_dequeue(now, rng, drops)
    }

    fn update_interval(&self) -> Option<SimTime> {
        Some(SimTime::from_secs_f64(self.cfg.tupdate))
    }

    fn update(&mut self, now: SimTime) {
        self.pi.update(self.queue.head_sojourn(now).as_secs_f64());
    }

    fn len(&self, queue: QueueId) -> usize {
        match queue {
            QueueId::L => 0,
            QueueId::C => self.queue.len(),
        }
    }

    fn probabilities(&self) -> SignalProbabilities {
        let p = self.pi.probability();
        SignalProbabilities { base: p, coupled_l: p, classic: p }
    }
}
