// SPDX-License-Identifier: Apache-2.0

//! Single-queue PI²: the PI output squared and applied to every packet.

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
pub struct Pi2SingleConfig {
    pub target: f64,
    pub tupdate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub buffer_limit: usize,
}

impl Default for Pi2SingleConfig {
    fn default() -> Self {
        Pi2SingleConfig { target: 0.015, tupdate: 0.016, alpha: 0.16, beta: 3.2, buffer_limit: 40_000 }
    }
}

#[derive(Debug)]
pub struct Pi2Single {
    cfg: Pi2SingleConfig,
    queue: PacketQueue,
    pi: PiCore,
}

impl Pi2Single {
    pub fn new(cfg: Pi2SingleConfig) -> Result<Self> {
        if !(cfg.target > 0.0 && cfg.tupdate > 0.0) {
            return Err(Error::Config { key: "target", reason: "target and tupdate must be positive".into() });
        }
        if cfg.buffer_limit == 0 {
            return Err(Error::Config { key: "buffer_limit", reason: "must be at least one packet".into() });
        }
        let pi = PiCore::new(cfg.target, cfg.alpha, cfg.beta);
        Ok(Pi2Single { cfg, queue: PacketQueue::new(), pi })
    }

    pub fn set_base_probability(&mut self, p: f64) {
        self.pi.set_state(p, self.pi.prevq());
    }

    pub fn pi2_single_dequeue(
        &mut self,
        now: SimTime,
        rng: &mut Rng,
        drops: &mut Vec<DropRecord>,
    ) -> Option<Departure> {
        while let Some(mut pkt) = self.queue.pop() {
            let sojourn = pkt.sojourn(now);
            let p = self.pi.probability();
            let mut marked = false;
            if p * p > rng.uniform() {
                if pkt.ecn.is_ecn_capable() {
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

impl Aqm for Pi2Single {
    fn name(&self) -> &'static str {
        "pi2"
    }

    fn enqueue(&mut self, mut pkt: Packet, now: SimTime) -> EnqueueOutcome {
        if self.queue.len() >= self.cfg.buffer_limit {
            return EnqueueOutcome::DroppedOverflow(pkt);
        }
        pkt.stamp(now);
        self.queue.push(pkt);
        EnqueueOutcome::Accepted
    }

    fn dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure> {
        self.pi2_single_dequeue(now, rng, drops)
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
        SignalProbabilities { base: p, coupled_l: p * p, classic: p * p }
    }
}
