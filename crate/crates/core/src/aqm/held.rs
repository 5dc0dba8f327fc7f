// SPDX-License-Identifier: Apache-2.0

//! Fixed-probability signaller for open-loop congestion-control tests.

use serde::{Deserialize, Serialize};

use super::dualpi2::classify_ecn;
use super::queue::PacketQueue;
use super::{Aqm, Departure, DropReason, DropRecord, EnqueueOutcome, SignalProbabilities};
use crate::error::{Error, Result};
use crate::packet::Packet;
use crate::rng::Rng;
use crate::time::SimTime;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeldConfig {
    /// Probability applied to every departing packet.
    pub probability: f64,
    pub buffer_limit: usize,
}

impl Default for HeldConfig {
    fn default() -> Self {
        HeldConfig { probability: 0.0, buffer_limit: 40_000 }
    }
}

/// FIFO that marks ECN-capable packets (drops Not-ECT) with a constant
/// probability, independent of the queue.
#[derive(Debug)]
pub struct HeldProbability {
    cfg: HeldConfig,
    queue: PacketQueue,
    len_l: usize,
}

impl HeldProbability {
    pub fn new(cfg: HeldConfig) -> Result<Self> {
        if !(0.0..=1.0).contains(&cfg.probability) {
            return Err(Error::Config { key: "probability", reason: "must lie in [0, 1]".into() });
        }
        Ok(HeldProbability { cfg, queue: PacketQueue::new(), len_l: 0 })
    }
}

impl Aqm for HeldProbability {
    fn name(&self) -> &'static str {
        "held"
    }

    fn enqueue(&mut self, mut pkt: Packet, now: SimTime) -> EnqueueOutcome {
        if self.queue.len() >= self.cfg.buffer_limit {
            return EnqueueOutcome::DroppedOverflow(pkt);
        }
        pkt.stamp(now);
        if classify_ecn(pkt.ecn) == super::QueueId::L {
            self.len_l += 1;
        }
        self.queue.push(pkt);
        EnqueueOutcome::Accepted
    }

    fn dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure> {
        while let Some(mut pkt) = self.queue.pop() {
            let queue = classify_ecn(pkt.ecn);
            if queue == super::QueueId::L {
                self.len_l -= 1;
            }
            let sojourn = pkt.sojourn(now);
            let mut marked = false;
            if self.cfg.probability > rng.uniform() {
                if !pkt.ecn.is_ecn_capable() {
                    drops.push(DropRecord { packet: pkt, queue, reason: DropReason::Signal, overloaded: false });
                    continue;
                }
                marked = pkt.mark_ce();
            }
            return Some(Departure { packet: pkt, queue, sojourn, marked });
        }
        None
    }

    fn queue_for(&self, pkt: &Packet) -> super::QueueId {
        classify_ecn(pkt.ecn)
    }

    fn len(&self, queue: super::QueueId) -> usize {
        match queue {
            super::QueueId::L => self.len_l,
            super::QueueId::C => self.queue.len() - self.len_l,
        }
    }

    fn probabilities(&self) -> SignalProbabilities {
        let p = self.cfg.probability;
        SignalProbabilities { base: p, coupled_l: p, classic: p }
    }
}
