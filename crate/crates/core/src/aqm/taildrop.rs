// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::queue::PacketQueue;
use super::{Aqm, Departure, DropRecord, EnqueueOutcome, QueueId};
use crate::error::{Error, Result};
use crate::packet::Packet;
use crate::rng::Rng;
use crate::time::SimTime;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailDropConfig {
    pub buffer_limit: usize,
    /// Optional byte cap on top of the packet limit.
    pub byte_limit: Option<u64>,
}

impl Default for TailDropConfig {
    fn default() -> Self {
        TailDropConfig { buffer_limit: 40_000, byte_limit: None }
    }
}

/// Plain FIFO that only drops arrivals to a full buffer.
#[derive(Debug)]
pub struct TailDrop {
    cfg: TailDropConfig,
    queue: PacketQueue,
}

impl TailDrop {
    pub fn new(cfg: TailDropConfig) -> Result<Self> {
        if cfg.buffer_limit == 0 {
            return Err(Error::Config { key: "buffer_limit", reason: "must be at least one packet".into() });
        }
        Ok(TailDrop { cfg, queue: PacketQueue::new() })
    }
}

/// Appends `pkt` unless that would exceed the packet or byte limit.
pub fn taildrop_enqueue(
    queue: &mut PacketQueue,
    mut pkt: Packet,
    limit: &TailDropConfig,
    now: SimTime,
) -> EnqueueOutcome {
    let over_bytes = limit.byte_limit.is_some_and(|b| queue.bytes() + u64::from(pkt.size) > b);
    if queue.len() >= limit.buffer_limit || over_bytes {
        return EnqueueOutcome::DroppedOverflow(pkt);
    }
    pkt.stamp(now);
    queue.push(pkt);
    EnqueueOutcome::Accepted
}

impl Aqm for TailDrop {
    fn name(&self) -> &'static str {
        "taildrop"
    }

    fn enqueue(&mut self, pkt: Packet, now: SimTime) -> EnqueueOutcome {
        taildrop_enqueue(&mut self.queue, pkt, &self.cfg, now)
    }

    fn dequeue(&mut self, now: SimTime, _rng: &mut Rng, _drops: &mut Vec<DropRecord>) -> Option<Departure> {
        let pkt = self.queue.pop()?;
        let sojourn = pkt.sojourn(now);
        Some(Departure { packet: pkt, queue: QueueId::C, sojourn, marked: false })
    }

    fn len(&self, queue: QueueId) -> usize {
        match queue {
            QueueId::L => 0,
            QueueId::C => self.queue.len(),
        }
    }
}
