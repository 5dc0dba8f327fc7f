// SPDX-License-Identifier: Apache-2.0

//! Bottleneck queue disciplines.
//!
//! Single-queue disciplines report their one queue as [`QueueId::C`].

mod dualpi2;
mod held;
mod pi;
mod pi2;
mod pie;
mod queue;
mod taildrop;

use serde::{Deserialize, Serialize};

pub use dualpi2::{classify, laqm, DualPi2, DualPi2Config, PiState, Scheduler};
pub use held::{HeldConfig, HeldProbability};
pub use pi::PiCore;
pub use pi2::{Pi2Single, Pi2SingleConfig};
pub use pie::{Pie, PieConfig};
pub use queue::PacketQueue;
pub use taildrop::{taildrop_enqueue, TailDrop, TailDropConfig};

use crate::packet::Packet;
use crate::rng::Rng;
use crate::time::SimTime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueueId {
    L,
    C,
}

impl QueueId {
    pub const BOTH: [QueueId; 2] = [QueueId::L, QueueId::C];

    pub const fn index(self) -> usize {
        match self {
            QueueId::L => 0,
            QueueId::C => 1,
        }
    }

    pub const fn as_str(self) -> &'static str {
        match self {
            QueueId::L => "L",
            QueueId::C => "C",
        }
    }
}

#[derive(Debug)]
pub enum EnqueueOutcome {
    Accepted,
    DroppedOverflow(Packet),
}

impl EnqueueOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, EnqueueOutcome::Accepted)
    }
}

/// A packet leaving the AQM for the link.
#[derive(Debug)]
pub struct Departure {
    pub packet: Packet,
    pub queue: QueueId,
    pub sojourn: SimTime,
    /// CE was set by this AQM on the way out.
    pub marked: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// Congestion signal applied as a drop at dequeue.
    Signal,
    /// Buffer full at enqueue.
    Overflow,
}

#[derive(Debug)]
pub struct DropRecord {
    pub packet: Packet,
    pub queue: QueueId,
    pub reason: DropReason,
    /// The AQM was in its overload regime when it dropped.
    pub overloaded: bool,
}

/// Snapshot of an AQM's internal signalling probabilities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SignalProbabilities {
    pub base: f64,
    pub coupled_l: f64,
    pub classic: f64,
}

pub trait Aqm: Send {
    fn name(&self) -> &'static str;

    fn enqueue(&mut self, pkt: Packet, now: SimTime) -> EnqueueOutcome;

    /// Queue a packet would join; used to attribute overflow drops.
    fn queue_for(&self, _pkt: &Packet) -> QueueId {
        QueueId::C
    }

    /// Returns the next packet to transmit, or `None` once the backlog is
    /// exhausted. Packets dropped on the way are appended to `drops`.
    fn dequeue(&mut self, now: SimTime, rng: &mut Rng, drops: &mut Vec<DropRecord>) -> Option<Departure>;

    /// Cadence of the periodic controller update, if the AQM has one.
    fn update_interval(&self) -> Option<SimTime> {
        None
    }

    fn update(&mut self, _now: SimTime) {}

    fn len(&self, queue: QueueId) -> usize;

    fn backlog(&self) -> usize {
        self.len(QueueId::L) + self.len(QueueId::C)
    }

    fn is_empty(&self) -> bool {
        self.backlog() == 0
    }

    fn probabilities(&self) -> SignalProbabilities {
        SignalProbabilities::default()
    }
}
