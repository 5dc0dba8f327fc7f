// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;

use crate::packet::Packet;
use crate::time::SimTime;

/// FIFO of stamped packets with a running byte count.
#[derive(Debug, Default)]
pub struct PacketQueue {
    fifo: VecDeque<Packet>,
    bytes: u64,
}

impl PacketQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pkt: Packet) {
        self.bytes += u64::from(pkt.size);
        self.fifo.push_back(pkt);
    }

    pub fn pop(&mut self) -> Option<Packet> {
        let pkt = self.fifo.pop_front()?;
        self.bytes -= u64::from(pkt.size);
        Some(pkt)
    }

    pub fn head(&self) -> Option<&Packet> {
        self.fifo.front()
    }

    /// Sojourn time of the head packet, zero when empty.
    pub fn head_sojourn(&self, now: SimTime) -> SimTime {
        self.head().map_or(SimTime::ZERO, |p| p.sojourn(now))
    }

    pub fn len(&self) -> usize {
        self.fifo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fifo.is_empty()
    }

    pub fn bytes(&self) -> u64 {
        self.bytes
    }
}
