// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::packet::Packet;
use crate::time::SimTime;

#[derive(Debug)]
pub enum EventKind {
    FlowStart {
        flow: usize,
    },
    /// The next request of the web load arrives.
    WebArrival {
        index: usize,
    },
    /// The server sends (or resends) its connection-setup packet.
    HandshakeTx {
        flow: usize,
    },
    HandshakeTimeout {
        flow: usize,
        attempt: u32,
    },
    /// The request reached the server; data may flow.
    Established {
        flow: usize,
    },
    SenderWake {
        flow: usize,
    },
    Ack {
        flow: usize,
        seq: u64,
        segment: u64,
        ce: bool,
        delivered_at: SimTime,
    },
    RtoCheck {
        flow: usize,
    },
    /// The link finished serializing `packet`.
    LinkDone {
        packet: Packet,
    },
    PiTimer,
    WarmupEnd,
}

#[derive(Debug)]
pub struct Event {
    pub time: SimTime,
    seq: u64,
    pub kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest event, ties in insertion order.
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Time-ordered event queue with deterministic tie-breaking.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, time: SimTime, kind: EventKind) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event { time, seq, kind });
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn peek_time(&self) -> Option<SimTime> {
        self.heap.peek().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
