// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::time::SimTime;

pub const MTU: u32 = 1500;
pub const MIN_PACKET: u32 = 64;
/// Size of handshake and acknowledgement packets.
pub const CONTROL_PACKET: u32 = 64;

/// The 2-bit IP-ECN field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcnField {
    NotEct,
    Ect0,
    Ect1,
    Ce,
}

impl EcnField {
    pub const ALL: [EcnField; 4] = [EcnField::NotEct, EcnField::Ect0, EcnField::Ect1, EcnField::Ce];

    pub const fn bits(self) -> u8 {
        match self {
            EcnField::NotEct => 0b00,
            EcnField::Ect1 => 0b01,
            EcnField::Ect0 => 0b10,
            EcnField::Ce => 0b11,
        }
    }

    /// Least significant bit of the field: 1 for ECT(1) and CE.
    pub const fn lsb(self) -> u8 {
        self.bits() & 1
    }

    pub const fn is_ecn_capable(self) -> bool {
        !matches!(self, EcnField::NotEct)
    }
}

/// What a packet carries, which decides how the receiving end reacts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PacketKind {
    /// Connection setup (the server's SYN-ACK on the downstream path).
    Handshake,
    /// TCP payload. `segment` indexes the flow's byte stream.
    Data { segment: u64 },
    /// Unresponsive datagram.
    Datagram,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Packet {
    pub flow_id: u32,
    pub size: u32,
    pub ecn: EcnField,
    /// Set by the AQM on enqueue.
    pub enqueue_ts: SimTime,
    /// Per-flow transmission sequence number; retransmissions get fresh numbers.
    pub seq: u64,
    pub sent_at: SimTime,
    pub kind: PacketKind,
}

impl Packet {
    pub fn new(flow_id: u32, seq: u64, size: u32, ecn: EcnField, kind: PacketKind, now: SimTime) -> Self {
        debug_assert!((MIN_PACKET..=MTU).contains(&size), "packet size {size} out of range");
        Packet { flow_id, size, ecn, enqueue_ts: SimTime::ZERO, seq, sent_at: now, kind }
    }

    pub fn stamp(&mut self, now: SimTime) {
        self.enqueue_ts = now;
    }

    pub fn sojourn(&self, now: SimTime) -> SimTime {
        now.saturating_sub(self.enqueue_ts)
    }

    /// Sets CE on an ECN-capable packet. Returns false (and leaves the
    /// packet alone) for Not-ECT.
    pub fn mark_ce(&mut self) -> bool {
        if self.ecn.is_ecn_capable() {
            self.ecn = EcnField::Ce;
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lsb_view() {
        assert_eq!(EcnField::NotEct.lsb(), 0);
        assert_eq!(EcnField::Ect0.lsb(), 0);
        assert_eq!(EcnField::Ect1.lsb(), 1);
        assert_eq!(EcnField::Ce.lsb(), 1);
        for e in EcnField::ALL {
            assert!(e.lsb() == 0 || e.lsb() == 1);
        }
    }

    #[test]
    fn not_ect_is_never_marked() {
        let mut p = Packet::new(0, 0, MTU, EcnField::NotEct, PacketKind::Datagram, SimTime::ZERO);
        assert!(!p.mark_ce());
        assert_eq!(p.ecn, EcnField::NotEct);
        let mut q = Packet::new(0, 0, MTU, EcnField::Ect0, PacketKind::Datagram, SimTime::ZERO);
        assert!(q.mark_ce());
        assert_eq!(q.ecn, EcnField::Ce);
    }
}
