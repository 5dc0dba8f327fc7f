// SPDX-License-Identifier: Apache-2.0

//! Discrete-event dumbbell: senders feed one bottleneck AQM directly, the
//! base RTT is pure propagation split evenly between the two directions,
//! and the return path never queues.

mod event;
mod flow;

pub use event::{Event, EventKind, EventQueue};
pub use flow::{Flow, DUP_THRESHOLD, MIN_RTO, SYN_RTO};

use crate::aqm::{Aqm, DropRecord, EnqueueOutcome, QueueId};
use crate::cc::{pacing_rate, CcKind};
use crate::error::Result;
use crate::metrics::{FctRecord, FlowRecord, MetricStore, RunMeta};
use crate::packet::{EcnField, Packet, PacketKind, CONTROL_PACKET, MTU};
use crate::rng::Rng;
use crate::scenario::{side_of, Scenario};
use crate::time::SimTime;
use crate::workload::{gen_web_arrivals, WebLoadProfile, WebRequest};

/// RNG substreams.
const STREAM_AQM: u64 = 0;
const STREAM_WEB: u64 = 1;

/// Seconds per bit on the bottleneck.
pub fn transmit_time(bytes: u32, rate_bps: f64) -> SimTime {
    SimTime::serialization(bytes, rate_bps)
}

pub struct Dumbbell {
    aqm: Box<dyn Aqm>,
    rate_bps: f64,
    end: SimTime,
    events: EventQueue,
    flows: Vec<Flow>,
    rng: Rng,
    link_busy: bool,
    drops: Vec<DropRecord>,
    metrics: MetricStore,
    web: Vec<WebRequest>,
    web_sides: Vec<(CcKind, EcnField, SimTime)>,
    now: SimTime,
    processed: u64,
}

impl Dumbbell {
    /// Builds the engine for a scenario. Scenarios without traffic are
    /// accepted and simply produce empty metrics.
    pub fn new(sc: &Scenario) -> Result<Self> {
        let aqm = sc.build_aqm()?;
        let rate_bps = sc.link.rate_bps();
        let meta = RunMeta {
            scenario: sc.name.clone(),
            capacity_bps: rate_bps,
            duration: sc.duration,
            warmup: sc.warmup_secs(),
            seed: sc.seed,
        };
        let mut d = Dumbbell {
            aqm,
            rate_bps,
            end: SimTime::from_secs_f64(sc.duration),
            events: EventQueue::new(),
            flows: Vec::new(),
            rng: Rng::substream(sc.seed, STREAM_AQM),
            link_busy: false,
            drops: Vec::new(),
            metrics: MetricStore::new(meta),
            web: Vec::new(),
            web_sides: Vec::new(),
            now: SimTime::ZERO,
            processed: 0,
        };

        for spec in &sc.flows {
            for _ in 0..spec.count {
                let id = d.flows.len() as u32;
                let ecn = spec.data_ecn();
                let side = side_of(spec.cc, ecn);
                let rtt = SimTime::from_secs_f64(spec.rtt_ms / 1e3);
                let start = SimTime::from_secs_f64(spec.start_s);
                let mut f = Flow::new(id, side, spec.cc, ecn, rtt, start, spec.size_bytes);
                f.cc.pace_classic = spec.pacing;
                if let Some(frac) = spec.rate_fraction {
                    f.udp_rate = frac * rate_bps;
                }
                if spec.size_bytes.is_none() {
                    let probe = Packet::new(id, 0, MTU, ecn, PacketKind::Datagram, SimTime::ZERO);
                    f.metric = Some(d.metrics.add_flow(FlowRecord {
                        id,
                        side,
                        cc: spec.cc,
                        ecn,
                        queue: d.aqm.queue_for(&probe),
                        rtt_s: rtt.as_secs_f64(),
                        start_s: spec.start_s,
                        bytes: 0,
                        marks: 0,
                        rounds: 0,
                    }));
                }
                d.flows.push(f);
                if start < d.end {
                    d.events.push(start, EventKind::FlowStart { flow: id as usize });
                }
            }
        }

        if let Some(web) = &sc.web {
            let profile = WebLoadProfile::new(web.level, sc.link.rate_mbps);
            let mut wrng = Rng::substream(sc.seed, STREAM_WEB);
            d.web = gen_web_arrivals(&profile, &mut wrng, sc.duration);
            d.web_sides =
                web.sides.iter().map(|s| (s.cc, s.data_ecn(), SimTime::from_secs_f64(s.rtt_ms / 1e3))).collect();
            if let Some(first) = d.web.first() {
                d.events.push(SimTime::from_secs_f64(first.start), EventKind::WebArrival { index: 0 });
            }
        }

        if let Some(iv) = d.aqm.update_interval() {
            d.events.push(iv, EventKind::PiTimer);
        }
        let warm = d.metrics.warmup_at();
        if warm < d.end {
            d.events.push(warm, EventKind::WarmupEnd);
        }
        Ok(d)
    }

    pub fn flows(&self) -> &[Flow] {
        &self.flows
    }

    pub fn aqm(&self) -> &dyn Aqm {
        self.aqm.as_ref()
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn events_processed(&self) -> u64 {
        self.processed
    }

    /// Processes events up to and including `until` (capped at the end of
    /// the run).
    pub fn run_until(&mut self, until: SimTime) {
        let until = until.min(self.end);
        while let Some(t) = self.events.peek_time() {
            if t > until {
                break;
            }
            let ev = self.events.pop().expect("peeked");
            debug_assert!(ev.time >= self.now, "time went backwards");
            self.now = ev.time;
            self.processed += 1;
            self.handle(ev.kind);
        }
        self.now = self.now.max(until);
    }

    /// Runs to the end of the scenario and returns the measurements.
    pub fn run(mut self) -> MetricStore {
        self.run_until(self.end);
        self.finish()
    }

    fn finish(mut self) -> MetricStore {
        for q in QueueId::BOTH {
            self.metrics.totals.residual[q.index()] = self.aqm.len(q) as u64;
        }
        for f in &self.flows {
            if let Some(i) = f.metric {
                let rec = &mut self.metrics.flows[i];
                if f.cc.kind.is_scalable() {
                    rec.marks = f.cc.scalable.marks;
                    rec.rounds = f.cc.scalable.rounds;
                }
            }
        }
        self.metrics
    }

    fn schedule(&mut self, at: SimTime, kind: EventKind) {
        if at <= self.end {
            self.events.push(at, kind);
        }
    }

    fn handle(&mut self, kind: EventKind) {
        let now = self.now;
        match kind {
            EventKind::FlowStart { flow } => {
                if self.flows[flow].is_udp() {
                    self.udp_send(flow);
                } else {
                    let half = SimTime::from_nanos(self.flows[flow].rtt.as_nanos() / 2);
                    self.schedule(now + half, EventKind::HandshakeTx { flow });
                }
            }
            EventKind::WebArrival { index } => self.web_arrival(index),
            EventKind::HandshakeTx { flow } => self.send_handshake(flow),
            EventKind::HandshakeTimeout { flow, attempt } => {
                let f = &self.flows[flow];
                if !f.handshake_delivered && f.handshake_attempts == attempt + 1 {
                    self.send_handshake(flow);
                }
            }
            EventKind::Established { flow } => {
                let f = &mut self.flows[flow];
                if !f.established {
                    f.established = true;
                    let sample = now.saturating_sub(f.handshake_sent_at);
                    f.cc.record_rtt(sample);
                    self.try_send(flow);
                }
            }
            EventKind::SenderWake { flow } => {
                let f = &mut self.flows[flow];
                if f.wake_pending == Some(now) {
                    f.wake_pending = None;
                }
                if f.is_udp() {
                    self.udp_send(flow);
                } else {
                    self.try_send(flow);
                }
            }
            EventKind::Ack { flow, seq, segment, ce, delivered_at } => {
                self.on_ack(flow, seq, segment, ce, delivered_at)
            }
            EventKind::RtoCheck { flow } => self.rto_check(flow),
            EventKind::LinkDone { packet } => {
                self.link_busy = false;
                self.deliver(packet);
                self.start_service();
            }
            EventKind::PiTimer => {
                self.aqm.update(now);
                self.metrics.on_probabilities(now, self.aqm.probabilities());
                if let Some(iv) = self.aqm.update_interval() {
                    self.schedule(now + iv, EventKind::PiTimer);
                }
            }
            EventKind::WarmupEnd => {
                for f in &mut self.flows {
                    if f.metric.is_some() {
                        f.cc.scalable.reset_stats();
                    }
                }
            }
        }
    }

    fn web_arrival(&mut self, index: usize) {
        let req = self.web[index];
        let (cc, ecn, rtt) = self.web_sides[index % self.web_sides.len()];
        let id = self.flows.len();
        let side = side_of(cc, ecn);
        self.flows.push(Flow::new(id as u32, side, cc, ecn, rtt, self.now, Some(req.size)));
        self.handle(EventKind::FlowStart { flow: id });
        if let Some(next) = self.web.get(index + 1) {
            self.schedule(SimTime::from_secs_f64(next.start), EventKind::WebArrival { index: index + 1 });
        }
    }

    fn send_handshake(&mut self, flow: usize) {
        let now = self.now;
        let f = &mut self.flows[flow];
        let ecn = if f.cc.kind.is_scalable() { EcnField::Ect1 } else { EcnField::NotEct };
        let attempt = f.handshake_attempts;
        f.handshake_attempts += 1;
        f.handshake_sent_at = now;
        let pkt = Packet::new(f.id, u64::from(attempt), CONTROL_PACKET, ecn, PacketKind::Handshake, now);
        let timeout = SimTime::from_secs_f64(SYN_RTO * f64::from(1u32 << attempt.min(10)));
        self.schedule(now + timeout, EventKind::HandshakeTimeout { flow, attempt });
        self.enqueue(pkt);
    }

    fn udp_send(&mut self, flow: usize) {
        let now = self.now;
        let f = &mut self.flows[flow];
        let seq = f.next_seq;
        f.next_seq += 1;
        let pkt = Packet::new(f.id, seq, MTU, f.ecn, PacketKind::Datagram, now);
        let next = now + transmit_time(MTU, f.udp_rate);
        f.wake_pending = Some(next);
        self.schedule(next, EventKind::SenderWake { flow });
        self.enqueue(pkt);
    }

    fn try_send(&mut self, flow: usize) {
        let now = self.now;
        loop {
            let f = &mut self.flows[flow];
            if !f.can_send() {
                break;
            }
            if f.cc.is_paced() && now < f.next_send_at {
                if f.wake_pending.is_none_or(|w| w > f.next_send_at) {
                    let at = f.next_send_at;
                    f.wake_pending = Some(at);
                    self.schedule(at, EventKind::SenderWake { flow });
                }
                break;
            }
            let (seq, segment) = f.take_segment(now);
            let size = f.segment_size(segment);
            let pkt = Packet::new(f.id, seq, size, f.ecn, PacketKind::Data { segment }, now);
            if f.cc.is_paced() {
                let gap = transmit_time(size, pacing_rate(&f.cc));
                f.next_send_at = f.next_send_at.max(now) + gap;
            }
            f.arm_rto(now);
            if !f.rto_check_pending {
                if let Some(at) = f.rto_deadline {
                    f.rto_check_pending = true;
                    self.schedule(at, EventKind::RtoCheck { flow });
                }
            }
            self.enqueue(pkt);
        }
    }

    fn on_ack(&mut self, flow: usize, seq: u64, segment: u64, ce: bool, delivered_at: SimTime) {
        let now = self.now;
        let f = &mut self.flows[flow];
        let out = f.on_ack(now, seq, segment, ce, delivered_at);
        if let Some(done_at) = out.completed {
            let record = FctRecord {
                flow_id: f.id,
                side: f.side,
                size: f.size().unwrap_or(0),
                start_s: f.start.as_secs_f64(),
                fct_s: done_at.saturating_sub(f.start).as_secs_f64(),
                rtt_s: f.rtt.as_secs_f64(),
            };
            self.metrics.on_fct(record);
            return;
        }
        self.try_send(flow);
    }

    fn rto_check(&mut self, flow: usize) {
        let now = self.now;
        let f = &mut self.flows[flow];
        f.rto_check_pending = false;
        let Some(deadline) = f.rto_deadline else {
            return;
        };
        if f.done {
            return;
        }
        if now < deadline {
            f.rto_check_pending = true;
            self.schedule(deadline, EventKind::RtoCheck { flow });
            return;
        }
        f.on_timeout();
        f.rto_deadline = Some(now + f.rto());
        f.rto_check_pending = true;
        let at = now + f.rto();
        self.schedule(at, EventKind::RtoCheck { flow });
        self.try_send(flow);
    }

    fn enqueue(&mut self, pkt: Packet) {
        let now = self.now;
        let queue = self.aqm.queue_for(&pkt);
        match self.aqm.enqueue(pkt, now) {
            EnqueueOutcome::Accepted => self.metrics.on_enqueue(queue),
            EnqueueOutcome::DroppedOverflow(p) => self.metrics.on_overflow(now, queue, &p),
        }
        if !self.link_busy {
            self.start_service();
        }
    }

    fn start_service(&mut self) {
        let now = self.now;
        let dep = self.aqm.dequeue(now, &mut self.rng, &mut self.drops);
        for d in self.drops.drain(..) {
            self.metrics.on_drop(now, &d);
        }
        let Some(dep) = dep else {
            return;
        };
        let flow = self.flows.get(dep.packet.flow_id as usize).and_then(|f| f.metric);
        let measured = matches!(dep.packet.kind, PacketKind::Data { .. } | PacketKind::Datagram);
        self.metrics.on_departure(now, &dep, flow.filter(|_| measured));
        self.link_busy = true;
        let done = now + transmit_time(dep.packet.size, self.rate_bps);
        self.events.push(done, EventKind::LinkDone { packet: dep.packet });
    }

    fn deliver(&mut self, packet: Packet) {
        let now = self.now;
        let flow = packet.flow_id as usize;
        let rtt = self.flows[flow].rtt;
        match packet.kind {
            PacketKind::Data { segment } => {
                let half = SimTime::from_nanos(rtt.as_nanos() / 2);
                self.schedule(
                    now + rtt,
                    EventKind::Ack {
                        flow,
                        seq: packet.seq,
                        segment,
                        ce: packet.ecn == EcnField::Ce,
                        delivered_at: now + half,
                    },
                );
            }
            PacketKind::Handshake => {
                self.flows[flow].handshake_delivered = true;
                self.schedule(now + rtt, EventKind::Established { flow });
            }
            PacketKind::Datagram => {}
        }
    }
}

/// Runs one scenario to completion.
pub fn run(sc: &Scenario) -> Result<MetricStore> {
    Ok(Dumbbell::new(sc)?.run())
}
