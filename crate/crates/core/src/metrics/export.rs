// SPDX-License-Identifier: Apache-2.0

//! CSV exports. Column sets are stable; see the README for the schemas.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::aqm::QueueId;
use crate::error::Result;

use super::{completion_efficiency, MetricStore, Report};

pub const CSV_FILES: [&str; 5] = ["qdelay.csv", "flows.csv", "signals.csv", "fct.csv", "summary.csv"];

fn writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes all five per-run CSV files into `dir`.
pub fn write_csvs(dir: &Path, store: &MetricStore, report: &Report) -> Result<()> {
    write_qdelay(&dir.join("qdelay.csv"), store)?;
    write_flows(&dir.join("flows.csv"), store)?;
    write_signals(&dir.join("signals.csv"), store)?;
    write_fct(&dir.join("fct.csv"), store)?;
    let mut w = writer(&dir.join("summary.csv"))?;
    w.write_record(["scenario", "metric", "mean", "p1", "p25", "p99", "count"])?;
    write_summary(&mut w, report)?;
    w.flush()?;
    Ok(())
}

fn write_qdelay(path: &Path, store: &MetricStore) -> Result<()> {
    // Plain formatted writes: this file has one row per packet.
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "queue,sojourn_us")?;
    for q in QueueId::BOTH {
        let name = q.as_str();
        for &ns in &store.qdelay[q.index()] {
            writeln!(out, "{name},{}.{:03}", ns / 1000, ns % 1000)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn write_flows(path: &Path, store: &MetricStore) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["second", "flow_id", "side", "cc", "ecn", "rtt_ms", "bytes"])?;
    for (i, f) in store.flows.iter().enumerate() {
        for (sec, bytes) in store.flow_bytes[i].iter().enumerate() {
            w.write_record([
                sec.to_string(),
                f.id.to_string(),
                f.side.as_str().to_string(),
                f.cc.as_str().to_string(),
                ecn_name(f.ecn).to_string(),
                (f.rtt_s * 1e3).to_string(),
                bytes.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn ecn_name(e: crate::packet::EcnField) -> &'static str {
    use crate::packet::EcnField::*;
    match e {
        NotEct => "not-ect",
        Ect0 => "ect0",
        Ect1 => "ect1",
        Ce => "ce",
    }
}

fn write_signals(path: &Path, store: &MetricStore) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "second",
        "queue",
        "packets",
        "bytes",
        "marks",
        "drops",
        "overflow",
        "mark_prob",
        "drop_prob",
        "p_base",
        "p_coupled_l",
        "p_classic",
    ])?;
    for (sec, bin) in store.seconds.iter().enumerate() {
        let probs = bin.mean_probabilities();
        for q in QueueId::BOTH {
            let qb = &bin.queues[q.index()];
            w.write_record([
                sec.to_string(),
                q.as_str().to_string(),
                qb.packets.to_string(),
                qb.bytes.to_string(),
                qb.marks.to_string(),
                qb.drops.to_string(),
                qb.overflow.to_string(),
                opt(qb.mark_prob()),
                opt(qb.drop_prob()),
                opt(probs.map(|p| p.base)),
                opt(probs.map(|p| p.coupled_l)),
                opt(probs.map(|p| p.classic)),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_fct(path: &Path, store: &MetricStore) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["flow_id", "side", "size", "start_s", "rtt_ms", "fct_us", "efficiency"])?;
    for f in &store.fct {
        let eff = completion_efficiency(f.fct_s, f.size, f.rtt_s, store.meta.capacity_bps);
        w.write_record([
            f.flow_id.to_string(),
            f.side.as_str().to_string(),
            f.size.to_string(),
            f.start_s.to_string(),
            (f.rtt_s * 1e3).to_string(),
            (f.fct_s * 1e6).to_string(),
            eff.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Appends a report's rows (without header) to a summary writer.
pub fn write_summary<W: Write>(w: &mut csv::Writer<W>, report: &Report) -> Result<()> {
    for r in &report.rows {
        w.write_record([
            report.scenario.clone(),
            r.metric.clone(),
            r.mean.to_string(),
            r.p1.to_string(),
            r.p25.to_string(),
            r.p99.to_string(),
            r.count.to_string(),
        ])?;
    }
    Ok(())
}
