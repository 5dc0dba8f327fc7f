// SPDX-License-Identifier: Apache-2.0

//! Result directories: CSV exports, the resolved scenario, and a manifest.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use dualq::harness::RunOutput;
use dualq::metrics::{write_csvs, write_summary, Report, CSV_FILES};
use dualq::scenario::Scenario;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub scenario_sha256: String,
    pub seed: u64,
    pub tool_version: &'static str,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub files: Vec<String>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `contents` to `path` through a temporary file and a rename.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).with_context(|| format!("renaming to {}", path.display()))?;
    Ok(())
}

pub fn write_run_dir(dir: &Path, sc: &Scenario, run: &RunOutput, started: f64) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let resolved = sc.to_toml();
    fs::write(dir.join("scenario.toml"), &resolved)?;
    write_csvs(dir, &run.store, &run.report).with_context(|| format!("writing CSVs to {}", dir.display()))?;
    let mut files = vec!["scenario.toml".to_string()];
    files.extend(CSV_FILES.iter().map(|s| s.to_string()));
    let manifest = RunManifest {
        scenario: sc.name.clone(),
        scenario_sha256: sha256_hex(resolved.as_bytes()),
        seed: sc.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        started_unix: started,
        finished_unix: unix_now(),
        files,
    };
    let json = serde_json::to_vec_pretty(&manifest)?;
    write_atomic(&dir.join("manifest.json"), &json)
}

pub fn write_grid_summary(dir: &Path, reports: &[Report]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("summary.csv"))?;
    w.write_record(["scenario", "metric", "mean", "p1", "p25", "p99", "count"])?;
    for r in reports {
        write_summary(&mut w, r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn print_report(report: &Report) {
    println!("{:<30} {:>12} {:>12} {:>12} {:>12}", "metric", "mean", "p1", "p25", "p99");
    for r in &report.rows {
        println!("{:<30} {:>12.5} {:>12.5} {:>12.5} {:>12.5}", r.metric, r.mean, r.p1, r.p25, r.p99);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
