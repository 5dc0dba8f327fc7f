// SPDX-License-Identifier: Apache-2.0

//! Batch execution of independent scenarios.
//!
//! With the `parallel` feature each scenario runs on a rayon worker;
//! without it scenarios run one after another. Runs share nothing, so the
//! results are identical either way.

use crate::error::Result;
use crate::metrics::{summarize, MetricStore, Report};
use crate::scenario::Scenario;
use crate::sim;

#[derive(Debug)]
pub struct RunOutput {
    pub store: MetricStore,
    pub report: Report,
}

pub fn run_one(sc: &Scenario) -> Result<RunOutput> {
    sc.validate()?;
    let store = sim::run(sc)?;
    let report = summarize(&store);
    Ok(RunOutput { store, report })
}

pub fn run_batch_sequential(scenarios: &[Scenario]) -> Vec<Result<RunOutput>> {
    scenarios.iter().map(run_one).collect()
}

#[cfg(feature = "parallel")]
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<RunOutput>> {
    use rayon::prelude::*;
    scenarios.par_iter().map(run_one).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<RunOutput>> {
    run_batch_sequential(scenarios)
}

/// Runs a batch on a dedicated pool of `jobs` workers.
#[cfg(feature = "parallel")]
pub fn run_batch_with_jobs(scenarios: &[Scenario], jobs: usize) -> Vec<Result<RunOutput>> {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| run_batch(scenarios)),
        Err(_) => run_batch_sequential(scenarios),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch_with_jobs(scenarios: &[Scenario], _jobs: usize) -> Vec<Result<RunOutput>> {
    run_batch_sequential(scenarios)
}
