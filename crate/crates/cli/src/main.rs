// SPDX-License-Identifier: Apache-2.0

mod analyze;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dualq::harness::{run_batch_with_jobs, run_one};
use dualq::scenario::Scenario;
use dualq::workload::{build_scenario_grid, GridKind};

#[derive(Parser, Debug)]
#[command(name = "dualq", version, about = "DualQ Coupled AQM bottleneck simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Simulated seconds; overrides the scenario's duration.
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Run one of the standard scenario grids.
    Grid {
        #[arg(long)]
        kind: GridKind,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long, env = "DUALQ_JOBS")]
        jobs: Option<usize>,
        /// Only run scenarios whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Closed-form steady-state relations.
    Analyze {
        #[command(subcommand)]
        what: analyze::Analyze,
    },
    /// Print the scenarios of a grid (or all grids).
    ListScenarios {
        #[arg(long)]
        kind: Option<GridKind>,
        #[arg(long, default_value_t = 60.0)]
        duration: f64,
        /// Print each scenario as TOML instead of its name.
        #[arg(long)]
        toml: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run { scenario, seed, out, duration } => {
            let mut sc = Scenario::load(&scenario).with_context(|| format!("loading {}", scenario.display()))?;
            if let Some(s) = seed {
                sc.seed = s;
            }
            if let Some(d) = duration {
                sc.duration = d;
            }
            let started = output::unix_now();
            let run = run_one(&sc).with_context(|| format!("scenario `{}`", sc.name))?;
            let dir = out.join(&sc.name);
            output::write_run_dir(&dir, &sc, &run, started)?;
            output::print_report(&run.report);
            println!("results in {}", dir.display());
            Ok(())
        }
        Command::Grid { kind, duration, seed, out, jobs, filter } => {
            let mut grid = build_scenario_grid(kind, duration, seed);
            if let Some(f) = &filter {
                grid.retain(|s| s.name.contains(f.as_str()));
            }
            if grid.is_empty() {
                bail!("no scenarios selected");
            }
            let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let started = output::unix_now();
            let results = run_batch_with_jobs(&grid, jobs);
            let grid_dir = out.join(kind.as_str());
            let mut reports = Vec::new();
            let mut failures = 0;
            for (sc, res) in grid.iter().zip(results) {
                match res {
                    Ok(run) => {
                        output::write_run_dir(&grid_dir.join(&sc.name), sc, &run, started)?;
                        reports.push(run.report);
                    }
                    Err(e) => {
                        failures += 1;
                        eprintln!("scenario {} failed: {e}", sc.name);
                    }
                }
            }
            output::write_grid_summary(&grid_dir, &reports)?;
            println!("{} scenarios written to {}", reports.len(), grid_dir.display());
            if failures > 0 {
                bail!("{failures} scenario(s) failed");
            }
            Ok(())
        }
        Command::Analyze { what } => analyze::run(what),
        Command::ListScenarios { kind, duration, toml } => {
            let kinds = kind.map_or_else(|| GridKind::ALL.to_vec(), |k| vec![k]);
            let mut out = std::io::stdout().lock();
            for k in kinds {
                for sc in build_scenario_grid(k, duration, 1) {
                    let res = if toml {
                        writeln!(out, "# grid: {k}\n{}", sc.to_toml())
                    } else {
                        writeln!(out, "{k}\t{}", sc.name)
                    };
                    match res {
                        // A closed pipe (e.g. `| head`) just ends the listing.
                        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
                        other => other?,
                    }
                }
            }
            Ok(())
        }
    }
}
