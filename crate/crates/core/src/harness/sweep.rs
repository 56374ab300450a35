use std::collections::HashSet;

use rayon::prelude::*;

use crate::environment::ShockSchedule;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::stats::{mean, percentile};

use super::config::RunConfig;
use super::run::run;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub lambdas: Vec<u32>,
    pub rhos: Vec<u32>,
    pub etas: Vec<f64>,
}

/// One cell of a sweep; statistics are over replications of the
/// time-averaged errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: u32,
    pub rho: u32,
    pub eta: f64,
    pub replication_count: usize,
    pub mean_wdn: f64,
    pub mean_wc: f64,
    pub p05_wdn: f64,
    pub p95_wdn: f64,
    /// `mean_wdn` over the average `mean_wdn` of its rho column.
    pub normalized_wdn: f64,
}

/// Time-averaged errors of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub cell: usize,
    pub replication: usize,
    pub seed: u64,
    pub mean_wdn: f64,
    pub mean_wc: f64,
}

impl SweepGrid {
    /// Cells in lambda-major, then rho, then eta order.
    pub fn cells(&self) -> Vec<(u32, u32, f64)> {
        let mut out = Vec::with_capacity(self.lambdas.len() * self.rhos.len() * self.etas.len());
        for &lambda in &self.lambdas {
            for &rho in &self.rhos {
                for &eta in &self.etas {
                    out.push((lambda, rho, eta));
                }
            }
        }
        out
    }
}

/// `base` with one cell's parameters. rho keeps an every-rho schedule if the
/// base uses one; otherwise shocks arrive with probability 1/rho per round.
pub fn cell_config(base: &RunConfig, lambda: u32, rho: u32, eta: f64) -> RunConfig {
    let shock = match base.shock {
        ShockSchedule::Every { .. } => ShockSchedule::Every { rho },
        _ => ShockSchedule::Bernoulli { rho },
    };
    RunConfig { lambda, eta, shock, ..base.clone() }
}

/// Run every cell of `grid` `replications` times.
///
/// Replication `r` of cell `c` uses seed `derive_seed(base.seed, c, r)`.
/// Runs execute in parallel; results come back in (cell, replication)
/// order regardless of scheduling.
pub fn sweep_runs(base: &RunConfig, grid: &SweepGrid, replications: usize) -> Result<Vec<RunSummary>> {
    if grid.lambdas.is_empty() || grid.rhos.is_empty() || grid.etas.is_empty() {
        return Err(Error::Config("sweep grids must be non-empty".into()));
    }
    if replications < 1 {
        return Err(Error::Config("replications must be >= 1".into()));
    }
    let cells = grid.cells();
    let jobs: Vec<(usize, usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..replications).map(move |r| (c, r)))
        .map(|(c, r)| (c, r, derive_seed(base.seed, c as u64, r as u64)))
        .collect();
    let mut seen = HashSet::with_capacity(jobs.len());
    if let Some(&(c, r, s)) = jobs.iter().find(|(_, _, s)| !seen.insert(*s)) {
        return Err(Error::Invariant(format!("derived seed {s} repeats at cell {c} replication {r}")));
    }
    for &(lambda, rho, eta) in &cells {
        cell_config(base, lambda, rho, eta).validate()?;
    }

    jobs.par_iter()
        .map(|&(cell, replication, seed)| {
            let (lambda, rho, eta) = cells[cell];
            let config = RunConfig { seed, ..cell_config(base, lambda, rho, eta) };
            let trace = run(&config)?;
            Ok(RunSummary {
                cell,
                replication,
                seed,
                mean_wdn: mean(&trace.wdn_series()),
                mean_wc: mean(&trace.wc_series()),
            })
        })
        .collect()
}

/// Aggregate per-run summaries into one row per cell.
pub fn summarize(grid: &SweepGrid, runs: &[RunSummary]) -> Vec<SweepRow> {
    let cells = grid.cells();
    let mut rows: Vec<SweepRow> = cells
        .iter()
        .enumerate()
        .map(|(c, &(lambda, rho, eta))| {
            let wdn: Vec<f64> = runs.iter().filter(|r| r.cell == c).map(|r| r.mean_wdn).collect();
            let wc: Vec<f64> = runs.iter().filter(|r| r.cell == c).map(|r| r.mean_wc).collect();
            SweepRow {
                lambda,
                rho,
                eta,
                replication_count: wdn.len(),
                mean_wdn: mean(&wdn),
                mean_wc: mean(&wc),
                p05_wdn: percentile(&wdn, 0.05),
                p95_wdn: percentile(&wdn, 0.95),
                normalized_wdn: f64::NAN,
            }
        })
        .collect();
    for &rho in &grid.rhos {
        let column: Vec<f64> = rows.iter().filter(|r| r.rho == rho).map(|r| r.mean_wdn).collect();
        let scale = mean(&column);
        for row in rows.iter_mut().filter(|r| r.rho == rho) {
            row.normalized_wdn = row.mean_wdn / scale;
        }
    }
    rows
}

pub fn sweep(base: &RunConfig, grid: &SweepGrid, replications: usize) -> Result<Vec<SweepRow>> {
    Ok(summarize(grid, &sweep_runs(base, grid, replications)?))
}
