//! Period-indexed statistics for synchronized entry.
//!
//! When every user enters at slot 0 they all follow the same period schedule,
//! so "period i" spans identical slots for everyone and the configuration is
//! constant inside it. A period is *bad* if, at its final slot, some user is
//! not in access or two users share a channel.

use super::sim::{self, Moments, RunTrace};
use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::oracle::{self, BaselineMode};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodStat {
    /// 1-based period index.
    pub index: u64,
    pub start_slot: u64,
    pub length: u64,
    /// Estimated probability that the configuration in this period is bad.
    pub p_err: f64,
    pub p_err_stderr: f64,
    /// Mean cumulative regret at the end of the period.
    pub regret_mean: f64,
    pub regret_stderr: f64,
    /// `sum_{i <= index} N * L_i * p_err_i`.
    pub rhs: f64,
    /// Standard error of the per-run difference `regret - rhs`.
    pub gap_stderr: f64,
}

impl PeriodStat {
    pub fn end_slot(&self) -> u64 {
        self.start_slot + self.length - 1
    }
}

/// `(start, length)` of every period that ends within the horizon.
pub(crate) fn schedule(config: &ExperimentConfig) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let (mut start, mut k) = (0u64, 0u64);
    loop {
        let len = config.l0 + k * config.c;
        if start + len > config.horizon {
            return out;
        }
        out.push((start, len));
        start += len;
        k += 1;
    }
}

pub(crate) fn period_stats(config: &ExperimentConfig, traces: &[RunTrace]) -> Vec<PeriodStat> {
    let periods = schedule(config);
    let n_channels = config.channels.len() as i64;
    let mut bad = vec![Moments::default(); periods.len()];
    let mut regret = vec![Moments::default(); periods.len()];
    let mut gap = vec![Moments::default(); periods.len()];

    for tr in traces {
        let (mut asa, mut central, mut rhs) = (0i64, 0i64, 0i64);
        let mut slot = 0usize;
        for (i, &(start, len)) in periods.iter().enumerate() {
            let end = (start + len) as usize;
            while slot < end {
                asa += tr.asa_successes[slot] as i64;
                if let Some(cs) = &tr.central_successes {
                    central += cs[slot] as i64;
                }
                slot += 1;
            }
            let is_bad = !tr.good[end - 1];
            rhs += n_channels * len as i64 * is_bad as i64;
            bad[i].push(is_bad as i64);
            regret[i].push(central - asa);
            gap[i].push(central - asa - rhs);
        }
    }

    let rates = config.rates();
    let entries = config.entries();
    let mut rhs = 0.0;
    periods
        .iter()
        .enumerate()
        .map(|(i, &(start, length))| {
            let offset = match config.baseline {
                BaselineMode::Analytic => {
                    oracle::analytic_cumulative(&rates, &entries, start + length)
                }
                BaselineMode::Simulated => 0.0,
            };
            let p_err = bad[i].mean();
            rhs += (n_channels as u64 * length) as f64 * p_err;
            PeriodStat {
                index: i as u64 + 1,
                start_slot: start,
                length,
                p_err,
                p_err_stderr: bad[i].stderr(),
                regret_mean: offset + regret[i].mean(),
                regret_stderr: regret[i].stderr(),
                rhs,
                gap_stderr: gap[i].stderr(),
            }
        })
        .collect()
}

fn require_synchronized(config: &ExperimentConfig) -> Result<()> {
    if !config.synchronized() {
        return Err(Error::Unsupported(
            "period-indexed estimates need every user to enter at slot 0".into(),
        ));
    }
    Ok(())
}

/// Per-period probability that the configuration is not good.
pub fn estimate_pie(config: &ExperimentConfig, threads: usize) -> Result<Vec<PeriodStat>> {
    require_synchronized(config)?;
    let trace = sim::monte_carlo(config, threads)?;
    Ok(trace
        .periods
        .expect("synchronized runs carry period statistics"))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundRow {
    pub period: PeriodStat,
    /// `rhs - regret_mean`.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    /// Mean regret must not exceed the bound by more than three standard
    /// errors of the per-run difference.
    pub fn from_periods(periods: &[PeriodStat]) -> Self {
        let rows = periods
            .iter()
            .map(|&p| {
                let margin = p.rhs - p.regret_mean;
                BoundRow {
                    period: p,
                    margin,
                    holds: -margin <= 3.0 * p.gap_stderr,
                }
            })
            .collect();
        Self { rows }
    }

    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn first_violation(&self) -> Option<u64> {
        self.rows.iter().find(|r| !r.holds).map(|r| r.period.index)
    }
}

/// Checks the per-period regret bound on a synchronized, analytic-baseline run.
pub fn bound_check(config: &ExperimentConfig, threads: usize) -> Result<BoundReport> {
    require_synchronized(config)?;
    if config.baseline != BaselineMode::Analytic {
        return Err(Error::Unsupported(
            "the regret bound check uses the analytic baseline".into(),
        ));
    }
    let periods = estimate_pie(config, threads)?;
    Ok(BoundReport::from_periods(&periods))
}
