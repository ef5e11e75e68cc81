//! Monte Carlo experiments: regret traces, period-indexed error estimates,
//! detector error curves and the per-period regret bound.

mod detector;
mod fit;
mod periods;
mod sim;

pub use detector::{detector_error_curve, DetectorCurve, DetectorPoint};
pub use fit::{decay_fit, decay_fit_series, DecayFit};
pub use periods::{bound_check, estimate_pie, BoundReport, BoundRow, PeriodStat};
pub use sim::{monte_carlo, run_once, RegretTrace, RunTrace, UserThroughput};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::oracle::{self, BaselineMode};
use crate::policy::{self, PolicyConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UserSpec {
    pub rate: f64,
    pub entry: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub channels: Vec<ChannelParams>,
    pub users: Vec<UserSpec>,
    pub l0: u64,
    pub c: u64,
    /// `None` selects the default margin for the effective `r_min`.
    pub epsilon: Option<f64>,
    /// `None` means the smallest user rate.
    pub r_min: Option<f64>,
    pub horizon: u64,
    pub runs: u64,
    pub master_seed: u64,
    pub baseline: BaselineMode,
}

impl ExperimentConfig {
    /// Homogeneous or mixed channels, all users entering at slot 0, with the
    /// reference schedule `L0 = 24`, `C = 12`, 5000 slots and 20 runs.
    pub fn reference(channels: Vec<ChannelParams>, rates: &[f64]) -> Self {
        Self {
            channels,
            users: rates
                .iter()
                .map(|&rate| UserSpec { rate, entry: 0 })
                .collect(),
            l0: 24,
            c: 12,
            epsilon: None,
            r_min: None,
            horizon: 5000,
            runs: 20,
            master_seed: 1,
            baseline: BaselineMode::Analytic,
        }
    }

    pub fn eta(&self) -> Vec<f64> {
        self.channels.iter().map(ChannelParams::eta).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.users.iter().map(|u| u.rate).collect()
    }

    pub fn entries(&self) -> Vec<u64> {
        self.users.iter().map(|u| u.entry).collect()
    }

    pub fn effective_r_min(&self) -> Option<f64> {
        self.r_min
            .or_else(|| self.users.iter().map(|u| u.rate).min_by(f64::total_cmp))
    }

    pub fn effective_epsilon(&self) -> Option<f64> {
        self.epsilon
            .or_else(|| self.effective_r_min().map(policy::default_epsilon))
    }

    /// True when every user enters at slot 0, so period boundaries coincide.
    pub fn synchronized(&self) -> bool {
        self.users.iter().all(|u| u.entry == 0)
    }

    /// First slot of the throughput measurement window (the final half).
    pub fn tail_start(&self) -> u64 {
        self.horizon - self.horizon / 2
    }

    pub fn policy(&self) -> Result<Option<PolicyConfig>> {
        let (Some(r_min), Some(eps)) = (self.effective_r_min(), self.effective_epsilon()) else {
            return Ok(None);
        };
        PolicyConfig::new(self.l0, self.c, eps, r_min, self.eta()).map(Some)
    }

    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::config("channel", "at least one channel is required"));
        }
        let (k, n) = (self.users.len(), self.channels.len());
        if k > n {
            return Err(Error::UnsupportedRegime {
                users: k,
                channels: n,
            });
        }
        if self.l0 == 0 {
            return Err(Error::config("policy.L0", "must be >= 1"));
        }
        if self.horizon < self.l0 {
            return Err(Error::config(
                "experiment.horizon",
                format!("must be >= L0 ({} < {})", self.horizon, self.l0),
            ));
        }
        if self.runs == 0 {
            return Err(Error::config("experiment.runs", "must be >= 1"));
        }
        for u in &self.users {
            if !(u.rate > 0.0 && u.rate < 1.0) {
                return Err(Error::config(
                    "user.rate",
                    format!("must be in (0, 1), got {}", u.rate),
                ));
            }
        }
        if let Some(r_min) = self.effective_r_min() {
            if !(r_min > 0.0 && r_min < 1.0) {
                return Err(Error::config("policy.r_min", "must be in (0, 1)"));
            }
            if let Some(u) = self.users.iter().find(|u| u.rate < r_min) {
                return Err(Error::config(
                    "user.rate",
                    format!("{} is below r_min {r_min}", u.rate),
                ));
            }
            let eps = self.effective_epsilon().unwrap_or_default();
            if eps.is_nan() || eps <= 0.0 {
                return Err(Error::config("policy.epsilon", "must be > 0"));
            }
            if eps >= r_min / 2.0 {
                return Err(Error::config(
                    "policy.epsilon",
                    format!("epsilon must be < r_min/2 ({eps} >= {})", r_min / 2.0),
                ));
            }
        }
        if !oracle::in_region(&self.rates(), &self.eta())? {
            return Err(Error::config(
                "user.rate",
                "rate vector is outside the centralized throughput region \
                 (sorted rates must not exceed sorted channel on-fractions)",
            ));
        }
        Ok(())
    }
}
