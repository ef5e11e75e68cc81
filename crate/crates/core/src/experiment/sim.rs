use rayon::prelude::*;

use super::periods::{self, PeriodStat};
use super::ExperimentConfig;
use crate::arbiter::{Action, SlotArbiter, SlotOutcome};
use crate::channel::{ChannelProcess, StartRule};
use crate::error::Result;
use crate::oracle::{self, BaselineMode, CentralizedScheme};
use crate::policy::{Mode, UserState};
use crate::rng;

/// Everything recorded from one simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunTrace {
    /// ASA successes in each slot.
    pub asa_successes: Vec<u32>,
    /// Channels in the on state in each slot.
    pub on_channels: Vec<u32>,
    /// Centralized successes per slot, only with the simulated baseline.
    pub central_successes: Option<Vec<u32>>,
    /// All users entered, in access, on pairwise distinct channels.
    pub good: Vec<bool>,
    /// Per-user successes from `tail_start` to the horizon.
    pub user_tail_successes: Vec<u64>,
}

/// Simulates one run of `config.horizon` slots.
pub fn run_once(config: &ExperimentConfig, run_seed: u64) -> Result<RunTrace> {
    let horizon = config.horizon as usize;
    let policy = config.policy()?;
    let n = config.channels.len();
    let k = config.users.len();

    let mut channels: Vec<ChannelProcess> = config
        .channels
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            ChannelProcess::new(
                p,
                rng::channel_stream(run_seed, i),
                StartRule::StationaryBernoulli,
            )
        })
        .collect();
    let mut users = Vec::with_capacity(k);
    let mut user_rngs = Vec::with_capacity(k);
    if let Some(policy) = &policy {
        for (u, spec) in config.users.iter().enumerate() {
            users.push(UserState::new(spec.rate, policy)?);
            user_rngs.push(rng::user_stream(run_seed, u));
        }
    }
    let mut central = match config.baseline {
        BaselineMode::Simulated => Some(CentralizedScheme::new(
            &config.rates(),
            &config.entries(),
            &config.eta(),
            run_seed,
        )?),
        BaselineMode::Analytic => None,
    };

    let mut trace = RunTrace {
        asa_successes: Vec::with_capacity(horizon),
        on_channels: Vec::with_capacity(horizon),
        central_successes: central.as_ref().map(|_| Vec::with_capacity(horizon)),
        good: Vec::with_capacity(horizon),
        user_tail_successes: vec![0; k],
    };
    let tail_start = config.tail_start();
    let mut on = vec![false; n];
    let mut actions = vec![Action::Absent; k];
    let mut outcome = SlotOutcome::default();
    let mut arbiter = SlotArbiter::new();
    let mut taken = vec![false; n];

    for slot in 0..config.horizon {
        if let Some(policy) = &policy {
            for (u, user) in users.iter_mut().enumerate() {
                if config.users[u].entry == slot {
                    user.enter(policy, &mut user_rngs[u]);
                }
            }
        }
        for (state, ch) in on.iter_mut().zip(&mut channels) {
            *state = ch.next_slot().is_on();
        }
        for (u, user) in users.iter().enumerate() {
            actions[u] = user.slot_action(&mut user_rngs[u])?;
        }
        arbiter.resolve_into(&on, &actions, &mut outcome)?;

        taken.iter_mut().for_each(|t| *t = false);
        let mut good = true;
        for user in &users {
            if user.mode() != Mode::Access || !user.entered() || taken[user.channel()] {
                good = false;
                break;
            }
            taken[user.channel()] = true;
        }

        if let Some(policy) = &policy {
            for (u, user) in users.iter_mut().enumerate() {
                let Some(available) = outcome.availability[u] else {
                    continue;
                };
                user.record_outcome(available);
                if outcome.success[u] && slot >= tail_start {
                    trace.user_tail_successes[u] += 1;
                }
                if user.period_complete(policy) {
                    user.end_period_transition(policy, &mut user_rngs[u])?;
                }
            }
        }

        trace.asa_successes.push(outcome.successes_total as u32);
        trace
            .on_channels
            .push(on.iter().filter(|&&b| b).count() as u32);
        trace.good.push(good);
        if let (Some(scheme), Some(out)) = (central.as_mut(), trace.central_successes.as_mut()) {
            out.push(scheme.step(slot, &on) as u32);
        }
    }
    Ok(trace)
}

/// Sample moments kept as exact integers so the reduction does not depend
/// on run order.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    n: u64,
    sum: i128,
    sumsq: i128,
}

impl Moments {
    pub(crate) fn push(&mut self, x: i64) {
        self.n += 1;
        self.sum += x as i128;
        self.sumsq += (x as i128) * (x as i128);
    }

    pub(crate) fn mean(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.sum as f64 / self.n as f64
    }

    pub(crate) fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as i128;
        // n * sum of squared deviations, exact.
        let scaled = n * self.sumsq - self.sum * self.sum;
        let var = scaled as f64 / (self.n as f64 * (self.n - 1) as f64);
        (var.max(0.0) / self.n as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UserThroughput {
    pub rate: f64,
    /// Mean success rate over the final half of the horizon.
    pub achieved: f64,
    pub stderr: f64,
}

/// Run-averaged regret curves. Entry `j` of each per-slot vector describes
/// the state after `j + 1` slots.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    pub runs: u64,
    pub baseline: BaselineMode,
    pub centralized_cum: Vec<f64>,
    pub asa_cum_mean: Vec<f64>,
    pub regret_mean: Vec<f64>,
    pub regret_stderr: Vec<f64>,
    pub good_frac: Vec<f64>,
    pub users: Vec<UserThroughput>,
    /// Period-indexed statistics; present only for synchronized entry.
    pub periods: Option<Vec<PeriodStat>>,
}

impl RegretTrace {
    pub fn horizon(&self) -> usize {
        self.regret_mean.len()
    }

    pub fn final_regret(&self) -> (f64, f64) {
        let last = self.horizon() - 1;
        (self.regret_mean[last], self.regret_stderr[last])
    }
}

pub(crate) fn run_all(config: &ExperimentConfig, threads: usize) -> Result<Vec<RunTrace>> {
    let seeds: Vec<u64> = (0..config.runs)
        .map(|r| rng::run_seed(config.master_seed, r))
        .collect();
    if threads == 1 {
        return seeds.iter().map(|&s| run_once(config, s)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool");
    pool.install(|| seeds.par_iter().map(|&s| run_once(config, s)).collect())
}

/// Runs `config.runs` independent simulations and averages them.
/// `threads == 0` uses all available cores; results do not depend on it.
pub fn monte_carlo(config: &ExperimentConfig, threads: usize) -> Result<RegretTrace> {
    config.validate()?;
    let traces = run_all(config, threads)?;
    Ok(aggregate(config, &traces))
}

pub(crate) fn aggregate(config: &ExperimentConfig, traces: &[RunTrace]) -> RegretTrace {
    let horizon = config.horizon as usize;
    let rates = config.rates();
    let entries = config.entries();
    let simulated = config.baseline == BaselineMode::Simulated;

    let mut asa = vec![Moments::default(); horizon];
    let mut central = vec![Moments::default(); horizon];
    // Simulated: central - asa per run. Analytic: -asa per run.
    let mut regret = vec![Moments::default(); horizon];
    let mut good = vec![0u64; horizon];
    let mut user_tail = vec![Moments::default(); rates.len()];

    for tr in traces {
        let (mut a, mut c) = (0i64, 0i64);
        for j in 0..horizon {
            a += tr.asa_successes[j] as i64;
            if let Some(cs) = &tr.central_successes {
                c += cs[j] as i64;
            }
            asa[j].push(a);
            central[j].push(c);
            regret[j].push(c - a);
            good[j] += tr.good[j] as u64;
        }
        for (m, &s) in user_tail.iter_mut().zip(&tr.user_tail_successes) {
            m.push(s as i64);
        }
    }

    let runs = traces.len() as u64;
    let centralized_cum: Vec<f64> = (0..horizon)
        .map(|j| {
            if simulated {
                central[j].mean()
            } else {
                oracle::analytic_cumulative(&rates, &entries, j as u64 + 1)
            }
        })
        .collect();
    let regret_mean = (0..horizon)
        .map(|j| {
            if simulated {
                regret[j].mean()
            } else {
                centralized_cum[j] - asa[j].mean()
            }
        })
        .collect();
    let window = (config.horizon - config.tail_start()) as f64;
    let users = rates
        .iter()
        .zip(&user_tail)
        .map(|(&rate, m)| UserThroughput {
            rate,
            achieved: m.mean() / window,
            stderr: m.stderr() / window,
        })
        .collect();

    RegretTrace {
        runs,
        baseline: config.baseline,
        centralized_cum,
        asa_cum_mean: asa.iter().map(Moments::mean).collect(),
        regret_mean,
        regret_stderr: regret.iter().map(Moments::stderr).collect(),
        good_frac: good.iter().map(|&g| g as f64 / runs as f64).collect(),
        users,
        periods: config
            .synchronized()
            .then(|| periods::period_stats(config, traces)),
    }
}
