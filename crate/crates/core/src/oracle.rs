//! Centralized fixed-allocation baseline.
//!
//! A central controller that knows every rate assigns each user its own
//! channel for the whole horizon. The rate vector is achievable this way iff,
//! with rates and on-fractions both sorted descending, the i-th largest rate
//! fits in the i-th largest on-fraction.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BaselineMode {
    /// Expected centralized successes, `sum_u r_u * (t - entry_u)+`.
    #[default]
    Analytic,
    /// Centralized users transmitting on the same channel sample paths.
    Simulated,
}

impl BaselineMode {
    pub fn name(self) -> &'static str {
        match self {
            BaselineMode::Analytic => "analytic",
            BaselineMode::Simulated => "simulated",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Allocation {
    /// `assignment[u]` is the channel of user `u`.
    pub assignment: Vec<usize>,
    pub feasible: bool,
}

fn check_regime(users: usize, channels: usize) -> Result<()> {
    if users > channels {
        return Err(Error::UnsupportedRegime { users, channels });
    }
    Ok(())
}

/// Indices sorted by value descending, ties by index.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

pub fn in_region(rates: &[f64], eta: &[f64]) -> Result<bool> {
    check_regime(rates.len(), eta.len())?;
    let r = descending_order(rates);
    let e = descending_order(eta);
    Ok(r.iter().zip(&e).all(|(&u, &c)| rates[u] <= eta[c]))
}

pub fn fixed_allocation(rates: &[f64], eta: &[f64]) -> Result<Allocation> {
    if !in_region(rates, eta)? {
        return Err(Error::Infeasible);
    }
    let mut assignment = vec![0; rates.len()];
    for (&u, &c) in descending_order(rates).iter().zip(&descending_order(eta)) {
        assignment[u] = c;
    }
    Ok(Allocation {
        assignment,
        feasible: true,
    })
}

/// Expected centralized success count after `t` slots.
pub fn analytic_cumulative(rates: &[f64], entries: &[u64], t: u64) -> f64 {
    rates
        .iter()
        .zip(entries)
        .map(|(&r, &e)| r * t.saturating_sub(e) as f64)
        .sum()
}

/// Fixed-allocation users driven slot by slot on externally supplied channel
/// states. Each user transmits on its channel with probability `r / eta`.
#[derive(Clone, Debug)]
pub struct CentralizedScheme {
    assignment: Vec<usize>,
    q: Vec<f64>,
    entries: Vec<u64>,
    rngs: Vec<SimRng>,
}

impl CentralizedScheme {
    pub fn new(rates: &[f64], entries: &[u64], eta: &[f64], run_seed: u64) -> Result<Self> {
        let alloc = fixed_allocation(rates, eta)?;
        let q = rates
            .iter()
            .zip(&alloc.assignment)
            .map(|(&r, &c)| r / eta[c])
            .collect();
        let rngs = (0..rates.len())
            .map(|u| rng::central_stream(run_seed, u))
            .collect();
        Ok(Self {
            assignment: alloc.assignment,
            q,
            entries: entries.to_vec(),
            rngs,
        })
    }

    /// Successes in slot `slot` (zero-based) given the channel states.
    pub fn step(&mut self, slot: u64, channel_on: &[bool]) -> u64 {
        let mut successes = 0;
        for u in 0..self.assignment.len() {
            if slot < self.entries[u] {
                continue;
            }
            // Channels are distinct, so a transmission on an on channel succeeds.
            if self.rngs[u].random_bool(self.q[u]) && channel_on[self.assignment[u]] {
                successes += 1;
            }
        }
        successes
    }
}

/// Lower bound on the probability that one round of coin flips and uniform
/// channel draws separates all users. `qualified_counts` holds each user's
/// number of qualified channels.
pub fn lucky_bound(qualified_counts: &[usize]) -> f64 {
    let mut counts = qualified_counts.to_vec();
    counts.sort_unstable();
    let mut bound = 0.5f64.powi(counts.len() as i32);
    for (i, &n) in counts.iter().enumerate() {
        let k = i + 1;
        if n < k {
            return 0.0;
        }
        bound *= (n - k + 1) as f64 / n as f64;
    }
    bound
}
