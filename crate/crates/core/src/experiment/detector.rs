//! Error rates of the occupancy detector as a function of period length.

use rand::Rng;
use rayon::prelude::*;

use super::fit::{decay_fit, DecayFit};
use crate::arbiter::{Action, SlotArbiter, SlotOutcome};
use crate::channel::{ChannelParams, ChannelProcess, StartRule};
use crate::error::{Error, Result};
use crate::policy::{occupancy_test, OccupancyVerdict};
use crate::rng;

pub const MIN_TRIALS: u64 = 1000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorPoint {
    pub length: u64,
    /// False alarm: declared occupied with nobody else on the channel.
    pub false_alarm: f64,
    pub false_alarm_stderr: f64,
    /// Miss: declared unoccupied while an occupant transmits with `q = r / eta`.
    pub miss: f64,
    pub miss_stderr: f64,
    /// Mean of `La / L` with no occupant.
    pub h0_mean: f64,
    /// Mean of `La / L` with the occupant.
    pub h1_mean: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorCurve {
    pub trials: u64,
    pub points: Vec<DetectorPoint>,
    /// `None` when fewer than three lengths produced any error.
    pub false_alarm_fit: Option<DecayFit>,
    pub miss_fit: Option<DecayFit>,
}

/// Availability count seen by a sensor over `len` slots, optionally with an
/// occupant transmitting with probability `q`.
fn sensed_availability(
    params: ChannelParams,
    len: u64,
    occupant_q: Option<f64>,
    seed: u64,
    arbiter: &mut SlotArbiter,
    outcome: &mut SlotOutcome,
) -> Result<u64> {
    let stream = occupant_q.is_some() as usize;
    let mut channel = ChannelProcess::new(
        params,
        rng::channel_stream(seed, stream),
        StartRule::default(),
    );
    let mut occupant_rng = rng::user_stream(seed, 0);
    let mut actions = [Action::Sense(0), Action::Absent];
    let mut la = 0;
    for _ in 0..len {
        let on = [channel.next_slot().is_on()];
        if let Some(q) = occupant_q {
            actions[1] = if occupant_rng.random_bool(q) {
                Action::Transmit(0)
            } else {
                Action::Sense(0)
            };
        }
        arbiter.resolve_into(&on, &actions, outcome)?;
        la += outcome.availability[0].unwrap_or(false) as u64;
    }
    Ok(la)
}

fn error_rate(errors: u64, trials: u64) -> (f64, f64) {
    let p = errors as f64 / trials as f64;
    (p, (p * (1.0 - p) / trials as f64).sqrt())
}

pub fn detector_error_curve(
    channel: ChannelParams,
    occupant_rate: f64,
    epsilon: f64,
    lengths: &[u64],
    trials: u64,
    seed: u64,
) -> Result<DetectorCurve> {
    let eta = channel.eta();
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "detector curve needs at least {MIN_TRIALS} trials per length, got {trials}"
        )));
    }
    if !(epsilon > 0.0 && epsilon < eta) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be in (0, eta) = (0, {eta}), got {epsilon}"
        )));
    }
    if !(occupant_rate > 0.0 && occupant_rate <= eta) {
        return Err(Error::InvalidParameter(format!(
            "occupant rate must be in (0, eta] = (0, {eta}], got {occupant_rate}"
        )));
    }
    if lengths.contains(&0) {
        return Err(Error::InvalidParameter(
            "period lengths must be >= 1".into(),
        ));
    }
    let q = occupant_rate / eta;

    let points = lengths
        .par_iter()
        .enumerate()
        .map(|(li, &len)| -> Result<DetectorPoint> {
            let mut arbiter = SlotArbiter::new();
            let mut outcome = SlotOutcome::default();
            let (mut fa, mut md) = (0u64, 0u64);
            let (mut h0_sum, mut h1_sum) = (0u64, 0u64);
            for t in 0..trials {
                let seed = rng::run_seed(seed, li as u64 * trials + t);
                let la0 =
                    sensed_availability(channel, len, None, seed, &mut arbiter, &mut outcome)?;
                let la1 =
                    sensed_availability(channel, len, Some(q), seed, &mut arbiter, &mut outcome)?;
                h0_sum += la0;
                h1_sum += la1;
                fa += (occupancy_test(la0, len, eta, epsilon) == OccupancyVerdict::Occupied) as u64;
                md +=
                    (occupancy_test(la1, len, eta, epsilon) == OccupancyVerdict::Unoccupied) as u64;
            }
            let (false_alarm, false_alarm_stderr) = error_rate(fa, trials);
            let (miss, miss_stderr) = error_rate(md, trials);
            let denom = (trials * len) as f64;
            Ok(DetectorPoint {
                length: len,
                false_alarm,
                false_alarm_stderr,
                miss,
                miss_stderr,
                h0_mean: h0_sum as f64 / denom,
                h1_mean: h1_sum as f64 / denom,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = points.iter().map(|p| p.length as f64).collect();
    let fa: Vec<f64> = points.iter().map(|p| p.false_alarm).collect();
    let md: Vec<f64> = points.iter().map(|p| p.miss).collect();
    Ok(DetectorCurve {
        trials,
        false_alarm_fit: decay_fit(&xs, &fa).ok(),
        miss_fit: decay_fit(&xs, &md).ok(),
        points,
    })
}
