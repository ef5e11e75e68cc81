//! The alternating sensing and access (ASA) policy run by each user.
//!
//! A user alternates between *sensing* and *access* periods on one channel.
//! Each period has length `L_k = L0 + k * C` for the user's own period
//! counter `k`, and ends with an occupancy test on the availability samples
//! gathered during it. Channel selection happens inside the boundary
//! transition and never occupies a slot.

use rand::Rng;

use crate::arbiter::Action;
use crate::error::{Error, Result};

/// Default detector margin as a fraction of the minimum target rate.
pub const DEFAULT_EPSILON_FACTOR: f64 = 0.4;

pub fn default_epsilon(r_min: f64) -> f64 {
    DEFAULT_EPSILON_FACTOR * r_min
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyConfig {
    pub l0: u64,
    pub c: u64,
    pub epsilon: f64,
    pub r_min: f64,
    pub eta: Vec<f64>,
}

impl PolicyConfig {
    pub fn new(l0: u64, c: u64, epsilon: f64, r_min: f64, eta: Vec<f64>) -> Result<Self> {
        if l0 == 0 {
            return Err(Error::InvalidParameter("L0 must be >= 1".into()));
        }
        if !(r_min > 0.0 && r_min < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "r_min must be in (0, 1), got {r_min}"
            )));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        if epsilon >= r_min / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be < r_min/2 ({epsilon} >= {})",
                r_min / 2.0
            )));
        }
        if eta.is_empty() {
            return Err(Error::InvalidParameter("no channels".into()));
        }
        Ok(Self {
            l0,
            c,
            epsilon,
            r_min,
            eta,
        })
    }

    pub fn detection_length(&self, k: u64) -> u64 {
        detection_length(k, self.l0, self.c)
    }
}

/// Length of the `k`-th detection period (counting from zero).
pub fn detection_length(k: u64, l0: u64, c: u64) -> u64 {
    l0 + k * c
}

/// Channels whose stationary on-fraction can carry rate `r`.
pub fn qualified_channels(r: f64, eta: &[f64]) -> Result<Vec<usize>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target rate must be in (0, 1), got {r}"
        )));
    }
    let qualified: Vec<usize> = eta
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e >= r)
        .map(|(i, _)| i)
        .collect();
    if qualified.is_empty() {
        return Err(Error::InfeasibleUser { rate: r });
    }
    Ok(qualified)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OccupancyVerdict {
    Unoccupied,
    Occupied,
}

/// Threshold test on the availability fraction. Ties go to `Unoccupied`.
pub fn occupancy_test(la: u64, l: u64, eta: f64, epsilon: f64) -> OccupancyVerdict {
    debug_assert!(l >= 1 && la <= l);
    if la as f64 / l as f64 >= eta - epsilon {
        OccupancyVerdict::Unoccupied
    } else {
        OccupancyVerdict::Occupied
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    ChannelSelection,
    Sensing,
    Access,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coin {
    Head,
    Tail,
}

/// What happened at a period boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub verdict: OccupancyVerdict,
    pub coin: Option<Coin>,
    pub reselected: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UserState {
    mode: Mode,
    channel: usize,
    rate: f64,
    q: f64,
    k: u64,
    slots_in_period: u64,
    la: u64,
    entered: bool,
    qualified: Vec<usize>,
}

impl UserState {
    pub fn new(rate: f64, cfg: &PolicyConfig) -> Result<Self> {
        let qualified = qualified_channels(rate, &cfg.eta)?;
        if rate < cfg.r_min {
            return Err(Error::InvalidParameter(format!(
                "target rate {rate} is below r_min {}",
                cfg.r_min
            )));
        }
        Ok(Self {
            mode: Mode::ChannelSelection,
            channel: qualified[0],
            rate,
            q: rate / cfg.eta[qualified[0]],
            k: 0,
            slots_in_period: 0,
            la: 0,
            entered: false,
            qualified,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn channel(&self) -> usize {
        self.channel
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// Transmission probability while in access.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn period_index(&self) -> u64 {
        self.k
    }

    pub fn slots_in_period(&self) -> u64 {
        self.slots_in_period
    }

    pub fn available_count(&self) -> u64 {
        self.la
    }

    pub fn entered(&self) -> bool {
        self.entered
    }

    pub fn qualified(&self) -> &[usize] {
        &self.qualified
    }

    pub fn in_access(&self) -> bool {
        self.entered && self.mode == Mode::Access
    }

    pub fn period_length(&self, cfg: &PolicyConfig) -> u64 {
        cfg.detection_length(self.k)
    }

    pub fn period_complete(&self, cfg: &PolicyConfig) -> bool {
        self.entered && self.slots_in_period == self.period_length(cfg)
    }

    /// Joins the system: pick a qualified channel uniformly and start sensing.
    pub fn enter<R: Rng + ?Sized>(&mut self, cfg: &PolicyConfig, rng: &mut R) {
        self.entered = true;
        self.k = 0;
        self.la = 0;
        self.slots_in_period = 0;
        self.select_channel(cfg, rng);
    }

    fn select_channel<R: Rng + ?Sized>(&mut self, cfg: &PolicyConfig, rng: &mut R) {
        self.mode = Mode::ChannelSelection;
        let pick = rng.random_range(0..self.qualified.len());
        self.channel = self.qualified[pick];
        self.q = self.rate / cfg.eta[self.channel];
        self.mode = Mode::Sensing;
    }

    pub fn slot_action<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Action> {
        if !self.entered {
            return Ok(Action::Absent);
        }
        match self.mode {
            Mode::ChannelSelection => Err(Error::Internal(
                "channel selection is instantaneous and never spans a slot",
            )),
            Mode::Sensing => Ok(Action::Sense(self.channel)),
            Mode::Access => {
                if rng.random_bool(self.q) {
                    Ok(Action::Transmit(self.channel))
                } else {
                    Ok(Action::Sense(self.channel))
                }
            }
        }
    }

    /// Folds one availability sample (feedback or observation) into the period.
    pub fn record_outcome(&mut self, available: bool) {
        debug_assert!(self.entered && self.mode != Mode::ChannelSelection);
        self.la += available as u64;
        self.slots_in_period += 1;
    }

    pub fn end_period_transition<R: Rng + ?Sized>(
        &mut self,
        cfg: &PolicyConfig,
        rng: &mut R,
    ) -> Result<Transition> {
        if !self.period_complete(cfg) {
            return Err(Error::Internal(
                "period boundary reached before L_k samples were collected",
            ));
        }
        let verdict = occupancy_test(
            self.la,
            self.slots_in_period,
            cfg.eta[self.channel],
            cfg.epsilon,
        );
        let mut coin = None;
        let mut reselected = false;
        match (self.mode, verdict) {
            (Mode::Sensing, OccupancyVerdict::Unoccupied) => self.mode = Mode::Access,
            (Mode::Sensing, OccupancyVerdict::Occupied) => {
                if rng.random_bool(0.5) {
                    coin = Some(Coin::Head);
                    self.mode = Mode::Access;
                } else {
                    coin = Some(Coin::Tail);
                    self.select_channel(cfg, rng);
                    reselected = true;
                }
            }
            (Mode::Access, OccupancyVerdict::Unoccupied) => {}
            (Mode::Access, OccupancyVerdict::Occupied) => {
                self.select_channel(cfg, rng);
                reselected = true;
            }
            (Mode::ChannelSelection, _) => {
                return Err(Error::Internal("period ended in channel selection"))
            }
        }
        self.k += 1;
        self.la = 0;
        self.slots_in_period = 0;
        self.q = self.rate / cfg.eta[self.channel];
        Ok(Transition {
            verdict,
            coin,
            reselected,
        })
    }
}
