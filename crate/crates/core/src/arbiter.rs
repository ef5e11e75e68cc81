//! Resolution of a single slot: who succeeded, and what each user observed.
//!
//! A user acting on channel `c` sees the channel as *available* iff `c` is on
//! and no other user transmits on `c`. Transmitters succeed exactly when the
//! channel is available to them; sensors observe the same bit, i.e. the
//! feedback they would have received had they transmitted.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Transmit(usize),
    Sense(usize),
    Absent,
}

impl Action {
    pub fn channel(self) -> Option<usize> {
        match self {
            Action::Transmit(c) | Action::Sense(c) => Some(c),
            Action::Absent => None,
        }
    }

    pub fn is_transmit(self) -> bool {
        matches!(self, Action::Transmit(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlotOutcome {
    pub channel_on: Vec<bool>,
    /// `None` for absent users.
    pub availability: Vec<Option<bool>>,
    /// Only ever true for transmitters.
    pub success: Vec<bool>,
    pub successes_total: usize,
}

impl SlotOutcome {
    /// Binary feedback bit delivered to user `u` at the end of the slot.
    pub fn feedback(&self, u: usize) -> Option<bool> {
        self.availability[u]
    }
}

/// Slot resolver with reusable scratch space.
#[derive(Clone, Debug, Default)]
pub struct SlotArbiter {
    transmitters: Vec<u32>,
}

impl SlotArbiter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn resolve_into(
        &mut self,
        channel_on: &[bool],
        actions: &[Action],
        out: &mut SlotOutcome,
    ) -> Result<()> {
        let n = channel_on.len();
        self.transmitters.clear();
        self.transmitters.resize(n, 0);
        for (u, a) in actions.iter().enumerate() {
            if let Some(c) = a.channel() {
                if c >= n {
                    return Err(Error::InvalidAction(format!(
                        "user {u} acts on channel {c}, but there are only {n} channels"
                    )));
                }
                if a.is_transmit() {
                    self.transmitters[c] += 1;
                }
            }
        }

        out.channel_on.clear();
        out.channel_on.extend_from_slice(channel_on);
        out.availability.clear();
        out.success.clear();
        out.successes_total = 0;
        for a in actions {
            let (avail, ok) = match *a {
                Action::Absent => (None, false),
                Action::Sense(c) => (Some(channel_on[c] && self.transmitters[c] == 0), false),
                Action::Transmit(c) => {
                    let ok = channel_on[c] && self.transmitters[c] == 1;
                    (Some(ok), ok)
                }
            };
            out.availability.push(avail);
            out.success.push(ok);
            out.successes_total += ok as usize;
        }
        Ok(())
    }
}

pub fn resolve_slot(channel_on: &[bool], actions: &[Action]) -> Result<SlotOutcome> {
    let mut out = SlotOutcome::default();
    SlotArbiter::new().resolve_into(channel_on, actions, &mut out)?;
    Ok(out)
}
