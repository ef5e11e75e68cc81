//! Slotted-time simulation of K users sharing N on-off renewal channels with
//! the alternating sensing and access policy, measured against a centralized
//! fixed-allocation baseline.

pub mod arbiter;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod policy;
pub mod report;
pub mod rng;

pub use error::{Error, Result};
