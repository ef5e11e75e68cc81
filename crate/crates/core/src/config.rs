//! Experiment configuration files.
//!
//! The format is line-oriented `key = value` text grouped by `[section]`
//! headers. `[channel]` and `[user]` may repeat; each header opens a new
//! entry, and `count = n` replicates that entry `n` times. `#` starts a
//! comment. See `configs/` for complete files.
//!
//! ```text
//! [channel]
//! kind = geometric        # or deterministic
//! on_mean = 3.23
//! off_mean = 1.43
//! count = 6
//!
//! [user]
//! rate = 0.5
//! entry = 0               # optional, default 0
//! count = 4
//!
//! [policy]
//! L0 = 24
//! C = 12
//! epsilon = 0.2           # optional, default 0.4 * r_min
//! r_min = 0.5             # optional, default min user rate
//!
//! [experiment]
//! horizon = 5000
//! runs = 20               # optional, default 20
//! seed = 1                # optional, default 1
//! baseline = analytic     # or simulated
//!
//! [detector]              # optional, used by detector-curve
//! lengths = 12, 24, 36
//! trials = 10000
//! occupant_rate = 0.5
//! channel = 0
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use crate::channel::{ChannelParams, PeriodDistribution, PeriodKind};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentConfig, UserSpec};
use crate::oracle::BaselineMode;

pub const DEFAULT_RUNS: u64 = 20;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct DetectorSettings {
    pub lengths: Vec<u64>,
    pub trials: u64,
    /// `None` means the effective `r_min`.
    pub occupant_rate: Option<f64>,
    pub channel: usize,
}

impl Default for DetectorSettings {
    fn default() -> Self {
        Self {
            lengths: (1..=10).map(|i| 12 * i).collect(),
            trials: DEFAULT_TRIALS,
            occupant_rate: None,
            channel: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    pub detector: DetectorSettings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Channel,
    User,
    Policy,
    Experiment,
    Detector,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "channel" => Section::Channel,
            "user" => Section::User,
            "policy" => Section::Policy,
            "experiment" => Section::Experiment,
            "detector" => Section::Detector,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Section::Channel => "channel",
            Section::User => "user",
            Section::Policy => "policy",
            Section::Experiment => "experiment",
            Section::Detector => "detector",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Section::Channel => &["kind", "on_mean", "off_mean", "count"],
            Section::User => &["rate", "entry", "count"],
            Section::Policy => &["L0", "C", "epsilon", "r_min"],
            Section::Experiment => &["horizon", "runs", "seed", "baseline"],
            Section::Detector => &["lengths", "trials", "occupant_rate", "channel"],
        }
    }

    fn repeats(self) -> bool {
        matches!(self, Section::Channel | Section::User)
    }
}

/// One `[section]` block: key -> (value, line number).
#[derive(Debug)]
struct Block {
    section: Section,
    values: BTreeMap<String, (String, usize)>,
}

impl Block {
    fn field(&self, key: &str) -> String {
        format!("{}.{}", self.section.name(), key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(v, _)| v.as_str())
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| Error::config(self.field(key), "missing required field"))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|_| {
                    Error::config(self.field(key), format!("expected {what}, got `{v}`"))
                })
            })
            .transpose()
    }

    fn real(&self, key: &str) -> Result<Option<f64>> {
        self.parse::<f64>(key, "a number")
    }

    fn integer(&self, key: &str) -> Result<Option<u64>> {
        self.parse::<u64>(key, "a non-negative integer")
    }
}

fn tokenize(text: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| {
                Error::config(format!("line {lineno}"), "unterminated section header")
            })?;
            let section = Section::parse(name.trim()).ok_or_else(|| {
                Error::config(
                    format!("line {lineno}"),
                    format!("unknown section `[{name}]`"),
                )
            })?;
            if !section.repeats() && blocks.iter().any(|b| b.section == section) {
                return Err(Error::config(
                    section.name(),
                    format!("section repeated at line {lineno}"),
                ));
            }
            blocks.push(Block {
                section,
                values: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {lineno}"), "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let block = blocks.last_mut().ok_or_else(|| {
            Error::config(key, format!("line {lineno}: key outside of any [section]"))
        })?;
        if !block.section.keys().contains(&key) {
            return Err(Error::config(
                block.field(key),
                format!("unknown key (line {lineno})"),
            ));
        }
        if block
            .values
            .insert(key.to_string(), (value.to_string(), lineno))
            .is_some()
        {
            return Err(Error::config(
                block.field(key),
                format!("duplicate key (line {lineno})"),
            ));
        }
    }
    Ok(blocks)
}

fn channel_entry(block: &Block) -> Result<(ChannelParams, u64)> {
    let kind = match block.required("kind")? {
        "geometric" => PeriodKind::Geometric,
        "deterministic" => PeriodKind::Deterministic,
        other => {
            return Err(Error::config(
                block.field("kind"),
                format!("expected `geometric` or `deterministic`, got `{other}`"),
            ))
        }
    };
    let mean = |key: &str| -> Result<PeriodDistribution> {
        block.required(key)?;
        let v = block.real(key)?.unwrap_or_default();
        PeriodDistribution::new(kind, v)
            .map_err(|_| Error::config(block.field(key), format!("must be >= 1 slot, got {v}")))
    };
    let params = ChannelParams::new(mean("on_mean")?, mean("off_mean")?)?;
    Ok((params, count(block)?))
}

fn count(block: &Block) -> Result<u64> {
    let n = block.integer("count")?.unwrap_or(1);
    if n == 0 {
        return Err(Error::config(block.field("count"), "must be >= 1"));
    }
    Ok(n)
}

fn user_entry(block: &Block) -> Result<(UserSpec, u64)> {
    block.required("rate")?;
    let rate = block.real("rate")?.unwrap_or_default();
    let entry = block.integer("entry")?.unwrap_or(0);
    Ok((UserSpec { rate, entry }, count(block)?))
}

/// Parses configuration text without the cross-field checks.
pub fn parse_unvalidated(text: &str) -> Result<ConfigFile> {
    let blocks = tokenize(text)?;
    let find = |s: Section| blocks.iter().find(|b| b.section == s);

    let mut channels = Vec::new();
    let mut users = Vec::new();
    for b in &blocks {
        match b.section {
            Section::Channel => {
                let (params, n) = channel_entry(b)?;
                channels.extend(std::iter::repeat_n(params, n as usize));
            }
            Section::User => {
                let (spec, n) = user_entry(b)?;
                users.extend(std::iter::repeat_n(spec, n as usize));
            }
            _ => {}
        }
    }

    let policy =
        find(Section::Policy).ok_or_else(|| Error::config("policy", "missing [policy] section"))?;
    policy.required("L0")?;
    policy.required("C")?;
    let l0 = policy.integer("L0")?.unwrap_or_default();
    let c = policy.integer("C")?.unwrap_or_default();
    let epsilon = policy.real("epsilon")?;
    let r_min = policy.real("r_min")?;

    let exp = find(Section::Experiment)
        .ok_or_else(|| Error::config("experiment", "missing [experiment] section"))?;
    exp.required("horizon")?;
    let horizon = exp.integer("horizon")?.unwrap_or_default();
    let runs = exp.integer("runs")?.unwrap_or(DEFAULT_RUNS);
    let master_seed = exp.integer("seed")?.unwrap_or(DEFAULT_SEED);
    let baseline = match exp.raw("baseline").unwrap_or("analytic") {
        "analytic" => BaselineMode::Analytic,
        "simulated" => BaselineMode::Simulated,
        other => {
            return Err(Error::config(
                "experiment.baseline",
                format!("expected `analytic` or `simulated`, got `{other}`"),
            ))
        }
    };

    let mut detector = DetectorSettings::default();
    if let Some(d) = find(Section::Detector) {
        if let Some(list) = d.raw("lengths") {
            detector.lengths = list
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<u64>()
                        .ok()
                        .filter(|&l| l > 0)
                        .ok_or_else(|| {
                            Error::config(
                                "detector.lengths",
                                format!("expected positive integers, got `{}`", s.trim()),
                            )
                        })
                })
                .collect::<Result<_>>()?;
        }
        if let Some(t) = d.integer("trials")? {
            detector.trials = t;
        }
        detector.occupant_rate = d.real("occupant_rate")?;
        if let Some(ch) = d.integer("channel")? {
            detector.channel = ch as usize;
        }
    }

    Ok(ConfigFile {
        experiment: ExperimentConfig {
            channels,
            users,
            l0,
            c,
            epsilon,
            r_min,
            horizon,
            runs,
            master_seed,
            baseline,
        },
        detector,
    })
}

pub fn parse_str(text: &str) -> Result<ConfigFile> {
    validate(parse_unvalidated(text)?)
}

/// Cross-field checks: region membership, epsilon bound, user count.
pub fn validate(file: ConfigFile) -> Result<ConfigFile> {
    file.experiment.validate()?;
    if file.detector.channel >= file.experiment.channels.len() {
        return Err(Error::config(
            "detector.channel",
            format!(
                "index {} out of range for {} channels",
                file.detector.channel,
                file.experiment.channels.len()
            ),
        ));
    }
    Ok(file)
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load(path: &Path) -> Result<ConfigFile> {
    parse_str(&read(path)?)
}

/// Reads and fully validates an experiment configuration.
pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    load(path).map(|f| f.experiment)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "
[channel]
kind = geometric
on_mean = 3.23
off_mean = 1.43
count = 4

[user]
rate = 0.5
count = 4

[policy]
L0 = 24
C = 12

[experiment]
horizon = 5000
";

    #[test]
    fn parses_defaults() {
        let f = parse_str(BASE).unwrap();
        let e = &f.experiment;
        assert_eq!(e.channels.len(), 4);
        assert_eq!(e.users.len(), 4);
        assert_eq!(
            (e.l0, e.c, e.horizon, e.runs, e.master_seed),
            (24, 12, 5000, 20, 1)
        );
        assert_eq!(e.baseline, BaselineMode::Analytic);
        assert_eq!(f.detector, DetectorSettings::default());
    }

    fn err(text: &str) -> String {
        parse_str(text).unwrap_err().to_string()
    }

    #[test]
    fn diagnostics_name_the_field() {
        assert!(err(&BASE.replace("on_mean = 3.23\n", "")).contains("channel.on_mean"));
        assert!(err(&BASE.replace("L0 = 24", "L0 = -3")).contains("policy.L0"));
        assert!(err(&BASE.replace("C = 12", "C = 12\nepsilon = 0.3"))
            .contains("epsilon must be < r_min/2"));
        assert!(
            err(&BASE.replace("horizon = 5000", "horizon = 5000\nfoo = 1"))
                .contains("experiment.foo")
        );
        assert!(err(&format!("{BASE}\n[policy]\nL0 = 3\n")).contains("repeated"));
        assert!(err(&BASE.replace("[policy]", "[polcy]")).contains("unknown section"));
        assert!(
            err(&BASE.replace("count = 4\n\n[policy]", "count = 5\n\n[policy]"))
                .contains("unsupported")
        );
        assert!(err(&BASE.replace("horizon = 5000", "horizon = 10")).contains("experiment.horizon"));
    }

    #[test]
    fn infeasible_region_diagnostic() {
        let text = BASE.replace("off_mean = 1.43", "off_mean = 4.3");
        assert!(err(&text).contains("throughput region"));
    }

    #[test]
    fn detector_section() {
        let text = format!("{BASE}\n[detector]\nlengths = 12, 24,36\ntrials = 2000\nchannel = 3\n");
        let f = parse_str(&text).unwrap();
        assert_eq!(f.detector.lengths, vec![12, 24, 36]);
        assert_eq!(f.detector.trials, 2000);
        assert_eq!(f.detector.channel, 3);
        let bad = format!("{BASE}\n[detector]\nchannel = 4\n");
        assert!(err(&bad).contains("detector.channel"));
    }
}
