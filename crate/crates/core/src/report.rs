//! CSV emission. Every file starts with `#` comment lines recording the run
//! manifest and schema version, followed by one header row.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{BoundReport, DetectorCurve, ExperimentConfig, RegretTrace};

pub const VERSION: &str = concat!("asa-sim ", env!("CARGO_PKG_VERSION"));

pub const REGRET_SCHEMA: &str = "regret-trace/1";
pub const DETECTOR_SCHEMA: &str = "detector-curve/1";
pub const BOUND_SCHEMA: &str = "bound-check/1";

pub const REGRET_COLUMNS: &str =
    "slot,centralized_cum,asa_cum_mean,regret_mean,regret_stderr,good_frac";
pub const DETECTOR_COLUMNS: &str =
    "L,false_alarm,false_alarm_stderr,miss,miss_stderr,h0_mean,h1_mean";
pub const BOUND_COLUMNS: &str =
    "period,start_slot,length,p_err,p_err_stderr,regret_mean,regret_stderr,rhs,margin,gap_stderr,holds";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunManifest {
    pub config_path: PathBuf,
    pub master_seed: u64,
    pub subcommand: String,
    pub outputs: Vec<PathBuf>,
    pub version: String,
}

impl RunManifest {
    pub fn new(
        config_path: &Path,
        master_seed: u64,
        subcommand: &str,
        output: Option<&Path>,
    ) -> Self {
        Self {
            config_path: config_path.to_path_buf(),
            master_seed,
            subcommand: subcommand.to_string(),
            outputs: output.into_iter().map(Path::to_path_buf).collect(),
            version: VERSION.to_string(),
        }
    }

    pub fn comment_lines(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {}", self.version);
        let _ = writeln!(s, "# subcommand: {}", self.subcommand);
        let _ = writeln!(s, "# config: {}", self.config_path.display());
        let _ = writeln!(s, "# seed: {}", self.master_seed);
        for out in &self.outputs {
            let _ = writeln!(s, "# output: {}", out.display());
        }
        s
    }
}

fn num(x: f64) -> String {
    debug_assert!(x.is_finite());
    format!("{x:.6}")
}

fn experiment_lines(s: &mut String, cfg: &ExperimentConfig) {
    let _ = writeln!(s, "# channels: {}", cfg.channels.len());
    for (i, ch) in cfg.channels.iter().enumerate() {
        let _ = writeln!(
            s,
            "# channel {i}: kind={} on_mean={} off_mean={} eta={}",
            ch.on_dist().kind().name(),
            ch.on_dist().mean(),
            ch.off_dist().mean(),
            num(ch.eta()),
        );
    }
    for (u, user) in cfg.users.iter().enumerate() {
        let _ = writeln!(s, "# user {u}: rate={} entry={}", user.rate, user.entry);
    }
    let _ = writeln!(
        s,
        "# policy: L0={} C={} epsilon={}",
        cfg.l0,
        cfg.c,
        cfg.effective_epsilon()
            .map(num)
            .unwrap_or_else(|| "-".into()),
    );
    let _ = writeln!(
        s,
        "# experiment: horizon={} runs={} baseline={}",
        cfg.horizon,
        cfg.runs,
        cfg.baseline.name()
    );
}

pub fn regret_csv(manifest: &RunManifest, cfg: &ExperimentConfig, trace: &RegretTrace) -> String {
    let mut s = manifest.comment_lines();
    let _ = writeln!(s, "# schema: {REGRET_SCHEMA}");
    experiment_lines(&mut s, cfg);
    for (u, t) in trace.users.iter().enumerate() {
        let _ = writeln!(
            s,
            "# throughput user {u}: target={} achieved={} stderr={}",
            t.rate,
            num(t.achieved),
            num(t.stderr)
        );
    }
    s.push_str(REGRET_COLUMNS);
    s.push('\n');
    for j in 0..trace.horizon() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            j + 1,
            num(trace.centralized_cum[j]),
            num(trace.asa_cum_mean[j]),
            num(trace.regret_mean[j]),
            num(trace.regret_stderr[j]),
            num(trace.good_frac[j]),
        );
    }
    s
}

pub fn detector_csv(
    manifest: &RunManifest,
    curve: &DetectorCurve,
    eta: f64,
    occupant_rate: f64,
    epsilon: f64,
) -> String {
    let mut s = manifest.comment_lines();
    let _ = writeln!(s, "# schema: {DETECTOR_SCHEMA}");
    let _ = writeln!(
        s,
        "# eta={} occupant_rate={} epsilon={} trials={}",
        num(eta),
        occupant_rate,
        num(epsilon),
        curve.trials
    );
    s.push_str(&fit_summary(curve, "# "));
    s.push_str(DETECTOR_COLUMNS);
    s.push('\n');
    for p in &curve.points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.length,
            num(p.false_alarm),
            num(p.false_alarm_stderr),
            num(p.miss),
            num(p.miss_stderr),
            num(p.h0_mean),
            num(p.h1_mean),
        );
    }
    s
}

pub fn fit_summary(curve: &DetectorCurve, prefix: &str) -> String {
    let mut s = String::new();
    for (name, fit) in [
        ("false_alarm", curve.false_alarm_fit),
        ("miss", curve.miss_fit),
    ] {
        match fit {
            Some(f) => {
                let _ = writeln!(
                    s,
                    "{prefix}fit {name}: slope_per_slot={:.6e} intercept={} r_squared={} points={}",
                    f.slope,
                    num(f.intercept),
                    num(f.r_squared),
                    f.points
                );
            }
            None => {
                let _ = writeln!(s, "{prefix}fit {name}: insufficient nonzero points");
            }
        }
    }
    s
}

pub fn bound_csv(manifest: &RunManifest, cfg: &ExperimentConfig, report: &BoundReport) -> String {
    let mut s = manifest.comment_lines();
    let _ = writeln!(s, "# schema: {BOUND_SCHEMA}");
    experiment_lines(&mut s, cfg);
    match report.first_violation() {
        None => s.push_str("# bound holds at every period\n"),
        Some(n) => {
            let _ = writeln!(s, "# bound violated first at period {n}");
        }
    }
    s.push_str(BOUND_COLUMNS);
    s.push('\n');
    for row in &report.rows {
        let p = &row.period;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.index,
            p.start_slot,
            p.length,
            num(p.p_err),
            num(p.p_err_stderr),
            num(p.regret_mean),
            num(p.regret_stderr),
            num(p.rhs),
            num(row.margin),
            num(p.gap_stderr),
            row.holds as u8,
        );
    }
    s
}

pub fn write_output(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
