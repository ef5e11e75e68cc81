//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, ConfigFile};
use crate::error::{Error, Result};
use crate::experiment::{self, BoundReport};
use crate::oracle;
use crate::report::{self, RunManifest};

#[derive(Debug, Parser)]
#[command(
    name = "asa-sim",
    version,
    about = "Distributed multiaccess of on-off channels: simulation and analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo regret trace against the centralized baseline.
    Simulate(RunArgs),
    /// False alarm and miss probabilities of the occupancy detector versus L.
    DetectorCurve(DetectorArgs),
    /// Throughput-region membership and the fixed channel assignment.
    RegionCheck(ConfigArgs),
    /// Per-period regret versus the period-error bound (synchronized entry).
    BoundCheck(RunArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = all cores.
    #[arg(long, env = "ASA_SIM_THREADS", default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Trials per period length.
    #[arg(long)]
    pub trials: Option<u64>,
}

/// Loads the config, applies flag overrides, then validates.
fn load_with_overrides(
    path: &Path,
    runs: Option<u64>,
    seed: Option<u64>,
    horizon: Option<u64>,
) -> Result<ConfigFile> {
    let mut file = config::parse_unvalidated(&config::read(path)?)?;
    let e = &mut file.experiment;
    if let Some(r) = runs {
        e.runs = r;
    }
    if let Some(s) = seed {
        e.master_seed = s;
    }
    if let Some(h) = horizon {
        e.horizon = h;
    }
    config::validate(file)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => report::write_output(path, contents),
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

fn echo_manifest(manifest: &RunManifest, threads: usize) {
    eprint!("{}", manifest.comment_lines());
    eprintln!(
        "# threads: {}",
        if threads == 0 {
            "auto".into()
        } else {
            threads.to_string()
        }
    );
}

pub fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate(args) => {
            let file = load_with_overrides(
                &args.config.config,
                args.runs,
                args.output.seed,
                args.horizon,
            )?;
            let cfg = &file.experiment;
            let manifest = RunManifest::new(
                &args.config.config,
                cfg.master_seed,
                "simulate",
                args.output.out.as_deref(),
            );
            echo_manifest(&manifest, args.output.threads);
            let trace = experiment::monte_carlo(cfg, args.output.threads)?;
            emit(
                args.output.out.as_deref(),
                &report::regret_csv(&manifest, cfg, &trace),
            )?;
            let (regret, se) = trace.final_regret();
            eprintln!(
                "final mean regret {regret:.3} (stderr {se:.3}) over {} runs",
                trace.runs
            );
            for (u, t) in trace.users.iter().enumerate() {
                eprintln!("user {u}: target {} achieved {:.4}", t.rate, t.achieved);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::BoundCheck(args) => {
            let file = load_with_overrides(
                &args.config.config,
                args.runs,
                args.output.seed,
                args.horizon,
            )?;
            let cfg = &file.experiment;
            let manifest = RunManifest::new(
                &args.config.config,
                cfg.master_seed,
                "bound-check",
                args.output.out.as_deref(),
            );
            echo_manifest(&manifest, args.output.threads);
            let report: BoundReport = experiment::bound_check(cfg, args.output.threads)?;
            emit(
                args.output.out.as_deref(),
                &report::bound_csv(&manifest, cfg, &report),
            )?;
            match report.first_violation() {
                None => {
                    eprintln!("bound holds at all {} periods", report.rows.len());
                    Ok(ExitCode::SUCCESS)
                }
                Some(n) => {
                    eprintln!("bound violated at period {n}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::DetectorCurve(args) => {
            let mut file = load_with_overrides(&args.config.config, None, args.output.seed, None)?;
            if let Some(t) = args.trials {
                file.detector.trials = t;
            }
            let cfg = &file.experiment;
            let det = &file.detector;
            let channel = cfg.channels[det.channel];
            let occupant = det.occupant_rate.or(cfg.effective_r_min()).ok_or_else(|| {
                Error::config("detector.occupant_rate", "required when there are no users")
            })?;
            let epsilon = cfg.effective_epsilon().ok_or_else(|| {
                Error::config("policy.epsilon", "required when there are no users")
            })?;
            let manifest = RunManifest::new(
                &args.config.config,
                cfg.master_seed,
                "detector-curve",
                args.output.out.as_deref(),
            );
            echo_manifest(&manifest, args.output.threads);
            let curve = run_in_pool(args.output.threads, || {
                experiment::detector_error_curve(
                    channel,
                    occupant,
                    epsilon,
                    &det.lengths,
                    det.trials,
                    cfg.master_seed,
                )
            })?;
            emit(
                args.output.out.as_deref(),
                &report::detector_csv(&manifest, &curve, channel.eta(), occupant, epsilon),
            )?;
            eprint!("{}", report::fit_summary(&curve, ""));
            Ok(ExitCode::SUCCESS)
        }
        Command::RegionCheck(args) => {
            let file = config::parse_unvalidated(&config::read(&args.config)?)?;
            let cfg = &file.experiment;
            let rates = cfg.rates();
            let eta = cfg.eta();
            let feasible = oracle::in_region(&rates, &eta)?;
            let mut out = format!("feasible: {feasible}\n");
            if feasible {
                let alloc = oracle::fixed_allocation(&rates, &eta)?;
                for (u, &c) in alloc.assignment.iter().enumerate() {
                    out.push_str(&format!(
                        "user {u} (rate {}) -> channel {c} (eta {:.6})\n",
                        rates[u], eta[c]
                    ));
                }
            }
            emit(None, &out)?;
            Ok(if feasible {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn run_in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool")
        .install(f)
}
