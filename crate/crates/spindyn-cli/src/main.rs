//! `spindyn` — command-line driver for the spin-qubit gate-sequence
//! simulator.
//!
//! Subcommands:
//! * `rates` — relaxation rates, detuning and Rabi coupling per field block
//!   and direction.
//! * `run` — execute the gate sequence, sweep the variable duration, and
//!   write `run.log` plus `mz.csv`/`mxy.csv` magnetization curves.
//! * `fit` — extract relaxation times from a two-column curve file.
//! * `fidelity` — fidelity between two serialized density states.
//! * `average` — weighted average of curve files.
//!
//! Exit codes: 0 on success, 1 on configuration/data errors (including
//! command-line usage errors), 2 on numerical failures.

mod config;
mod curves;
mod files;
mod runner;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use curves::FitModel;
use files::FieldBlock;
use spindyn::sequence::GateStep;
use spindyn::VibrationMode;

#[derive(Parser)]
#[command(name = "spindyn", version, about = "Spin-qubit gate-sequence simulator")]
struct Cli {
    /// Run-configuration file (`key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Eigenenergies / transition elements / coupling data file.
    #[arg(long, global = true)]
    ddata: Option<PathBuf>,

    /// Vibration-mode file (nu, mass, sigma per row); required when nm > 0.
    #[arg(long, global = true)]
    mdata: Option<PathBuf>,

    /// Gate-sequence file (code, duration, epsilon per row).
    #[arg(long, global = true)]
    adata: Option<PathBuf>,

    /// Append per-step state traces to run.log.
    #[arg(long, global = true)]
    trace: bool,

    /// Worker threads (0 = automatic). Output is identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Random seed; accepted for interface stability (the simulator itself
    /// is deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate input files and their serialize-then-parse round trip.
    Check,
    /// Report relaxation rates, detuning and Rabi coupling per direction.
    Rates,
    /// Run the gate sequence and write magnetization curves.
    Run {
        /// Output directory for run.log and the CSV curves.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Fit a relaxation model to a two-column curve file.
    Fit {
        /// Decay model.
        #[arg(long, value_enum)]
        model: FitModel,
        /// Curve file (time_us, magnetization).
        file: PathBuf,
    },
    /// Fidelity between two density states stored as four numbers each.
    Fidelity {
        /// First state file.
        a: PathBuf,
        /// Second state file.
        b: PathBuf,
    },
    /// Weighted point-wise average of curve files.
    Average {
        /// Curve as WEIGHT:PATH; repeat per curve.
        #[arg(long = "curve", required = true)]
        curves: Vec<String>,
        /// Skip the weights-sum-to-1 check.
        #[arg(long)]
        no_check: bool,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure classified by exit code.
enum Failure {
    /// Exit 1: configuration, file-format or consistency errors.
    Data(anyhow::Error),
    /// Exit 2: numerical failures (propagation, fitting).
    Numeric(anyhow::Error),
}

fn data<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Data(e.into())
}

fn numeric<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Numeric(e.into())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(data)
}

fn required<'a>(opt: &'a Option<PathBuf>, name: &str) -> Result<&'a Path, Failure> {
    opt.as_deref()
        .ok_or_else(|| data(anyhow!("missing required flag --{name}")))
}

/// Loads config, ddata and (when needed) mdata.
fn load_inputs(cli: &Cli) -> Result<(RunConfig, Vec<FieldBlock>, Vec<VibrationMode>), Failure> {
    let cfg_path = required(&cli.config, "config")?;
    let cfg = RunConfig::parse(&read_file(cfg_path)?).map_err(data)?;
    let ddata_path = required(&cli.ddata, "ddata")?;
    let blocks = files::parse_ddata(&read_file(ddata_path)?, &cfg).map_err(data)?;
    let modes = match (&cli.mdata, cfg.nm) {
        (None, 0) => Vec::new(),
        (None, _) => return Err(data(anyhow!("nm > 0 requires --mdata"))),
        (Some(p), nm) => {
            let (modes, warnings) = files::parse_mdata(&read_file(p)?, nm).map_err(data)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            modes
        }
    };
    Ok((cfg, blocks, modes))
}

fn load_steps(cli: &Cli, cfg: &RunConfig) -> Result<Vec<GateStep<f64>>, Failure> {
    let path = required(&cli.adata, "adata")?;
    files::parse_adata(&read_file(path)?, cfg.nsa).map_err(data)
}

/// Parses every supplied input file, re-serializes it and checks that
/// parsing the result reproduces the original structures exactly.
fn check_inputs(cli: &Cli) -> Result<(), Failure> {
    let (cfg, blocks, modes) = load_inputs(cli)?;
    let again = RunConfig::parse(&cfg.serialize()).map_err(data)?;
    if again != cfg {
        return Err(data(anyhow!("config round trip changed the configuration")));
    }
    let again = files::parse_ddata(&files::serialize_ddata(&blocks), &cfg).map_err(data)?;
    if again != blocks {
        return Err(data(anyhow!("ddata round trip changed the data")));
    }
    let (again, _) = files::parse_mdata(&files::serialize_mdata(&modes), cfg.nm).map_err(data)?;
    let modes_eq = again.len() == modes.len()
        && again
            .iter()
            .zip(&modes)
            .all(|(a, b)| a.nu == b.nu && a.mass == b.mass && a.sigma == b.sigma);
    if !modes_eq {
        return Err(data(anyhow!("mdata round trip changed the modes")));
    }
    println!(
        "config ok ({} blocks x {} directions, {} modes)",
        cfg.n_fields, cfg.n_dirs, cfg.nm
    );
    if let Some(adata) = &cli.adata {
        let steps = files::parse_adata(&read_file(adata)?, cfg.nsa).map_err(data)?;
        let again = files::parse_adata(&files::serialize_adata(&steps), cfg.nsa).map_err(data)?;
        let steps_eq = again.len() == steps.len()
            && again.iter().zip(&steps).all(|(a, b)| {
                a.code == b.code && a.duration == b.duration && a.epsilon == b.epsilon
            });
        if !steps_eq {
            return Err(data(anyhow!("adata round trip changed the sequence")));
        }
        println!("sequence ok ({} steps)", steps.len());
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Check => check_inputs(cli),
        Cmd::Rates => {
            let (cfg, blocks, modes) = load_inputs(cli)?;
            let report = runner::rates_report(&cfg, &blocks, &modes).map_err(numeric)?;
            print!("{report}");
            Ok(())
        }
        Cmd::Run { out } => {
            let (cfg, blocks, modes) = load_inputs(cli)?;
            let steps = load_steps(cli, &cfg)?;
            let output =
                runner::run_all(&cfg, &blocks, &modes, &steps, cli.trace).map_err(numeric)?;
            runner::write_run_output(out, &output).map_err(data)?;
            Ok(())
        }
        Cmd::Fit { model, file } => {
            let (t, y) = curves::parse_curve(&read_file(file)?).map_err(data)?;
            let (fit, report) = curves::fit_report(*model, &t, &y).map_err(numeric)?;
            print!("{report}");
            if !fit.converged {
                return Err(numeric(anyhow!("fit did not converge")));
            }
            Ok(())
        }
        Cmd::Fidelity { a, b } => {
            let sa = curves::parse_state(&read_file(a)?).map_err(data)?;
            let sb = curves::parse_state(&read_file(b)?).map_err(data)?;
            let f = spindyn::analysis::fidelity(&sa, &sb).map_err(numeric)?;
            println!("fidelity = {f:.12}");
            Ok(())
        }
        Cmd::Average {
            curves: specs,
            no_check,
            out,
        } => {
            let mut weighted = Vec::with_capacity(specs.len());
            for spec in specs {
                let (w, path) = spec
                    .split_once(':')
                    .ok_or_else(|| data(anyhow!("curve spec {spec:?} is not WEIGHT:PATH")))?;
                let w: f64 = w
                    .parse()
                    .with_context(|| format!("bad weight in {spec:?}"))
                    .map_err(data)?;
                let (t, y) = curves::parse_curve(&read_file(Path::new(path))?).map_err(data)?;
                weighted.push((w, t, y));
            }
            let csv = curves::average_files(&weighted, !no_check).map_err(data)?;
            match out {
                Some(path) => std::fs::write(path, csv)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(data)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1, // usage errors (unknown flags etc.) are data errors
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.threads > 0 {
        // Ignore "already initialized": only possible in tests.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
