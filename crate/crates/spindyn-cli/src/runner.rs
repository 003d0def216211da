//! The `rates` and `run` pipelines: per block and direction, build the qubit
//! frame, evaluate the vibration-bath rates, assemble the effective rate
//! set, and (for `run`) sweep the gate sequence and powder-average the
//! magnetization curves.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context, Result};
use spindyn::constants::GHZ_TO_RAD_PER_US;
use spindyn::lindblad::{rabi_coupling, DensityState};
use spindyn::geometry::{b1_vector, DriveConfig};
use spindyn::phonon::{
    effective_rates, mode_contributions, one_phonon_rates, two_phonon_rates, AbsorptionAdd,
    OnePhononRates, RateSet, TwoPhononRates,
};
use spindyn::sequence::{
    powder_average, run_sequence, sweep_tau, sweep_tau_epsilon_averaged, variable_step_count,
    GateStep, SequenceContext, SweepConfig, SweepPoint,
};
use spindyn::spin::QubitFrame;
use spindyn::VibrationMode;

use crate::config::RunConfig;
use crate::files::{DirectionData, FieldBlock};

/// Everything derived for one static-field direction.
pub struct DirectionSetup {
    pub frame: QubitFrame<f64>,
    pub rates: RateSet<f64>,
    pub theta: f64,
    pub phi: f64,
    pub one_ph: Option<OnePhononRates<f64>>,
    pub two_ph: Option<TwoPhononRates<f64>>,
    /// Detuning δ = ω₊₋ − ω_MW, rad/μs.
    pub delta: f64,
    /// Complex Rabi coupling Ω_R at ε = 0, rad/μs.
    pub omega_r: num_complex::Complex<f64>,
}

impl DirectionSetup {
    /// Generalized Rabi frequency Ω_g = √(|Ω_R|² + δ²), rad/μs.
    pub fn omega_g(&self) -> f64 {
        (self.omega_r.norm_sqr() + self.delta * self.delta).sqrt()
    }
}

/// Builds the frame, rate set and drive coupling for one direction.
pub fn direction_setup(
    cfg: &RunConfig,
    modes: &[VibrationMode],
    d: &DirectionData,
) -> Result<DirectionSetup> {
    let frame = d.frame(cfg.ig, cfg.ie)?;
    let (one_ph, two_ph, gab_vib, gem_vib) = if cfg.nm > 0 {
        let coupling = d
            .coupling
            .as_ref()
            .ok_or_else(|| anyhow!("nm > 0 but the direction has no coupling data"))?;
        let one = one_phonon_rates(&frame, modes, coupling, cfg.temp, cfg.sfgw)?;
        let two = two_phonon_rates(&frame, modes, coupling, cfg.temp, cfg.sfgw)?;
        let gab = one.gamma_ab + two.gamma_ab();
        let gem = one.gamma_em + two.gamma_em();
        (Some(one), Some(two), gab, gem)
    } else {
        (None, None, 0.0, 0.0)
    };
    let gab_add = if cfg.detailed_balance() {
        AbsorptionAdd::DetailedBalance
    } else {
        AbsorptionAdd::Explicit(cfg.gabe)
    };
    let rates = effective_rates(
        gab_vib,
        gem_vib,
        d.gamma_mag,
        gab_add,
        cfg.geme,
        cfg.tmage,
        frame.gap_cm1(),
        cfg.temp,
    )?;
    let theta = d.theta_deg.to_radians();
    let phi = d.phi_deg.to_radians();
    let drive = drive_config(cfg, 0.0);
    let b1 = b1_vector(&drive, theta, phi);
    let omega_r = rabi_coupling(&frame, cfg.gfi, b1);
    let delta = frame.omega_pm() - cfg.firr * GHZ_TO_RAD_PER_US;
    Ok(DirectionSetup {
        frame,
        rates,
        theta,
        phi,
        one_ph,
        two_ph,
        delta,
        omega_r,
    })
}

/// Drive configuration from the run parameters at a given ε (rad).
pub fn drive_config(cfg: &RunConfig, epsilon: f64) -> DriveConfig<f64> {
    DriveConfig {
        b1_mag: cfg.bcm,
        f_mw: cfg.firr,
        alpha: cfg.alpha,
        epsilon,
    }
}

const TWO_PI: f64 = std::f64::consts::TAU;

fn describe_direction(out: &mut String, cfg: &RunConfig, s: &DirectionSetup, indent: &str) {
    let (ga, ge, gm) = s.rates.effective();
    let _ = writeln!(
        out,
        "{indent}gap = {:.8} cm^-1 ({:.6} GHz)",
        s.frame.gap_cm1(),
        s.frame.gap_ghz()
    );
    let _ = writeln!(
        out,
        "{indent}Gamma_ab = {:.8e} 1/us (vibration {:.8e} + additive {:.8e})",
        ga, s.rates.gamma_ab, s.rates.gamma_ab_add
    );
    let _ = writeln!(
        out,
        "{indent}Gamma_em = {:.8e} 1/us (vibration {:.8e} + additive {:.8e})",
        ge, s.rates.gamma_em, s.rates.gamma_em_add
    );
    let _ = writeln!(
        out,
        "{indent}Gamma_mag = {:.8e} 1/us (direction {:.8e} + additive {:.8e})",
        gm, s.rates.gamma_mag, s.rates.gamma_mag_add
    );
    let _ = writeln!(
        out,
        "{indent}delta/2pi = {:.6e} MHz",
        s.delta / TWO_PI
    );
    let _ = writeln!(
        out,
        "{indent}|Omega_R|/2pi = {:.6e} MHz, Omega_g/2pi = {:.6e} MHz",
        s.omega_r.norm() / TWO_PI,
        s.omega_g() / TWO_PI
    );
    if let Some(one) = &s.one_ph {
        let _ = writeln!(
            out,
            "{indent}one-phonon: Gamma_ab = {:.8e}, Gamma_em = {:.8e} 1/us",
            one.gamma_ab, one.gamma_em
        );
        let per_mode: Vec<(usize, f64)> = one
            .per_mode
            .iter()
            .enumerate()
            .map(|(i, (ab, em))| (i + 1, ab + em))
            .collect();
        for c in mode_contributions(&per_mode, cfg.top) {
            let _ = writeln!(
                out,
                "{indent}  mode {}: {:.8e} 1/us ({:.2} %)",
                c.label, c.rate, c.percent
            );
        }
    }
    if let Some(two) = &s.two_ph {
        let _ = writeln!(
            out,
            "{indent}two-phonon: Gamma_ab = {:.8e}, Gamma_em = {:.8e} 1/us ({} near-resonant terms dropped)",
            two.gamma_ab(),
            two.gamma_em(),
            two.skipped_terms
        );
        let per_pair: Vec<((usize, usize), f64)> = two
            .per_pair
            .iter()
            .map(|(pair, (ab, em))| (*pair, ab + em))
            .collect();
        for c in mode_contributions(&per_pair, cfg.ttp) {
            let _ = writeln!(
                out,
                "{indent}  pair ({}, {}): {:.8e} 1/us ({:.2} %)",
                c.label.0, c.label.1, c.rate, c.percent
            );
        }
    }
}

/// The `rates` report: rates, detuning and Rabi coupling per block and
/// direction, with per-mode / per-pair contributions above the configured
/// thresholds.
pub fn rates_report(
    cfg: &RunConfig,
    blocks: &[FieldBlock],
    modes: &[VibrationMode],
) -> Result<String> {
    let mut out = String::new();
    for (bi, block) in blocks.iter().enumerate() {
        let _ = writeln!(out, "block {}:", bi + 1);
        for (di, d) in block.directions.iter().enumerate() {
            let s = direction_setup(cfg, modes, d)
                .with_context(|| format!("block {}, direction {}", bi + 1, di + 1))?;
            let _ = writeln!(
                out,
                "  direction {} (phi = {} deg, theta = {} deg, weight = {}):",
                di + 1,
                d.phi_deg,
                d.theta_deg,
                d.weight
            );
            describe_direction(&mut out, cfg, &s, "    ");
        }
    }
    Ok(out)
}

/// Output of a full `run`: the log text and one (Mz, |Mxy|) curve pair per
/// field block, powder-averaged over directions.
pub struct RunOutput {
    pub log: String,
    pub block_curves: Vec<Vec<SweepPoint<f64>>>,
}

/// Runs the gate sequence for every block and direction and powder-averages
/// the magnetization curves with the direction weights. `trace` appends the
/// per-step states of the first sweep point to the log.
pub fn run_all(
    cfg: &RunConfig,
    blocks: &[FieldBlock],
    modes: &[VibrationMode],
    steps: &[GateStep<f64>],
    trace: bool,
) -> Result<RunOutput> {
    let rho0 = DensityState::new(cfg.ro11, cfg.ro22, cfg.ro12r, cfg.ro12i)
        .map_err(|e| anyhow!("initial state: {e}"))?;
    let m = variable_step_count(steps);
    let sweep = match SweepConfig::new(cfg.esta, cfg.eend, cfg.npe) {
        Ok(s) => s,
        // With no variable step the sweep collapses to one run and the grid
        // parameters are irrelevant; any placeholder grid works.
        Err(_) if m == 0 => SweepConfig::new(0.0, 1.0, 2).unwrap(),
        Err(e) => return Err(anyhow!("sweep grid: {e}")),
    };
    let mut log = String::new();
    let _ = writeln!(log, "# run log");
    let _ = writeln!(
        log,
        "sequence: {} steps, {} variable; sweep {} points over [{}, {}) us; nang = {}",
        steps.len(),
        m,
        cfg.npe,
        cfg.esta,
        cfg.eend,
        cfg.nang
    );
    let mut block_curves = Vec::with_capacity(blocks.len());
    for (bi, block) in blocks.iter().enumerate() {
        let _ = writeln!(log, "block {}:", bi + 1);
        let mut weighted = Vec::with_capacity(block.directions.len());
        for (di, d) in block.directions.iter().enumerate() {
            let s = direction_setup(cfg, modes, d)
                .with_context(|| format!("block {}, direction {}", bi + 1, di + 1))?;
            let _ = writeln!(
                log,
                "  direction {} (phi = {} deg, theta = {} deg, weight = {}):",
                di + 1,
                d.phi_deg,
                d.theta_deg,
                d.weight
            );
            describe_direction(&mut log, cfg, &s, "    ");
            let drive = drive_config(cfg, 0.0);
            let ctx = SequenceContext {
                frame: &s.frame,
                rates: &s.rates,
                drive: &drive,
                g_i: cfg.gfi,
                theta: s.theta,
                phi: s.phi,
            };
            let curve = if cfg.nang > 1 {
                sweep_tau_epsilon_averaged(&ctx, steps, &rho0, &sweep, cfg.nang)?
            } else {
                sweep_tau(&ctx, steps, &rho0, &sweep, 0.0)?
            };
            if trace {
                let (_, states) = run_sequence(&ctx, steps, &rho0, sweep.tau(0), 0.0)?;
                let _ = writeln!(log, "    trace (tau = {} us):", sweep.tau(0));
                for (k, st) in states.iter().enumerate() {
                    let _ = writeln!(
                        log,
                        "      step {}: rho11 = {:.8e}, rho22 = {:.8e}, rho12 = {:.8e} {:+.8e}i",
                        k + 1,
                        st.rho11,
                        st.rho22,
                        st.rho12r,
                        st.rho12i
                    );
                }
            }
            weighted.push((d.weight, curve));
        }
        let avg = powder_average(&weighted)?;
        block_curves.push(avg);
    }
    Ok(RunOutput { log, block_curves })
}

/// Serializes a magnetization curve as `time_us,magnetization` CSV with nine
/// significant digits (locale-independent `.` decimals).
pub fn curve_csv(points: &[SweepPoint<f64>], select_mz: bool) -> String {
    let mut out = String::from("time_us,magnetization\n");
    for p in points {
        let v = if select_mz { p.mz } else { p.mxy };
        let _ = writeln!(out, "{:.8e},{:.8e}", p.time, v);
    }
    out
}

/// File name for the per-block curve files: plain for block 1, `_b<k>`
/// suffix for additional field blocks.
pub fn block_file_name(stem: &str, block_idx: usize) -> String {
    if block_idx == 0 {
        format!("{stem}.csv")
    } else {
        format!("{stem}_b{}.csv", block_idx + 1)
    }
}

/// Writes run outputs (run.log plus mz/mxy CSV per block) into `dir`.
pub fn write_run_output(dir: &Path, out: &RunOutput) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    std::fs::write(dir.join("run.log"), &out.log).context("writing run.log")?;
    for (bi, curve) in out.block_curves.iter().enumerate() {
        std::fs::write(dir.join(block_file_name("mz", bi)), curve_csv(curve, true))?;
        std::fs::write(dir.join(block_file_name("mxy", bi)), curve_csv(curve, false))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::files::parse_ddata;
    use approx::assert_relative_eq;

    fn toy_cfg() -> RunConfig {
        RunConfig::parse(
            "id = 2\nig = 1\nie = 2\nnm = 0\nic = 1\nnd = 1\ntemp = 5\nsfgw = 1\n\
             geme = 0\ngabe = 0\ntmage = 1e-10\ngfi = 2\nbcm = 1.5\nfirr = 8.99377\nalp = 0\n\
             nang = 1\nesta = 0\neend = 0.5\nnpe = 5\nro11 = 0\nro22 = 1\nro12r = 0\nro12i = 0\nnsa = 1\n",
        )
        .unwrap()
    }

    fn toy_blocks(cfg: &RunConfig) -> Vec<FieldBlock> {
        parse_ddata("0.0 0.0 1.0 0.0\n0.0 0.3\n0.5 0.0 0.0\n0.0 0.5 0.0\n", cfg).unwrap()
    }

    #[test]
    fn toy_direction_setup_matches_pinned_conventions() {
        let cfg = toy_cfg();
        let blocks = toy_blocks(&cfg);
        let s = direction_setup(&cfg, &[], &blocks[0].directions[0]).unwrap();
        // |Omega_R| = 2pi*13.996245*2*1.5*0.5 rad/us -> 20.994368 MHz;
        // delta/2pi = 3.74 kHz.
        assert_relative_eq!(s.omega_r.norm() / TWO_PI, 20.994368, max_relative = 1e-6);
        assert_relative_eq!(s.delta / TWO_PI * 1e3, 3.74, max_relative = 2e-3);
        assert_relative_eq!(s.omega_g() / TWO_PI, 20.99437, max_relative = 1e-6);
    }

    #[test]
    fn run_produces_expected_grid() {
        let cfg = toy_cfg();
        let blocks = toy_blocks(&cfg);
        let steps = [GateStep::new(
            spindyn::sequence::StepCode::VariableFree,
            0.0,
            0.0,
        )
        .unwrap()];
        let out = run_all(&cfg, &blocks, &[], &steps, true).unwrap();
        assert_eq!(out.block_curves.len(), 1);
        let curve = &out.block_curves[0];
        assert_eq!(curve.len(), 5);
        // Endpoint excluded: last abscissa is esta + 4/5*(eend-esta).
        assert_relative_eq!(curve[4].time, 0.4, max_relative = 1e-12);
        assert!(out.log.contains("trace"));
        let csv = curve_csv(curve, true);
        assert!(csv.starts_with("time_us,magnetization\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn block_file_names() {
        assert_eq!(block_file_name("mz", 0), "mz.csv");
        assert_eq!(block_file_name("mxy", 2), "mxy_b3.csv");
    }
}
