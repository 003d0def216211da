//! Fixed-format whitespace-separated data files:
//!
//! * `ddata` — per field block, per direction: direction header
//!   (φ°, θ°, weight, Γmag), eigenenergies, the qubit transition elements,
//!   and (when `nm > 0`) the spin–phonon coupling sections.
//! * `mdata` — one vibration mode per row: ν (cm⁻¹), μ (c.a.m.u.), σ (cm⁻¹).
//! * `adata` — one gate step per row: code, duration (μs), ε (degrees);
//!   inapplicable columns may hold dummy tokens.
//!
//! Complex numbers are stored as alternating real/imaginary columns, e.g.
//! the line `0.1 -0.2 0.0 0.3` holds the two complex values 0.1−0.2i and
//! 0.0+0.3i.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex;
use spindyn::phonon::{intermediate_windows, CouplingData};
use spindyn::sequence::{GateStep, StepCode};
use spindyn::spin::QubitFrame;

use crate::config::{fmt_f64, RunConfig};

type C64 = Complex<f64>;

/// One static-field direction: geometry, weight, per-direction spin-bath
/// rate, frame data and optional coupling data.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionData {
    pub phi_deg: f64,
    pub theta_deg: f64,
    pub weight: f64,
    pub gamma_mag: f64,
    pub energies: Vec<f64>,
    pub n: [C64; 3],
    pub coupling: Option<CouplingData<f64>>,
}

impl DirectionData {
    /// Builds the qubit frame for this direction.
    pub fn frame(&self, ig: usize, ie: usize) -> Result<QubitFrame<f64>> {
        QubitFrame::from_parts(ig, ie, self.energies.clone(), self.n)
            .map_err(|e| anyhow!("direction (phi={}, theta={}): {e}", self.phi_deg, self.theta_deg))
    }
}

/// One field block: `nd` directions whose weights sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldBlock {
    pub directions: Vec<DirectionData>,
}

/// A numeric line of the file, with its 1-based source line number.
struct NumLine {
    lineno: usize,
    values: Vec<f64>,
}

fn numeric_lines(text: &str) -> Result<Vec<NumLine>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let values = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .with_context(|| format!("line {}: bad number {tok:?}", idx + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        out.push(NumLine {
            lineno: idx + 1,
            values,
        });
    }
    Ok(out)
}

struct LineReader {
    lines: Vec<NumLine>,
    pos: usize,
}

impl LineReader {
    fn take(&mut self, expected: usize, what: &str) -> Result<&NumLine> {
        let Some(line) = self.lines.get(self.pos) else {
            bail!("unexpected end of file: expected {what} ({expected} values)");
        };
        if line.values.len() != expected {
            bail!(
                "line {}: expected {what} with {expected} values, found {}",
                line.lineno,
                line.values.len()
            );
        }
        self.pos += 1;
        Ok(line)
    }

    fn finished(&self) -> Option<usize> {
        self.lines.get(self.pos).map(|l| l.lineno)
    }
}

fn complex_row(values: &[f64]) -> Vec<C64> {
    values
        .chunks_exact(2)
        .map(|p| C64::new(p[0], p[1]))
        .collect()
}

/// Parses a ddata file against the declared counts in `cfg`. The number of
/// intermediate-state lines per real-process group is inferred from the
/// energy windows of each direction's own spectrum; any mismatch surfaces
/// as a line-numbered count error rather than a guess.
pub fn parse_ddata(text: &str, cfg: &RunConfig) -> Result<Vec<FieldBlock>> {
    let mut rd = LineReader {
        lines: numeric_lines(text)?,
        pos: 0,
    };
    let mut blocks = Vec::with_capacity(cfg.n_fields);
    for block_idx in 0..cfg.n_fields {
        let mut directions = Vec::with_capacity(cfg.n_dirs);
        let mut weight_sum = 0.0;
        for dir_idx in 0..cfg.n_dirs {
            let sub = format!("block {}, direction {}", block_idx + 1, dir_idx + 1);
            let head = rd.take(4, &format!("{sub}: direction header"))?;
            let (phi_deg, theta_deg, weight, gamma_mag) =
                (head.values[0], head.values[1], head.values[2], head.values[3]);
            if weight < 0.0 {
                bail!("line {}: negative direction weight {weight}", head.lineno);
            }
            if gamma_mag < 0.0 {
                bail!("line {}: negative spin-bath rate {gamma_mag}", head.lineno);
            }
            weight_sum += weight;
            let energies = rd.take(cfg.dim, &format!("{sub}: energies"))?.values.clone();
            let n_re = rd.take(3, &format!("{sub}: Re N"))?.values.clone();
            let n_im = rd.take(3, &format!("{sub}: Im N"))?.values.clone();
            let n = [
                C64::new(n_re[0], n_im[0]),
                C64::new(n_re[1], n_im[1]),
                C64::new(n_re[2], n_im[2]),
            ];
            let coupling = if cfg.nm > 0 {
                let frame = QubitFrame::from_parts(cfg.ig, cfg.ie, energies.clone(), n)
                    .map_err(|e| anyhow!("{sub}: {e}"))?;
                let (direct_states, stokes_states, spont_states) = intermediate_windows(&frame);
                let first_order =
                    complex_row(&rd.take(2 * cfg.nm, &format!("{sub}: one-phonon elements"))?.values);
                let mut virt = Vec::with_capacity(cfg.nm);
                let mut direct = Vec::with_capacity(cfg.nm);
                let mut stokes = Vec::with_capacity(cfg.nm);
                let mut spont = Vec::with_capacity(cfg.nm);
                for i in 0..cfg.nm {
                    let what = format!("{sub}: virtual pairs of mode {}", i + 1);
                    virt.push(complex_row(&rd.take(2 * (cfg.nm - i), &what)?.values));
                    for (name, states, dest) in [
                        ("Direct", &direct_states, &mut direct),
                        ("Stokes", &stokes_states, &mut stokes),
                        ("Spont", &spont_states, &mut spont),
                    ] {
                        let mut rows = Vec::with_capacity(states.len());
                        for &c in states.iter() {
                            let what = format!(
                                "{sub}: {name} elements of mode {} via state {c}",
                                i + 1
                            );
                            rows.push(complex_row(&rd.take(2 * cfg.nm, &what)?.values));
                        }
                        dest.push(rows);
                    }
                }
                let coupling = CouplingData {
                    first_order,
                    virt,
                    direct,
                    stokes,
                    spont,
                    direct_states,
                    stokes_states,
                    spont_states,
                };
                coupling
                    .validate(cfg.nm)
                    .map_err(|e| anyhow!("{sub}: {e}"))?;
                Some(coupling)
            } else {
                None
            };
            directions.push(DirectionData {
                phi_deg,
                theta_deg,
                weight,
                gamma_mag,
                energies,
                n,
                coupling,
            });
        }
        if (weight_sum - 1.0).abs() > 1e-9 {
            bail!(
                "block {}: direction weights sum to {weight_sum}, expected 1",
                block_idx + 1
            );
        }
        blocks.push(FieldBlock { directions });
    }
    if let Some(lineno) = rd.finished() {
        bail!("line {lineno}: trailing data after the declared {} blocks", cfg.n_fields);
    }
    Ok(blocks)
}

fn push_row(out: &mut String, values: &[f64]) {
    let row: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

fn push_complex_row(out: &mut String, values: &[C64]) {
    let flat: Vec<f64> = values.iter().flat_map(|z| [z.re, z.im]).collect();
    push_row(out, &flat);
}

/// Serializes blocks back into the ddata layout (round-trip identity with
/// [`parse_ddata`]).
pub fn serialize_ddata(blocks: &[FieldBlock]) -> String {
    let mut out = String::new();
    for block in blocks {
        for d in &block.directions {
            push_row(
                &mut out,
                &[d.phi_deg, d.theta_deg, d.weight, d.gamma_mag],
            );
            push_row(&mut out, &d.energies);
            push_row(&mut out, &[d.n[0].re, d.n[1].re, d.n[2].re]);
            push_row(&mut out, &[d.n[0].im, d.n[1].im, d.n[2].im]);
            if let Some(c) = &d.coupling {
                push_complex_row(&mut out, &c.first_order);
                for i in 0..c.virt.len() {
                    push_complex_row(&mut out, &c.virt[i]);
                    for group in [&c.direct, &c.stokes, &c.spont] {
                        for row in &group[i] {
                            push_complex_row(&mut out, row);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Parses mdata rows (ν, μ, σ); returns the modes plus any non-fatal
/// warnings (non-ascending frequency order is tolerated but reported).
pub fn parse_mdata(text: &str, nm: usize) -> Result<(Vec<spindyn::VibrationMode>, Vec<String>)> {
    let lines = numeric_lines(text)?;
    if lines.len() != nm {
        bail!("mdata has {} rows, expected nm = {nm}", lines.len());
    }
    let mut modes = Vec::with_capacity(nm);
    let mut warnings = Vec::new();
    for line in &lines {
        if line.values.len() != 3 {
            bail!(
                "line {}: mdata rows have 3 columns (nu, mass, sigma), found {}",
                line.lineno,
                line.values.len()
            );
        }
        let mode = spindyn::VibrationMode::new(line.values[0], line.values[1], line.values[2])
            .map_err(|e| anyhow!("line {}: {e}", line.lineno))?;
        modes.push(mode);
    }
    for w in modes.windows(2) {
        if w[1].nu < w[0].nu {
            warnings.push(format!(
                "mdata: mode frequencies not ascending ({} after {}); order preserved",
                w[1].nu, w[0].nu
            ));
            break;
        }
    }
    Ok((modes, warnings))
}

/// Serializes modes back into mdata rows.
pub fn serialize_mdata(modes: &[spindyn::VibrationMode]) -> String {
    let mut out = String::new();
    for m in modes {
        push_row(&mut out, &[m.nu, m.mass, m.sigma]);
    }
    out
}

/// Parses adata rows (code, duration μs, ε degrees) into gate steps.
/// Inapplicable columns (duration for variable steps, ε for free steps) may
/// hold arbitrary placeholder tokens.
pub fn parse_adata(text: &str, nsa: usize) -> Result<Vec<GateStep<f64>>> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        rows.push((idx + 1, line.split_whitespace().collect::<Vec<&str>>()));
    }
    if rows.len() != nsa {
        bail!("adata has {} rows, expected nsa = {nsa}", rows.len());
    }
    let mut steps = Vec::with_capacity(nsa);
    for (lineno, toks) in rows {
        if toks.len() != 3 {
            bail!("line {lineno}: adata rows have 3 columns (code, duration, epsilon)");
        }
        let code: u8 = toks[0]
            .parse()
            .with_context(|| format!("line {lineno}: bad step code {:?}", toks[0]))?;
        let code = StepCode::from_code(code).map_err(|e| anyhow!("line {lineno}: {e}"))?;
        let need_duration = !code.is_variable();
        let need_epsilon = code.is_rotation();
        let duration = if need_duration {
            toks[1]
                .parse()
                .with_context(|| format!("line {lineno}: bad duration {:?}", toks[1]))?
        } else {
            toks[1].parse().unwrap_or(0.0)
        };
        let eps_deg: f64 = if need_epsilon {
            toks[2]
                .parse()
                .with_context(|| format!("line {lineno}: bad epsilon {:?}", toks[2]))?
        } else {
            toks[2].parse().unwrap_or(0.0)
        };
        steps.push(
            GateStep::new(code, duration, eps_deg.to_radians())
                .map_err(|e| anyhow!("line {lineno}: {e}"))?,
        );
    }
    Ok(steps)
}

/// Serializes gate steps back into adata rows.
pub fn serialize_adata(steps: &[GateStep<f64>]) -> String {
    let mut out = String::new();
    for s in steps {
        out.push_str(&format!(
            "{} {} {}\n",
            s.code as u8,
            fmt_f64(s.duration),
            fmt_f64(s.epsilon.to_degrees())
        ));
    }
    out
}
