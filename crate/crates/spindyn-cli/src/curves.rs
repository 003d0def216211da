//! Curve utilities shared by the `fit`, `fidelity` and `average`
//! subcommands: two-column curve files (optional `time_us,...` header,
//! comma- or whitespace-separated), four-number density-state files, and
//! weighted curve averaging.

use anyhow::{anyhow, bail, Context, Result};
use spindyn::analysis::{fit_biexp, fit_monoexp, FitResult, Stretch};
use spindyn::lindblad::DensityState;
use spindyn::sequence::{average_curves, SweepPoint};

/// Reads a two-column (t, y) curve. Comment lines (`#`) and a single header
/// line of non-numeric tokens are skipped; columns split on commas and/or
/// whitespace.
pub fn parse_curve(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut t = Vec::new();
    let mut y = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if t.is_empty() && y.is_empty() && toks.iter().any(|s| s.parse::<f64>().is_err()) {
            continue; // header line
        }
        if toks.len() != 2 {
            bail!("line {}: expected 2 columns, found {}", idx + 1, toks.len());
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .with_context(|| format!("line {}: bad number {s:?}", idx + 1))
        };
        t.push(parse(toks[0])?);
        y.push(parse(toks[1])?);
    }
    if t.is_empty() {
        bail!("curve file contains no data rows");
    }
    Ok((t, y))
}

/// Reads a density state stored as the four numbers ρ̄₁₁ ρ̄₂₂ ρ̄₁₂ʳ ρ̄₁₂ⁱ
/// (any mix of whitespace/commas/newlines; `#` comments allowed).
pub fn parse_state(text: &str) -> Result<DensityState<f64>> {
    let values: Vec<f64> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| {
            l.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .map(|s| {
            s.parse::<f64>()
                .with_context(|| format!("bad number {s:?} in state file"))
        })
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != 4 {
        bail!(
            "state file must hold exactly 4 numbers (rho11 rho22 rho12r rho12i), found {}",
            values.len()
        );
    }
    DensityState::new(values[0], values[1], values[2], values[3])
        .map_err(|e| anyhow!("invalid state: {e}"))
}

/// The fit models exposed on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FitModel {
    /// y0 + a·exp(−t/T).
    Monoexp,
    /// y0 + a·exp(−(t/T)^x), stretch exponent free.
    Stretched,
    /// y0 + a_f·exp(−t/T_fast) + a_s·exp(−t/T_slow).
    Biexp,
}

/// Runs the selected fit and formats a report (one `name = value` line per
/// parameter plus residual/convergence diagnostics).
pub fn fit_report(model: FitModel, t: &[f64], y: &[f64]) -> Result<(FitResult<f64>, String)> {
    let (fit, names): (FitResult<f64>, &[&str]) = match model {
        FitModel::Monoexp => (fit_monoexp(t, y, Stretch::Fixed)?, &["y0", "a", "T"]),
        FitModel::Stretched => (fit_monoexp(t, y, Stretch::Free)?, &["y0", "a", "T", "x"]),
        FitModel::Biexp => (
            fit_biexp(t, y, false)?,
            &["y0", "a_fast", "T_fast", "a_slow", "T_slow"],
        ),
    };
    let mut out = String::new();
    for (name, value) in names.iter().zip(&fit.params) {
        out.push_str(&format!("{name} = {:.8e}\n", value));
    }
    out.push_str(&format!(
        "residual = {:.8e}\nconverged = {}\nidentifiable = {}\niterations = {}\n",
        fit.residual, fit.converged, fit.identifiable, fit.iterations
    ));
    Ok((fit, out))
}

/// Weighted point-wise average of curve files; all curves must share the
/// abscissa. When `check_weights` is set the weights must sum to 1 ± 1e-9.
pub fn average_files(
    weighted: &[(f64, Vec<f64>, Vec<f64>)],
    check_weights: bool,
) -> Result<String> {
    let curves: Vec<(f64, Vec<SweepPoint<f64>>)> = weighted
        .iter()
        .map(|(w, t, y)| {
            let pts = t
                .iter()
                .zip(y)
                .map(|(ti, yi)| SweepPoint {
                    time: *ti,
                    mz: *yi,
                    mxy: *yi,
                })
                .collect();
            (*w, pts)
        })
        .collect();
    let avg = average_curves(&curves, check_weights)?;
    let mut out = String::from("time_us,magnetization\n");
    for p in &avg {
        out.push_str(&format!("{:.8e},{:.8e}\n", p.time, p.mz));
    }
    Ok(out)
}
