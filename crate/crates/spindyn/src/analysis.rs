//! State analysis: fidelity between 2×2 density matrices, Bloch-sphere
//! readout, and nonlinear least-squares extraction of relaxation times from
//! magnetization curves.
//!
//! The fits use damped Gauss–Newton (Levenberg–Marquardt style) steps with
//! analytic Jacobians, multi-started over four log-spaced decay-time
//! guesses derived from the curve's 1/e crossing. Convergence is declared
//! at relative parameter change < 1e-10 (or 200 iterations). The stretch
//! exponent, when free, is constrained to [0.1, 3].

use nalgebra::{DMatrix, DVector};

use crate::error::AnalysisError;
use crate::lindblad::DensityState;
use crate::scalar::Real;

/// Bounds for the free stretch exponent.
pub const STRETCH_MIN: f64 = 0.1;
/// Upper bound for the free stretch exponent.
pub const STRETCH_MAX: f64 = 3.0;

/// Fidelity F(ρ,σ) = Tr(ρσ) + 2√(det ρ · det σ) for qubit density matrices.
///
/// Symmetric in its arguments, equal to 1 iff ρ = σ is consistent with a
/// valid state, bounded in [0, 1]. Determinants that round off slightly
/// negative (≥ −1e-12) are clamped to 0.
///
/// # Errors
/// [`AnalysisError::Data`] when either input violates the density-state
/// invariants or has determinant below −1e-12.
pub fn fidelity<R: Real>(
    rho: &DensityState<R>,
    sigma: &DensityState<R>,
) -> Result<R, AnalysisError> {
    for (name, s) in [("rho", rho), ("sigma", sigma)] {
        s.validate()
            .map_err(|e| AnalysisError::Data(format!("{name}: {e}")))?;
    }
    let clamp_det = |name: &str, d: R| -> Result<R, AnalysisError> {
        if d < R::of(-1e-12) {
            return Err(AnalysisError::Data(format!(
                "{name} has negative determinant {}",
                d.as_f64()
            )));
        }
        Ok(d.max(R::zero()))
    };
    let dr = clamp_det("rho", rho.det())?;
    let ds = clamp_det("sigma", sigma.det())?;
    let tr = rho.rho11 * sigma.rho11
        + rho.rho22 * sigma.rho22
        + R::of(2.0) * (rho.rho12r * sigma.rho12r + rho.rho12i * sigma.rho12i);
    Ok(tr + R::of(2.0) * (dr * ds).sqrt())
}

/// Bloch coordinates (x, y, z) and purity of a state: x = 2ρ̄₁₂ʳ,
/// y = −2ρ̄₁₂ⁱ (sign fixed by the |1⟩ ≡ |u+⟩ convention), z = ρ̄₁₁ − ρ̄₂₂.
pub fn bloch_coordinates<R: Real>(rho: &DensityState<R>) -> (R, R, R, R) {
    (
        R::of(2.0) * rho.rho12r,
        R::of(-2.0) * rho.rho12i,
        rho.rho11 - rho.rho22,
        rho.purity(),
    )
}

/// Result of a nonlinear least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult<R: Real> {
    /// Fitted parameters, model-specific order (see the fit functions).
    pub params: Vec<R>,
    /// Euclidean norm of the final residual vector.
    pub residual: R,
    /// True when the iteration met the convergence criterion.
    pub converged: bool,
    /// Iterations used by the winning start.
    pub iterations: usize,
    /// False when the decay amplitude is ≈ 0, leaving T unidentifiable.
    pub identifiable: bool,
}

/// Whether the stretch exponent of the monoexponential model is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stretch {
    /// x frozen at 1 (plain exponential).
    Fixed,
    /// x free within [[`STRETCH_MIN`], [`STRETCH_MAX`]].
    Free,
}

fn validate_series<R: Real>(t: &[R], y: &[R], min_len: usize) -> Result<(), AnalysisError> {
    if t.len() != y.len() {
        return Err(AnalysisError::Data(format!(
            "abscissa/ordinate length mismatch ({} vs {})",
            t.len(),
            y.len()
        )));
    }
    if t.len() < min_len {
        return Err(AnalysisError::Data(format!(
            "need at least {min_len} points, got {}",
            t.len()
        )));
    }
    for w in t.windows(2) {
        if w[1] <= w[0] {
            return Err(AnalysisError::Data(
                "abscissa must be strictly increasing".into(),
            ));
        }
    }
    for &v in y {
        if !v.as_f64().is_finite() {
            return Err(AnalysisError::Data("non-finite ordinate".into()));
        }
    }
    Ok(())
}

/// Crude decay-time scale from the 1/e crossing of the normalized curve.
fn t_scale_guess<R: Real>(t: &[R], y: &[R]) -> R {
    let y0 = y[0];
    let yinf = *y.last().unwrap();
    let span = y0 - yinf;
    let target = yinf + span * R::of(1.0 / std::f64::consts::E);
    if span.abs() > R::zero() {
        for (ti, yi) in t.iter().zip(y) {
            let crossed = if span > R::zero() {
                *yi <= target
            } else {
                *yi >= target
            };
            if crossed && *ti > R::zero() {
                return *ti;
            }
        }
    }
    // Fall back to the midpoint of the time span.
    let last = *t.last().unwrap();
    if last > R::zero() {
        last * R::of(0.5)
    } else {
        R::one()
    }
}

/// Damped Gauss–Newton driver. `eval` fills residuals r_i = model(t_i) − y_i
/// and the Jacobian ∂r_i/∂p_j; `project` clamps parameters into bounds.
fn damped_gauss_newton<R: Real>(
    mut p: Vec<R>,
    n_res: usize,
    eval: &dyn Fn(&[R], &mut DVector<R>, &mut DMatrix<R>),
    project: &dyn Fn(&mut [R]),
    max_iter: usize,
) -> (Vec<R>, R, bool, usize) {
    let np = p.len();
    let mut r = DVector::zeros(n_res);
    let mut j = DMatrix::zeros(n_res, np);
    project(&mut p);
    eval(&p, &mut r, &mut j);
    let mut cost = r.norm_squared();
    let mut lambda = R::of(1e-3);
    let mut converged = false;
    let mut iters = 0usize;
    'outer: for it in 0..max_iter {
        iters = it + 1;
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * &r;
        let mut accepted = false;
        for _ in 0..25 {
            let mut a = jtj.clone();
            for d in 0..np {
                a[(d, d)] += lambda * (jtj[(d, d)].abs() + R::of(1e-12));
            }
            let Some(delta) = a.lu().solve(&jtr) else {
                lambda *= R::of(10.0);
                continue;
            };
            let mut trial: Vec<R> = p.iter().zip(delta.iter()).map(|(pi, di)| *pi - *di).collect();
            project(&mut trial);
            let mut rt = DVector::zeros(n_res);
            let mut jt = DMatrix::zeros(n_res, np);
            eval(&trial, &mut rt, &mut jt);
            let new_cost = rt.norm_squared();
            if new_cost.as_f64().is_finite() && new_cost < cost {
                // Relative parameter change for the convergence test.
                let mut rel = R::zero();
                for (old, new) in p.iter().zip(&trial) {
                    let scale = old.abs().max(new.abs()).max(R::of(1e-30));
                    rel = rel.max((*old - *new).abs() / scale);
                }
                p = trial;
                r = rt;
                j = jt;
                cost = new_cost;
                lambda = (lambda / R::of(3.0)).max(R::of(1e-14));
                accepted = true;
                if rel < R::of(1e-10) {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            lambda *= R::of(10.0);
        }
        if !accepted {
            // No improving step found at any damping: treat as converged to
            // a stationary point.
            converged = true;
            break;
        }
    }
    (p, cost.sqrt(), converged, iters)
}

/// Fits y ≈ y0 + a·exp(−(t/T)^x) (x ≡ 1 when `stretch` is fixed).
///
/// Parameter order in the result: `[y0, a, T]` or `[y0, a, T, x]`.
///
/// # Errors
/// [`AnalysisError::Data`] on fewer than 4 points or a non-increasing
/// abscissa. Non-convergence is reported via the `converged` flag, not an
/// error.
pub fn fit_monoexp<R: Real>(
    t: &[R],
    y: &[R],
    stretch: Stretch,
) -> Result<FitResult<R>, AnalysisError> {
    validate_series(t, y, 4)?;
    let n = t.len();
    let free_x = stretch == Stretch::Free;

    let eval = move |p: &[R], r: &mut DVector<R>, j: &mut DMatrix<R>| {
        let (y0, a, tc) = (p[0], p[1], p[2]);
        let x = if free_x { p[3] } else { R::one() };
        for i in 0..n {
            let u = t[i] / tc;
            let ux = if u > R::zero() { u.powf(x) } else { R::zero() };
            let e = (-ux).exp();
            r[i] = y0 + a * e - y[i];
            j[(i, 0)] = R::one();
            j[(i, 1)] = e;
            // ∂/∂T [−(t/T)^x] = x·u^x/T.
            j[(i, 2)] = a * e * x * ux / tc;
            if free_x {
                // ∂/∂x [−u^x] = −u^x ln u (→ 0 as u → 0).
                j[(i, 3)] = if u > R::zero() {
                    -a * e * ux * u.ln()
                } else {
                    R::zero()
                };
            }
        }
    };
    let project = move |p: &mut [R]| {
        p[2] = p[2].max(R::of(1e-12));
        if free_x {
            p[3] = p[3].clamp(R::of(STRETCH_MIN), R::of(STRETCH_MAX));
        }
    };

    let yinf = *y.last().unwrap();
    let a0 = y[0] - yinf;
    let tc0 = t_scale_guess(t, y);
    let mut best: Option<(Vec<R>, R, bool, usize)> = None;
    for factor in [0.3, 1.0, 3.0, 10.0] {
        let mut p0 = vec![yinf, a0, tc0 * R::of(factor)];
        if free_x {
            p0.push(R::one());
        }
        let run = damped_gauss_newton(p0, n, &eval, &project, 200);
        if best.as_ref().map(|b| run.1 < b.1).unwrap_or(true) {
            best = Some(run);
        }
    }
    let (params, residual, converged, iterations) = best.unwrap();
    let spread = data_spread(y);
    let identifiable = params[1].abs() > R::of(1e-10).max(spread * R::of(1e-8));
    Ok(FitResult {
        params,
        residual,
        converged,
        iterations,
        identifiable,
    })
}

fn data_spread<R: Real>(y: &[R]) -> R {
    let mut lo = y[0];
    let mut hi = y[0];
    for &v in y {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Fits y ≈ y0 + a_f·exp(−t/T_fast) + a_s·exp(−t/T_slow), with T_fast ≤
/// T_slow enforced by sorting afterwards; `freeze_y0` pins y0 = 0.
///
/// Parameter order in the result: `[y0, a_f, T_fast, a_s, T_slow]`.
pub fn fit_biexp<R: Real>(
    t: &[R],
    y: &[R],
    freeze_y0: bool,
) -> Result<FitResult<R>, AnalysisError> {
    validate_series(t, y, 6)?;
    let n = t.len();

    let eval = move |p: &[R], r: &mut DVector<R>, j: &mut DMatrix<R>| {
        let (y0, af, tf, as_, ts) = (p[0], p[1], p[2], p[3], p[4]);
        for i in 0..n {
            let ef = (-t[i] / tf).exp();
            let es = (-t[i] / ts).exp();
            r[i] = y0 + af * ef + as_ * es - y[i];
            j[(i, 0)] = if freeze_y0 { R::zero() } else { R::one() };
            j[(i, 1)] = ef;
            j[(i, 2)] = af * ef * t[i] / (tf * tf);
            j[(i, 3)] = es;
            j[(i, 4)] = as_ * es * t[i] / (ts * ts);
        }
    };
    let project = move |p: &mut [R]| {
        if freeze_y0 {
            p[0] = R::zero();
        }
        p[2] = p[2].max(R::of(1e-12));
        p[4] = p[4].max(R::of(1e-12));
    };

    let yinf = if freeze_y0 { R::zero() } else { *y.last().unwrap() };
    let amp = y[0] - yinf;
    let tc0 = t_scale_guess(t, y);
    let mut best: Option<(Vec<R>, R, bool, usize)> = None;
    for (ff, fs) in [(0.3, 3.0), (0.1, 1.0), (1.0, 10.0), (0.5, 20.0)] {
        let p0 = vec![
            yinf,
            amp * R::of(0.5),
            tc0 * R::of(ff),
            amp * R::of(0.5),
            tc0 * R::of(fs),
        ];
        let run = damped_gauss_newton(p0, n, &eval, &project, 200);
        if best.as_ref().map(|b| run.1 < b.1).unwrap_or(true) {
            best = Some(run);
        }
    }
    let (mut params, residual, converged, iterations) = best.unwrap();
    // Enforce T_fast ≤ T_slow by swapping the component pairs.
    if params[2] > params[4] {
        params.swap(1, 3);
        params.swap(2, 4);
    }
    let spread = data_spread(y);
    let threshold = R::of(1e-10).max(spread * R::of(1e-8));
    let identifiable = params[1].abs() > threshold
        && params[3].abs() > threshold
        && (params[4] - params[2]).abs() > params[4] * R::of(1e-6);
    Ok(FitResult {
        params,
        residual,
        converged,
        iterations,
        identifiable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn fidelity_anchors() {
        let p = DensityState::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let q = DensityState::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let mixed = DensityState::new(0.5, 0.5, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(fidelity(&p, &p).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&p, &q).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(fidelity(&mixed, &p).unwrap(), 0.5, epsilon = 1e-14);
        // Symmetry.
        let r = DensityState::new(0.7, 0.3, 0.2, -0.1).unwrap();
        assert_abs_diff_eq!(
            fidelity(&r, &mixed).unwrap(),
            fidelity(&mixed, &r).unwrap(),
            epsilon = 1e-14
        );
        // F(ρ,ρ) = Tr ρ² + 2 det ρ = 1 for any valid state.
        assert_abs_diff_eq!(fidelity(&r, &r).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bloch_readout() {
        let up = DensityState::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let (x, y, z, pur) = bloch_coordinates(&up);
        assert_eq!((x, y, z), (0.0, 0.0, 1.0));
        assert_abs_diff_eq!(pur, 1.0);
        let eq = DensityState::new(0.5, 0.5, 0.5, 0.0).unwrap();
        let (x, _, z, pur) = bloch_coordinates(&eq);
        assert_abs_diff_eq!(x, 1.0);
        assert_abs_diff_eq!(z, 0.0);
        assert_abs_diff_eq!(pur, 1.0, epsilon = 1e-14);
        let origin = DensityState::new(0.5, 0.5, 0.0, 0.0).unwrap();
        let (_, _, _, pur) = bloch_coordinates(&origin);
        assert_abs_diff_eq!(pur, 0.5);
    }

    #[test]
    fn monoexp_recovers_synthetic_truth() {
        let t: Vec<f64> = (0..200).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = t.iter().map(|&ti| 0.1 + 0.9 * (-ti / 2.0).exp()).collect();
        let fit = fit_monoexp(&t, &y, Stretch::Fixed).unwrap();
        assert!(fit.converged);
        assert!(fit.identifiable);
        assert_relative_eq!(fit.params[0], 0.1, max_relative = 1e-6);
        assert_relative_eq!(fit.params[1], 0.9, max_relative = 1e-6);
        assert_relative_eq!(fit.params[2], 2.0, max_relative = 1e-6);
        // Refit of the model's own prediction is a fixed point.
        let y2: Vec<f64> = t
            .iter()
            .map(|&ti| fit.params[0] + fit.params[1] * (-ti / fit.params[2]).exp())
            .collect();
        let fit2 = fit_monoexp(&t, &y2, Stretch::Fixed).unwrap();
        assert_relative_eq!(fit2.params[2], fit.params[2], max_relative = 1e-8);
    }

    #[test]
    fn stretched_monoexp_recovers_exponent() {
        let t: Vec<f64> = (1..300).map(|i| i as f64 * 0.02).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&ti| 0.05 + 0.8 * (-(ti / 1.5f64).powf(0.7)).exp())
            .collect();
        let fit = fit_monoexp(&t, &y, Stretch::Free).unwrap();
        assert_relative_eq!(fit.params[2], 1.5, max_relative = 1e-4);
        assert_relative_eq!(fit.params[3], 0.7, max_relative = 1e-4);
    }

    #[test]
    fn flat_data_flagged_unidentifiable() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y = vec![0.42; 20];
        let fit = fit_monoexp(&t, &y, Stretch::Fixed).unwrap();
        assert!(fit.params[1].abs() < 1e-9);
        assert!(!fit.identifiable);
    }

    #[test]
    fn biexp_recovers_two_components() {
        let t: Vec<f64> = (0..400).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&ti| 0.6 * (-ti / 1.0).exp() + 0.4 * (-ti / 10.0).exp())
            .collect();
        let fit = fit_biexp(&t, &y, true).unwrap();
        assert!(fit.identifiable);
        assert_relative_eq!(fit.params[2], 1.0, max_relative = 1e-2);
        assert_relative_eq!(fit.params[4], 10.0, max_relative = 1e-2);
        assert!(fit.params[2] <= fit.params[4]);
    }

    #[test]
    fn stretched_data_brackets_biexp_times() {
        // exp(−(t/T)^0.6) reinterpreted biexponentially: T_fast < T < T_slow.
        let big_t = 2.0;
        let t: Vec<f64> = (1..400).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&ti| (-(ti / big_t).powf(0.6)).exp())
            .collect();
        let fit = fit_biexp(&t, &y, true).unwrap();
        assert!(fit.params[2] < big_t, "T_fast = {}", fit.params[2]);
        assert!(fit.params[4] > big_t, "T_slow = {}", fit.params[4]);
    }

    #[test]
    fn series_validation_errors() {
        let t = vec![0.0, 1.0, 1.0, 2.0];
        let y = vec![1.0; 4];
        assert!(fit_monoexp(&t, &y, Stretch::Fixed).is_err());
        assert!(fit_monoexp(&[0.0, 1.0], &[1.0, 0.5], Stretch::Fixed).is_err());
        assert!(fit_biexp(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.2], true).is_err());
    }
}
