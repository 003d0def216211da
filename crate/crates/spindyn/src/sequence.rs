//! Gate-sequence interpreter: step codes, variable-duration sweeps,
//! magnetization observables and powder/ε averaging.
//!
//! A sequence is a list of [`GateStep`]s executed in order from a fixed
//! initial state. Free-evolution steps (codes 0/1) force |B1| = 0 and
//! ω_MW = 0, so the coherence precesses at the full gap frequency; rotation
//! steps (codes 2/3) resolve the drive field through the ε-rotated frame
//! attached to the static-field direction. Variable steps (codes 0/3) take
//! their duration from the sweep variable τ; the sweep abscissa is m·τ with
//! m the number of variable steps (fixed-step runtime is excluded).

use rayon::prelude::*;

use crate::error::SequenceError;
use crate::geometry::{b1_vector, DriveConfig};
use crate::lindblad::{
    free_evolution, propagate_with_diagnostics, system_matrix, DensityState,
};
use crate::phonon::RateSet;
use crate::scalar::Real;
use crate::spin::QubitFrame;

/// The four step kinds of a gate sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepCode {
    /// Code 0: free evolution of variable duration τ.
    VariableFree,
    /// Code 1: free evolution of fixed duration.
    FixedFree,
    /// Code 2: microwave rotation of fixed duration.
    FixedRotation,
    /// Code 3: microwave rotation of variable duration τ.
    VariableRotation,
}

impl StepCode {
    /// Parses the numeric code used in sequence files.
    pub fn from_code(code: u8) -> Result<Self, SequenceError> {
        match code {
            0 => Ok(Self::VariableFree),
            1 => Ok(Self::FixedFree),
            2 => Ok(Self::FixedRotation),
            3 => Ok(Self::VariableRotation),
            other => Err(SequenceError::Parameter(format!(
                "unknown gate code {other} (expected 0, 1, 2 or 3)"
            ))),
        }
    }

    /// True for codes 0/3, whose duration is the sweep variable.
    pub fn is_variable(self) -> bool {
        matches!(self, Self::VariableFree | Self::VariableRotation)
    }

    /// True for codes 2/3 (driven steps).
    pub fn is_rotation(self) -> bool {
        matches!(self, Self::FixedRotation | Self::VariableRotation)
    }
}

/// One step of a gate sequence.
#[derive(Debug, Clone, Copy)]
pub struct GateStep<R: Real> {
    /// Step kind.
    pub code: StepCode,
    /// Duration in μs; ignored for variable steps (codes 0/3).
    pub duration: R,
    /// Rotation-axis angle ε in rad; ignored for free steps (codes 0/1).
    pub epsilon: R,
}

impl<R: Real> GateStep<R> {
    /// Validating constructor (fixed steps need a non-negative duration).
    pub fn new(code: StepCode, duration: R, epsilon: R) -> Result<Self, SequenceError> {
        if !code.is_variable() && duration < R::zero() {
            return Err(SequenceError::Parameter(
                "fixed-step duration must be ≥ 0".into(),
            ));
        }
        Ok(Self {
            code,
            duration,
            epsilon,
        })
    }
}

/// Number of variable steps m (codes 0/3) in a sequence.
pub fn variable_step_count<R: Real>(steps: &[GateStep<R>]) -> usize {
    steps.iter().filter(|s| s.code.is_variable()).count()
}

/// Sweep of the variable duration τ.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig<R: Real> {
    /// First sampled τ (esta), μs.
    pub t_start: R,
    /// Sweep endpoint (eend), μs — *not* itself sampled: τ_j = esta +
    /// j·(eend−esta)/npe for j = 0..npe−1 (this differs from an inclusive
    /// linspace).
    pub t_end: R,
    /// Number of points npe (≥ 2).
    pub n_points: usize,
}

impl<R: Real> SweepConfig<R> {
    /// Validating constructor.
    pub fn new(t_start: R, t_end: R, n_points: usize) -> Result<Self, SequenceError> {
        if t_start < R::zero() || t_end <= t_start {
            return Err(SequenceError::Parameter(
                "sweep bounds must satisfy 0 ≤ esta < eend".into(),
            ));
        }
        if n_points < 2 {
            return Err(SequenceError::Parameter("npe must be ≥ 2".into()));
        }
        Ok(Self {
            t_start,
            t_end,
            n_points,
        })
    }

    /// The j-th sampled τ.
    pub fn tau(&self, j: usize) -> R {
        self.t_start
            + R::of(j as f64) * (self.t_end - self.t_start) / R::of(self.n_points as f64)
    }
}

/// Everything a sequence run needs besides the steps themselves.
#[derive(Debug, Clone, Copy)]
pub struct SequenceContext<'a, R: Real> {
    /// The qubit frame (gap and transition elements) for this direction.
    pub frame: &'a QubitFrame<R>,
    /// Effective relaxation rates for this direction.
    pub rates: &'a RateSet<R>,
    /// Drive amplitude/frequency/polarization; the per-step ε overrides
    /// `drive.epsilon`.
    pub drive: &'a DriveConfig<R>,
    /// Free-ion Landé factor for the drive coupling.
    pub g_i: R,
    /// Static-field zenithal angle, rad.
    pub theta: R,
    /// Static-field azimuthal angle, rad.
    pub phi: R,
}

/// Runs a sequence from `rho0`, with variable-step duration `tau` and a
/// global ε offset added to every rotation step (used for ε averaging).
/// Returns the final state and the state after every step.
pub fn run_sequence<R: Real>(
    ctx: &SequenceContext<'_, R>,
    steps: &[GateStep<R>],
    rho0: &DensityState<R>,
    tau: R,
    epsilon_offset: R,
) -> Result<(DensityState<R>, Vec<DensityState<R>>), SequenceError> {
    if steps.is_empty() {
        return Err(SequenceError::Parameter("empty gate sequence".into()));
    }
    if tau < R::zero() {
        return Err(SequenceError::Parameter("tau must be ≥ 0".into()));
    }
    let omega_pm = ctx.frame.omega_pm();
    let mut state = *rho0;
    let mut trace = Vec::with_capacity(steps.len());
    for step in steps {
        let dt = if step.code.is_variable() {
            tau
        } else {
            step.duration
        };
        state = if step.code.is_rotation() {
            let drive = DriveConfig {
                epsilon: step.epsilon + epsilon_offset,
                ..*ctx.drive
            };
            let b1 = b1_vector(&drive, ctx.theta, ctx.phi);
            let m = system_matrix(ctx.rates, ctx.frame, &drive, b1, ctx.g_i)?;
            propagate_with_diagnostics(&state, &m, dt)?.state
        } else {
            // Codes 0/1: the engine is fed B1 = 0, ω_MW = 0 (closed form).
            free_evolution(&state, ctx.rates, omega_pm, dt)?
        };
        trace.push(state);
    }
    Ok((state, trace))
}

/// Longitudinal magnetization Mz = ρ̄₂₂ − ρ̄₁₁ ∈ [−1, 1] (positive when the
/// lower qubit state is more populated).
pub fn mz<R: Real>(rho: &DensityState<R>) -> R {
    rho.rho22 - rho.rho11
}

/// In-plane magnetization magnitude |Mxy| = 2√(ρ̄₁₂ʳ² + ρ̄₁₂ⁱ²) ∈ [0, 1].
pub fn mxy_abs<R: Real>(rho: &DensityState<R>) -> R {
    R::of(2.0) * (rho.rho12r * rho.rho12r + rho.rho12i * rho.rho12i).sqrt()
}

/// One row of a sweep: abscissa m·τ and both magnetizations.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint<R: Real> {
    /// Abscissa m·τ_j, μs.
    pub time: R,
    /// Mz at the end of the run.
    pub mz: R,
    /// |Mxy| at the end of the run.
    pub mxy: R,
}

/// Sweeps the variable duration, re-initializing the state to `rho0` for
/// every point. With no variable steps the sweep collapses to a single run.
/// Runs are independent and executed in parallel; rows are in τ order.
pub fn sweep_tau<R: Real + Send + Sync>(
    ctx: &SequenceContext<'_, R>,
    steps: &[GateStep<R>],
    rho0: &DensityState<R>,
    sweep: &SweepConfig<R>,
    epsilon_offset: R,
) -> Result<Vec<SweepPoint<R>>, SequenceError> {
    let m = variable_step_count(steps);
    if m == 0 {
        let (last, _) = run_sequence(ctx, steps, rho0, R::zero(), epsilon_offset)?;
        return Ok(vec![SweepPoint {
            time: R::zero(),
            mz: mz(&last),
            mxy: mxy_abs(&last),
        }]);
    }
    let m_r = R::of(m as f64);
    (0..sweep.n_points)
        .into_par_iter()
        .map(|j| {
            let tau = sweep.tau(j);
            let (last, _) = run_sequence(ctx, steps, rho0, tau, epsilon_offset)?;
            Ok(SweepPoint {
                time: m_r * tau,
                mz: mz(&last),
                mxy: mxy_abs(&last),
            })
        })
        .collect()
}

/// Uniform average of curves over the ε grid ε_j = 2π(j−1)/L, j = 1..L:
/// runs `sweep_tau` once per ε and averages point-wise.
pub fn sweep_tau_epsilon_averaged<R: Real + Send + Sync>(
    ctx: &SequenceContext<'_, R>,
    steps: &[GateStep<R>],
    rho0: &DensityState<R>,
    sweep: &SweepConfig<R>,
    nang: usize,
) -> Result<Vec<SweepPoint<R>>, SequenceError> {
    if nang == 0 {
        return Err(SequenceError::Parameter("nang must be ≥ 1".into()));
    }
    let mut curves = Vec::with_capacity(nang);
    for j in 0..nang {
        let eps = R::two_pi() * R::of(j as f64) / R::of(nang as f64);
        curves.push((R::one() / R::of(nang as f64), sweep_tau(ctx, steps, rho0, sweep, eps)?));
    }
    average_curves(&curves, false)
}

/// Weighted point-wise average of sweep curves; when `check_weights` is set
/// the weights must sum to 1 within 1e-9 (Lebedev powder average).
pub fn average_curves<R: Real>(
    curves: &[(R, Vec<SweepPoint<R>>)],
    check_weights: bool,
) -> Result<Vec<SweepPoint<R>>, SequenceError> {
    let Some((_, first)) = curves.first() else {
        return Err(SequenceError::Parameter("no curves to average".into()));
    };
    let n = first.len();
    if check_weights {
        let sum = curves.iter().fold(R::zero(), |acc, (w, _)| acc + *w);
        let tol = R::of(1e-9);
        if (sum - R::one()).abs() > tol {
            return Err(SequenceError::WeightSum {
                sum: sum.as_f64(),
                tol: 1e-9,
            });
        }
    }
    let mut out: Vec<SweepPoint<R>> = first
        .iter()
        .map(|p| SweepPoint {
            time: p.time,
            mz: R::zero(),
            mxy: R::zero(),
        })
        .collect();
    for (w, curve) in curves {
        if curve.len() != n {
            return Err(SequenceError::Parameter(format!(
                "curve length mismatch: {} vs {n}",
                curve.len()
            )));
        }
        for (acc, p) in out.iter_mut().zip(curve) {
            if (p.time - acc.time).abs() > R::of(1e-9) {
                return Err(SequenceError::Parameter(
                    "curves sample different abscissae".into(),
                ));
            }
            acc.mz += *w * p.mz;
            acc.mxy += *w * p.mxy;
        }
    }
    Ok(out)
}

/// Powder average M_av = Σ_i p_i M_i of per-direction curves, enforcing
/// Σ p_i = 1 ± 1e-9.
pub fn powder_average<R: Real>(
    curves: &[(R, Vec<SweepPoint<R>>)],
) -> Result<Vec<SweepPoint<R>>, SequenceError> {
    average_curves(curves, true)
}
