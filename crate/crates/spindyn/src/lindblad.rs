//! Rotating-frame master-equation engine for the driven, relaxing qubit.
//!
//! The rotating-frame density matrix in the ordered basis {|u+⟩, |u−⟩} is
//! packed as the real 4-vector (ρ̄₁₁, ρ̄₂₂, ρ̄₁₂ʳ, ρ̄₁₂ⁱ) and obeys
//! ρ̇ = M ρ with the real 4×4 coefficient matrix
//!
//! ```text
//!        ⎡  A11   B11   −Q   −P ⎤        A11 = −(Γe + Γm/2)
//!  M  =  ⎢ −A11  −B11    Q    P ⎥        B11 =   Γa + Γm/2
//!        ⎢  Q/2  −Q/2   −D    δ ⎥        D   =  (Γa + Γe)/2 + Γm
//!        ⎣  P/2  −P/2   −δ   −D ⎦        δ   =  ω₊₋ − ω_MW
//! ```
//!
//! where Ω_R = P + iQ is the complex Rabi coupling. The first two rows are
//! exact negatives, so the trace is conserved structurally and λ = 0 is
//! always an eigenvalue; the remaining spectrum is one negative real
//! eigenvalue plus a complex-conjugate pair with negative real part.
//!
//! [`propagate`] solves the system analytically: the characteristic quartic
//! is reduced (Faddeev–LeVerrier traces) to a cubic, solved in closed form
//! and Newton-polished; eigenvectors come from small complex SVDs; the
//! initial-value coefficients from one complex LU solve. If the eigenvector
//! matrix is ill-conditioned (or the solution fails its self-checks) the
//! engine falls back to the fixed-step RK4 integrator [`numeric_oracle`].
//!
//! Units: rates in μs⁻¹, angular frequencies in rad/μs, times in μs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::constants::{GHZ_TO_RAD_PER_US, RABI_RAD_US_PER_MT};
use crate::error::EngineError;
use crate::geometry::DriveConfig;
use crate::phonon::RateSet;
use crate::scalar::{cexp, cnorm, Real};
use crate::spin::QubitFrame;

/// Complex scalar shorthand.
pub type C<R> = Complex<R>;

/// Condition-number threshold on the eigenvector matrix beyond which
/// [`propagate`] falls back to the numeric integrator.
pub const CONDITION_FALLBACK: f64 = 1e12;

/// The 2×2 qubit density matrix as four real numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityState<R: Real> {
    /// Population of |u+⟩.
    pub rho11: R,
    /// Population of |u−⟩.
    pub rho22: R,
    /// Re ⟨u+|ρ̄|u−⟩.
    pub rho12r: R,
    /// Im ⟨u+|ρ̄|u−⟩.
    pub rho12i: R,
}

impl<R: Real> DensityState<R> {
    /// Validating constructor (trace 1 ± 1e-12, populations in [0,1],
    /// purity ≤ 1, small tolerances).
    pub fn new(rho11: R, rho22: R, rho12r: R, rho12i: R) -> Result<Self, EngineError> {
        let s = Self {
            rho11,
            rho22,
            rho12r,
            rho12i,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks the density-state invariants.
    pub fn validate(&self) -> Result<(), EngineError> {
        let one = R::one();
        let trace_tol = R::of(1e-12);
        let pos_tol = R::of(1e-10);
        if (self.rho11 + self.rho22 - one).abs() > trace_tol {
            return Err(EngineError::InvalidState(format!(
                "trace = {}, expected 1",
                (self.rho11 + self.rho22).as_f64()
            )));
        }
        for (name, v) in [("rho11", self.rho11), ("rho22", self.rho22)] {
            if v < -pos_tol || v > one + pos_tol {
                return Err(EngineError::InvalidState(format!(
                    "{name} = {} outside [0, 1]",
                    v.as_f64()
                )));
            }
        }
        if self.purity() > one + pos_tol {
            return Err(EngineError::InvalidState(format!(
                "purity = {} exceeds 1",
                self.purity().as_f64()
            )));
        }
        Ok(())
    }

    /// Purity Tr ρ² = ρ₁₁² + ρ₂₂² + 2(ρ₁₂ʳ² + ρ₁₂ⁱ²).
    pub fn purity(&self) -> R {
        self.rho11 * self.rho11
            + self.rho22 * self.rho22
            + R::of(2.0) * (self.rho12r * self.rho12r + self.rho12i * self.rho12i)
    }

    /// Determinant ρ₁₁ρ₂₂ − |ρ₁₂|².
    pub fn det(&self) -> R {
        self.rho11 * self.rho22 - self.rho12r * self.rho12r - self.rho12i * self.rho12i
    }

    /// Packs into the propagation vector (ρ̄₁₁, ρ̄₂₂, ρ̄₁₂ʳ, ρ̄₁₂ⁱ).
    pub fn to_vector(&self) -> [R; 4] {
        [self.rho11, self.rho22, self.rho12r, self.rho12i]
    }

    /// Unpacks from a propagation vector, symmetrically renormalizing any
    /// round-off trace defect (the exact dynamics conserves the trace).
    pub fn from_vector(v: [R; 4]) -> Self {
        let half_defect = (v[0] + v[1] - R::one()) / R::of(2.0);
        Self {
            rho11: v[0] - half_defect,
            rho22: v[1] - half_defect,
            rho12r: v[2],
            rho12i: v[3],
        }
    }
}

/// The assembled 4×4 coefficient matrix, kept in its six defining scalars.
#[derive(Debug, Clone, Copy)]
pub struct SystemMatrix<R: Real> {
    /// A11 = −(Γe + Γm/2) ≤ 0.
    pub a11: R,
    /// B11 = Γa + Γm/2 ≥ 0.
    pub b11: R,
    /// D = (Γa + Γe)/2 + Γm ≥ 0.
    pub d: R,
    /// Detuning δ = ω₊₋ − ω_MW, rad/μs.
    pub delta: R,
    /// Q = Im Ω_R, rad/μs.
    pub q: R,
    /// P = Re Ω_R, rad/μs.
    pub p: R,
}

impl<R: Real> SystemMatrix<R> {
    /// Assembles the free-evolution (block-diagonal) matrix: Q = P = 0 and
    /// the coherence rotates at the full gap frequency ω₊₋.
    pub fn free(rates: &RateSet<R>, omega_pm: R) -> Result<Self, EngineError> {
        Self::with_drive(rates, omega_pm, C::new(R::zero(), R::zero()))
    }

    /// Assembles the matrix from effective rates, detuning δ and complex
    /// Rabi coupling Ω_R = P + iQ (both rad/μs).
    pub fn with_drive(
        rates: &RateSet<R>,
        delta: R,
        omega_r: C<R>,
    ) -> Result<Self, EngineError> {
        if rates.all_zero() {
            return Err(EngineError::AllRatesZero);
        }
        let (ga, ge, gm) = rates.effective();
        if ga < R::zero() || ge < R::zero() || gm < R::zero() {
            return Err(EngineError::Parameter(
                "effective rates must be non-negative".into(),
            ));
        }
        let half = R::of(0.5);
        Ok(Self {
            a11: -(ge + gm * half),
            b11: ga + gm * half,
            d: (ga + ge) * half + gm,
            delta,
            q: omega_r.im,
            p: omega_r.re,
        })
    }

    /// Dense 4×4 representation (row-major).
    pub fn dense(&self) -> [[R; 4]; 4] {
        let half = R::of(0.5);
        [
            [self.a11, self.b11, -self.q, -self.p],
            [-self.a11, -self.b11, self.q, self.p],
            [self.q * half, -self.q * half, -self.d, self.delta],
            [self.p * half, -self.p * half, -self.delta, -self.d],
        ]
    }

    /// Max-row-sum norm of the dense matrix.
    pub fn norm_inf(&self) -> R {
        let m = self.dense();
        let mut best = R::zero();
        for row in &m {
            let s = row.iter().fold(R::zero(), |acc, &x| acc + x.abs());
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Applies the matrix to a state vector.
    pub fn apply(&self, v: &[R; 4]) -> [R; 4] {
        let m = self.dense();
        let mut out = [R::zero(); 4];
        for (r, row) in m.iter().enumerate() {
            let mut acc = R::zero();
            for (c, &mc) in row.iter().enumerate() {
                acc += mc * v[c];
            }
            out[r] = acc;
        }
        out
    }
}

/// Complex Rabi coupling Ω_R = (μ_B g_I/ħ) Σ_γ B1_γ N_γ in rad/μs, for a
/// lab-frame drive field in mT.
pub fn rabi_coupling<R: Real>(frame: &QubitFrame<R>, g_i: R, b1_mt: [R; 3]) -> C<R> {
    let scale = R::of(RABI_RAD_US_PER_MT) * g_i;
    let mut omega = C::new(R::zero(), R::zero());
    for gamma in 0..3 {
        omega += frame.n[gamma] * C::new(b1_mt[gamma] * scale, R::zero());
    }
    omega
}

/// Assembles the full driven system matrix: δ = ω₊₋ − ω_MW from the drive
/// frequency (GHz) and Ω_R from the resolved B1 vector (mT).
pub fn system_matrix<R: Real>(
    rates: &RateSet<R>,
    frame: &QubitFrame<R>,
    drive: &DriveConfig<R>,
    b1_mt: [R; 3],
    g_i: R,
) -> Result<SystemMatrix<R>, EngineError> {
    let omega_mw = drive.f_mw * R::of(GHZ_TO_RAD_PER_US);
    let delta = frame.omega_pm() - omega_mw;
    SystemMatrix::with_drive(rates, delta, rabi_coupling(frame, g_i, b1_mt))
}

/// Roots of the real cubic λ³ + aλ² + bλ + c, as complex numbers (either
/// three real roots or one real root plus a conjugate pair), each polished
/// by a few Newton steps.
fn cubic_roots<R: Real>(a: R, b: R, c: R) -> [C<R>; 3] {
    let third = R::one() / R::of(3.0);
    let shift = a * third;
    // Depressed cubic t³ + pt + q with λ = t − a/3.
    let p = b - a * a * third;
    let q = a * (R::of(2.0) * a * a / R::of(27.0)) - a * b * third + c;
    let half_q = q * R::of(0.5);
    let disc = half_q * half_q + p * p * p / R::of(27.0);
    let mut roots: [C<R>; 3];
    if disc > R::zero() {
        // One real root, one conjugate pair.
        let sd = disc.sqrt();
        let cbrt = |x: R| {
            if x >= R::zero() {
                x.powf(third)
            } else {
                -(-x).powf(third)
            }
        };
        let t1 = cbrt(-half_q + sd) + cbrt(-half_q - sd);
        // Quotient t² + t1·t + (t1² + p) has complex roots.
        let re = -t1 * R::of(0.5);
        let rad = t1 * t1 * R::of(0.75) + p; // −discriminant/4 of the quotient
        let im = rad.max(R::zero()).sqrt();
        roots = [
            C::new(t1, R::zero()),
            C::new(re, im),
            C::new(re, -im),
        ];
    } else {
        // Three real roots (trigonometric form); includes p → 0 edge.
        let mp3 = (-p * third).max(R::zero());
        let r = mp3.sqrt();
        if r == R::zero() {
            let t = if q >= R::zero() {
                -(q.powf(third))
            } else {
                (-q).powf(third)
            };
            roots = [C::new(t, R::zero()); 3];
        } else {
            let arg = (-half_q / (r * r * r)).clamp(-R::one(), R::one());
            let theta = arg.acos() * third;
            let two = R::of(2.0);
            let tau = R::two_pi() * third;
            roots = [
                C::new(two * r * theta.cos(), R::zero()),
                C::new(two * r * (theta - tau).cos(), R::zero()),
                C::new(two * r * (theta + tau).cos(), R::zero()),
            ];
        }
    }
    // Undo the shift and Newton-polish on the original cubic.
    let ca = C::new(a, R::zero());
    let cb = C::new(b, R::zero());
    let cc = C::new(c, R::zero());
    for root in roots.iter_mut() {
        let mut z = *root - C::new(shift, R::zero());
        for _ in 0..4 {
            let f = ((z + ca) * z + cb) * z + cc;
            let df = (z * C::new(R::of(3.0), R::zero()) + ca * C::new(R::of(2.0), R::zero()))
                * z
                + cb;
            if cnorm(df) > R::of(1e-300) {
                let step = f / df;
                if cnorm(step) < R::of(1e100) {
                    z -= step;
                }
            }
        }
        *root = z;
    }
    roots
}

/// Eigenvalues of the system matrix: always λ₁ = 0, plus the roots of the
/// cubic factor of the characteristic polynomial.
pub fn eigenvalues<R: Real>(m: &SystemMatrix<R>) -> [C<R>; 4] {
    // Faddeev–LeVerrier via power traces: p(λ) = λ⁴ − c1λ³ + c2λ² − c3λ + c4
    // with c4 = 0 structurally (rank-deficient first two rows).
    let d = m.dense();
    let mut m2 = [[R::zero(); 4]; 4];
    let mut m3 = [[R::zero(); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = R::zero();
            for k in 0..4 {
                acc += d[r][k] * d[k][c];
            }
            m2[r][c] = acc;
        }
    }
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = R::zero();
            for k in 0..4 {
                acc += m2[r][k] * d[k][c];
            }
            m3[r][c] = acc;
        }
    }
    let tr = |x: &[[R; 4]; 4]| x[0][0] + x[1][1] + x[2][2] + x[3][3];
    let s1 = tr(&d);
    let s2 = tr(&m2);
    let s3 = tr(&m3);
    let c1 = s1;
    let c2 = (c1 * s1 - s2) * R::of(0.5);
    let c3 = (c2 * s1 - c1 * s2 + s3) / R::of(3.0);
    // Cubic factor: λ³ − c1λ² + c2λ − c3.
    let [r1, r2, r3] = cubic_roots(-c1, c2, -c3);
    [C::new(R::zero(), R::zero()), r1, r2, r3]
}

/// Outcome of an analytic propagation, with diagnostics.
#[derive(Debug, Clone)]
pub struct PropagateOutcome<R: Real> {
    /// The propagated state.
    pub state: DensityState<R>,
    /// True when the analytic path was abandoned for the RK4 fallback.
    pub used_fallback: bool,
    /// The system-matrix eigenvalues (λ₁ = 0 first).
    pub eigenvalues: [C<R>; 4],
}

/// Analytic propagation over `dt` with diagnostics; see [`propagate`].
pub fn propagate_with_diagnostics<R: Real>(
    rho0: &DensityState<R>,
    m: &SystemMatrix<R>,
    dt: R,
) -> Result<PropagateOutcome<R>, EngineError> {
    if dt < R::zero() {
        return Err(EngineError::Parameter("dt must be ≥ 0".into()));
    }
    let lambdas = eigenvalues(m);
    if dt == R::zero() {
        return Ok(PropagateOutcome {
            state: *rho0,
            used_fallback: false,
            eigenvalues: lambdas,
        });
    }

    let analytic = analytic_step(rho0, m, dt, &lambdas);
    match analytic {
        Some(state) => Ok(PropagateOutcome {
            state,
            used_fallback: false,
            eigenvalues: lambdas,
        }),
        None => {
            let norm = m.norm_inf();
            let step = if norm > R::zero() {
                (R::of(0.01) / norm).min(dt)
            } else {
                dt
            };
            let state = numeric_oracle(rho0, m, dt, step)?;
            Ok(PropagateOutcome {
                state,
                used_fallback: true,
                eigenvalues: lambdas,
            })
        }
    }
}

/// Propagates ρ̇ = Mρ over `dt` using the closed-form eigendecomposition,
/// falling back to [`numeric_oracle`] when the eigenvector matrix is
/// ill-conditioned. The returned state satisfies the density invariants.
pub fn propagate<R: Real>(
    rho0: &DensityState<R>,
    m: &SystemMatrix<R>,
    dt: R,
) -> Result<DensityState<R>, EngineError> {
    Ok(propagate_with_diagnostics(rho0, m, dt)?.state)
}

/// Attempts the analytic eigen-solution; returns None when a fallback is
/// warranted (ill-conditioned eigenvectors or failed self-check).
fn analytic_step<R: Real>(
    rho0: &DensityState<R>,
    m: &SystemMatrix<R>,
    dt: R,
    lambdas: &[C<R>; 4],
) -> Option<DensityState<R>> {
    let d = m.dense();
    let zero = C::new(R::zero(), R::zero());

    // Eigenvector for each λ from the SVD null space of (M − λI).
    let mut v = DMatrix::from_element(4, 4, zero);
    for (col, lam) in lambdas.iter().enumerate() {
        let a = DMatrix::from_fn(4, 4, |r, c| {
            let mut e = C::new(d[r][c], R::zero());
            if r == c {
                e -= *lam;
            }
            e
        });
        let svd = a.svd(false, true);
        let vt = svd.v_t?;
        let mut kmin = 0usize;
        let mut smin = svd.singular_values[0];
        for (k, &s) in svd.singular_values.iter().enumerate() {
            if s < smin {
                smin = s;
                kmin = k;
            }
        }
        for r in 0..4 {
            v[(r, col)] = vt[(kmin, r)].conj();
        }
    }

    // Condition estimate of the eigenvector matrix.
    let vinv = v.clone().try_inverse()?;
    let norm_c = |m: &DMatrix<C<R>>| {
        let mut best = R::zero();
        for r in 0..m.nrows() {
            let mut s = R::zero();
            for c in 0..m.ncols() {
                s += cnorm(m[(r, c)]);
            }
            if s > best {
                best = s;
            }
        }
        best
    };
    if norm_c(&v) * norm_c(&vinv) > R::of(CONDITION_FALLBACK) {
        return None;
    }

    // Coefficients from the initial condition.
    let r0 = rho0.to_vector();
    let rhs = DVector::from_fn(4, |i, _| C::new(r0[i], R::zero()));
    let coef = &vinv * rhs;

    // ρ(dt) = Re Σ c_k e^{λ_k dt} v_k; imaginary residue must be round-off.
    let mut out = [R::zero(); 4];
    let mut imag_max = R::zero();
    for r in 0..4 {
        let mut acc = zero;
        for k in 0..4 {
            let e = (*lambdas)[k] * C::new(dt, R::zero());
            acc += coef[k] * cexp(e) * v[(r, k)];
        }
        out[r] = acc.re;
        if acc.im.abs() > imag_max {
            imag_max = acc.im.abs();
        }
    }
    if imag_max > R::of(1e-8) {
        return None;
    }
    // Self-check: the eigendecomposition must reproduce ρ0 at dt = 0.
    let mut recon_err = R::zero();
    for r in 0..4 {
        let mut acc = zero;
        for k in 0..4 {
            acc += coef[k] * v[(r, k)];
        }
        let e = (acc.re - r0[r]).abs() + acc.im.abs();
        if e > recon_err {
            recon_err = e;
        }
    }
    if recon_err > R::of(1e-8) {
        return None;
    }
    Some(DensityState::from_vector(out))
}

/// Closed-form free evolution (no drive): the populations relax toward the
/// stationary ratio with rate Γa+Γe+Γm and the coherence decays with rate
/// D = (Γa+Γe)/2 + Γm while precessing at ω₊₋.
pub fn free_evolution<R: Real>(
    rho0: &DensityState<R>,
    rates: &RateSet<R>,
    omega_pm: R,
    dt: R,
) -> Result<DensityState<R>, EngineError> {
    if rates.all_zero() {
        return Err(EngineError::AllRatesZero);
    }
    if dt < R::zero() {
        return Err(EngineError::Parameter("dt must be ≥ 0".into()));
    }
    let (ga, ge, gm) = rates.effective();
    let half = R::of(0.5);
    let lambda2 = -(ga + ge + gm);
    let rho11_inf = (ga + gm * half) / (ga + ge + gm);
    let rho11 = rho11_inf + (rho0.rho11 - rho11_inf) * (lambda2 * dt).exp();
    let d = (ga + ge) * half + gm;
    // z(t) = z(0)·e^{−Dt}·e^{−iω₊₋t}.
    let decay = (-d * dt).exp();
    let phase = omega_pm * dt;
    let (s, c) = (phase.sin(), phase.cos());
    let zr = rho0.rho12r;
    let zi = rho0.rho12i;
    Ok(DensityState {
        rho11,
        rho22: R::one() - rho11,
        rho12r: decay * (zr * c + zi * s),
        rho12i: decay * (zi * c - zr * s),
    })
}

/// Zero-relaxation rotation operator over `dt` in the {|u+⟩, |u−⟩} basis:
///
/// R = cos(Ω_g dt/2)·I − i·sin(Ω_g dt/2)/Ω_g · [[δ, Ω_R*], [Ω_R, −δ]],
///
/// with the generalized Rabi frequency Ω_g = √(|Ω_R|² + δ²). Unitary; the
/// Ω_g → 0 limit is the identity.
pub fn rotation_operator<R: Real>(omega_r: C<R>, delta: R, dt: R) -> [[C<R>; 2]; 2] {
    let omega_g = (omega_r.norm_sqr() + delta * delta).sqrt();
    let zero = C::new(R::zero(), R::zero());
    if omega_g == R::zero() {
        return [
            [C::new(R::one(), R::zero()), zero],
            [zero, C::new(R::one(), R::zero())],
        ];
    }
    let half_angle = omega_g * dt * R::of(0.5);
    let c = half_angle.cos();
    let s_over = half_angle.sin() / omega_g;
    let mi = C::new(R::zero(), -s_over); // −i·sin/Ωg
    [
        [
            C::new(c, R::zero()) + mi * C::new(delta, R::zero()),
            mi * omega_r.conj(),
        ],
        [
            mi * omega_r,
            C::new(c, R::zero()) - mi * C::new(delta, R::zero()),
        ],
    ]
}

/// ρ = R ρ₀ R† for a 2×2 unitary `r`.
///
/// # Errors
/// [`EngineError::NonUnitary`] when ‖RR†−I‖_max exceeds 1e-10.
pub fn apply_rotation_unitary<R: Real>(
    rho0: &DensityState<R>,
    r: &[[C<R>; 2]; 2],
) -> Result<DensityState<R>, EngineError> {
    // Unitarity check.
    let mut defect = R::zero();
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C::new(R::zero(), R::zero());
            for k in 0..2 {
                acc += r[a][k] * r[b][k].conj();
            }
            let expect = if a == b { R::one() } else { R::zero() };
            let e = cnorm(acc - C::new(expect, R::zero()));
            if e > defect {
                defect = e;
            }
        }
    }
    if defect > R::of(1e-10) {
        return Err(EngineError::NonUnitary {
            defect: defect.as_f64(),
        });
    }
    let rho = [
        [
            C::new(rho0.rho11, R::zero()),
            C::new(rho0.rho12r, rho0.rho12i),
        ],
        [
            C::new(rho0.rho12r, -rho0.rho12i),
            C::new(rho0.rho22, R::zero()),
        ],
    ];
    // (R ρ) then (· R†).
    let mut tmp = [[C::new(R::zero(), R::zero()); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C::new(R::zero(), R::zero());
            for k in 0..2 {
                acc += r[a][k] * rho[k][b];
            }
            tmp[a][b] = acc;
        }
    }
    let mut out = [[C::new(R::zero(), R::zero()); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = C::new(R::zero(), R::zero());
            for k in 0..2 {
                acc += tmp[a][k] * r[b][k].conj();
            }
            out[a][b] = acc;
        }
    }
    Ok(DensityState::from_vector([
        out[0][0].re,
        out[1][1].re,
        out[0][1].re,
        out[0][1].im,
    ]))
}

/// Classic fixed-step 4th-order Runge–Kutta integration of ρ̇ = Mρ, used as
/// the verification oracle and the ill-conditioning fallback.
pub fn numeric_oracle<R: Real>(
    rho0: &DensityState<R>,
    m: &SystemMatrix<R>,
    dt: R,
    step: R,
) -> Result<DensityState<R>, EngineError> {
    if step <= R::zero() {
        return Err(EngineError::Parameter("step must be > 0".into()));
    }
    if dt < R::zero() {
        return Err(EngineError::Parameter("dt must be ≥ 0".into()));
    }
    if dt == R::zero() {
        return Ok(*rho0);
    }
    let n_f64 = (dt / step).as_f64().ceil();
    if !n_f64.is_finite() || n_f64 > 5e8 {
        return Err(EngineError::Parameter(
            "step too small relative to dt".into(),
        ));
    }
    let n = n_f64 as usize;
    let h = dt / R::of(n as f64);
    let mut y = rho0.to_vector();
    let half = R::of(0.5);
    let sixth = R::one() / R::of(6.0);
    for _ in 0..n {
        let k1 = m.apply(&y);
        let mut y2 = y;
        for i in 0..4 {
            y2[i] += h * half * k1[i];
        }
        let k2 = m.apply(&y2);
        let mut y3 = y;
        for i in 0..4 {
            y3[i] += h * half * k2[i];
        }
        let k3 = m.apply(&y3);
        let mut y4 = y;
        for i in 0..4 {
            y4[i] += h * k3[i];
        }
        let k4 = m.apply(&y4);
        for i in 0..4 {
            y[i] += h * sixth * (k1[i] + R::of(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
    }
    Ok(DensityState::from_vector(y))
}
