//! Static spin Hamiltonian: construction, diagonalization, qubit-doublet
//! selection, transition dipole moment and Rabi frequency.
//!
//! The product basis is |m_J⟩⊗|m_I⟩ with both m quantum numbers ordered
//! *descending* (electron index major, nuclear index minor), so 1-based
//! level indices from reference data files are reproducible.
//!
//! Internal units: energies in cm⁻¹, magnetic fields in mT, times in μs,
//! angular frequencies in rad/μs. Hyperfine constants given in MHz must be
//! converted before constructing [`SpinSystem`] (see
//! [`crate::constants::MHZ_TO_CM1`]).

use nalgebra::{DMatrix, DVector};
use crate::constants::{
    CM1_TO_GHZ, HBAR_J_S, MUB_J_PER_T, ZEEMAN_CM1_PER_MT,
};
use crate::error::SpinError;
use crate::scalar::{cnorm, Real};
use crate::stevens::{self, dim_of, C};

/// Default tolerance (cm⁻¹) below which two levels count as degenerate when
/// validating a qubit-doublet selection.
pub const DEGENERACY_TOL_CM1: f64 = 1e-8;

/// Relative Hermiticity tolerance for matrices fed to [`diagonalize`].
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Static parameters of a single spin center.
///
/// All energetic quantities are stored in cm⁻¹.
#[derive(Debug, Clone)]
pub struct SpinSystem<R: Real> {
    /// Twice the electron angular-momentum quantum number J (≥ 1).
    pub twice_j: u32,
    /// Twice the nuclear spin quantum number I (0 allowed).
    pub twice_i: u32,
    /// Effective Landé factors (g_x, g_y, g_z), dimensionless, all > 0.
    pub g: [R; 3],
    /// Crystal-field parameters: (k, q, B_k^q in cm⁻¹) with k ∈ {2,4,6},
    /// |q| ≤ k. Must be empty for J = 1/2 (Kramers).
    pub cfp: Vec<(u8, i8, R)>,
    /// Hyperfine constants (A_x, A_y, A_z) in cm⁻¹.
    pub a_hf: [R; 3],
    /// Quadrupole constant P in cm⁻¹ (multiplies 1⊗Î_z²).
    pub p_quad: R,
    /// Free-ion Landé factor used for the drive coupling.
    pub g_i: R,
}

impl<R: Real> SpinSystem<R> {
    /// Validates invariants and constructs the system.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        twice_j: u32,
        twice_i: u32,
        g: [R; 3],
        cfp: Vec<(u8, i8, R)>,
        a_hf: [R; 3],
        p_quad: R,
        g_i: R,
    ) -> Result<Self, SpinError> {
        if twice_j == 0 {
            return Err(SpinError::Parameter(
                "electron quantum number J must satisfy 2J ≥ 1".into(),
            ));
        }
        for (axis, &ga) in ["x", "y", "z"].iter().zip(&g) {
            if ga <= R::zero() {
                return Err(SpinError::Parameter(format!(
                    "g_{axis} must be positive"
                )));
            }
        }
        for &(k, q, b) in &cfp {
            if !matches!(k, 2 | 4 | 6) || q.unsigned_abs() > k {
                return Err(SpinError::Parameter(format!(
                    "invalid crystal-field index (k={k}, q={q})"
                )));
            }
            if twice_j == 1 && b != R::zero() {
                return Err(SpinError::Parameter(
                    "crystal-field parameters must vanish for J = 1/2 (Kramers doublet)"
                        .into(),
                ));
            }
        }
        Ok(Self {
            twice_j,
            twice_i,
            g,
            cfp,
            a_hf,
            p_quad,
            g_i,
        })
    }

    /// Hilbert-space dimension (2J+1)(2I+1).
    pub fn dim(&self) -> usize {
        dim_of(self.twice_j) * dim_of(self.twice_i)
    }
}

/// Kronecker product A⊗B for complex dynamic matrices.
fn kron<R: Real>(a: &DMatrix<C<R>>, b: &DMatrix<C<R>>) -> DMatrix<C<R>> {
    a.kronecker(b)
}

/// Identity matrix of dimension `n` over `Complex<R>`.
fn eye<R: Real>(n: usize) -> DMatrix<C<R>> {
    DMatrix::identity(n, n)
}

/// Builds the static Hamiltonian in cm⁻¹ for a field `b_mt` (mT, lab frame):
///
/// H = Σ B_k^q Ô_k^q ⊗ 1 + (μ_B/hc) Σ_α g_α B_α Ĵ_α ⊗ 1
///   + Σ_β A_β Ĵ_β ⊗ Î_β + P · 1 ⊗ Î_z².
///
/// Hermitian by construction (all terms are real combinations of Hermitian
/// operators).
pub fn build_hamiltonian<R: Real>(sys: &SpinSystem<R>, b_mt: [R; 3]) -> DMatrix<C<R>> {
    let ej = sys.twice_j;
    let ni = sys.twice_i;
    let dim_e = dim_of(ej);
    let dim_n = dim_of(ni);

    let je = [stevens::jx::<R>(ej), stevens::jy::<R>(ej), stevens::jz::<R>(ej)];
    let iz = stevens::jz::<R>(ni);
    let inuc = [stevens::jx::<R>(ni), stevens::jy::<R>(ni), iz.clone()];

    // Electron-space part: crystal field + Zeeman.
    let mut h_e = DMatrix::from_element(dim_e, dim_e, C::new(R::zero(), R::zero()));
    for &(k, q, b) in &sys.cfp {
        let o = stevens::stevens_operator::<R>(k, q, ej)
            .expect("cfp indices validated at construction");
        h_e += o * C::new(b, R::zero());
    }
    let zeeman = R::of(ZEEMAN_CM1_PER_MT);
    for alpha in 0..3 {
        let coeff = zeeman * sys.g[alpha] * b_mt[alpha];
        h_e += &je[alpha] * C::new(coeff, R::zero());
    }

    let mut h = kron(&h_e, &eye::<R>(dim_n));

    // Hyperfine coupling Σ A_β Ĵ_β ⊗ Î_β.
    for beta in 0..3 {
        if sys.a_hf[beta] != R::zero() {
            h += kron(&je[beta], &inuc[beta]) * C::new(sys.a_hf[beta], R::zero());
        }
    }

    // Quadrupole P · 1 ⊗ Î_z².
    if sys.p_quad != R::zero() {
        let iz2 = &iz * &iz;
        h += kron(&eye::<R>(dim_e), &iz2) * C::new(sys.p_quad, R::zero());
    }

    h
}

/// Result of diagonalizing the static Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenScheme<R: Real> {
    /// Hilbert-space dimension.
    pub dim: usize,
    /// Eigenvalues in cm⁻¹, ascending.
    pub energies: Vec<R>,
    /// Eigenvectors as columns, same order as `energies`, expressed in the
    /// descending-m product basis. Phase convention: the largest-magnitude
    /// component of each column is real positive.
    pub vectors: DMatrix<C<R>>,
}

/// Diagonalizes a Hermitian matrix, returning ascending energies and
/// phase-fixed orthonormal eigenvectors.
///
/// # Errors
/// [`SpinError::NonHermitian`] if `‖H − H†‖_max` exceeds
/// [`HERMITICITY_TOL`]·‖H‖_max (with an absolute floor for H ≈ 0).
pub fn diagonalize<R: Real>(h: &DMatrix<C<R>>) -> Result<EigenScheme<R>, SpinError> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(SpinError::Parameter("Hamiltonian must be square".into()));
    }
    let mut defect = R::zero();
    let mut scale = R::zero();
    for r in 0..dim {
        for c in 0..dim {
            let d = cnorm(h[(r, c)] - h[(c, r)].conj());
            if d > defect {
                defect = d;
            }
            let m = cnorm(h[(r, c)]);
            if m > scale {
                scale = m;
            }
        }
    }
    let tol = R::of(HERMITICITY_TOL) * scale.max(R::one());
    if defect > tol {
        return Err(SpinError::NonHermitian {
            defect: defect.as_f64(),
        });
    }

    let eig = nalgebra::SymmetricEigen::new(h.clone());
    // Sort ascending by eigenvalue.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("Hermitian eigenvalues are finite reals")
    });

    let mut energies = Vec::with_capacity(dim);
    let mut vectors = DMatrix::from_element(dim, dim, C::new(R::zero(), R::zero()));
    for (col, &src) in order.iter().enumerate() {
        energies.push(eig.eigenvalues[src]);
        let v = eig.eigenvectors.column(src);
        // Phase fix: rotate so the largest-magnitude component is real > 0.
        let mut best = 0usize;
        let mut best_mag = R::zero();
        for (i, z) in v.iter().enumerate() {
            let m = cnorm(*z);
            if m > best_mag {
                best_mag = m;
                best = i;
            }
        }
        let phase = if best_mag > R::zero() {
            let z = v[best];
            (z / C::new(cnorm(z), R::zero())).conj()
        } else {
            C::new(R::one(), R::zero())
        };
        for i in 0..dim {
            vectors[(i, col)] = v[i] * phase;
        }
    }
    Ok(EigenScheme {
        dim,
        energies,
        vectors,
    })
}

/// The qubit doublet extracted from an eigenscheme (or ingested from a data
/// file): energies, gap and the transition matrix elements the dynamics
/// needs.
#[derive(Debug, Clone)]
pub struct QubitFrame<R: Real> {
    /// 1-based index of |u−⟩ in the ascending energy ladder.
    pub ig: usize,
    /// 1-based index of |u+⟩ (ig < ie).
    pub ie: usize,
    /// Energy of |u−⟩, cm⁻¹.
    pub u_minus: R,
    /// Energy of |u+⟩, cm⁻¹.
    pub u_plus: R,
    /// All eigenenergies (ascending, cm⁻¹), kept for intermediate-state sums.
    pub all_energies: Vec<R>,
    /// N_γ = ⟨u+|Ĵ_γ/ħ|u−⟩ for γ ∈ {x,y,z}.
    pub n: [C<R>; 3],
    /// ⟨c|Ĵ_γ/ħ|u−⟩ per state c (outer: γ), when built from an eigenscheme.
    pub j_to_minus: Option<[Vec<C<R>>; 3]>,
    /// ⟨c|Ĵ_γ/ħ|u+⟩ per state c (outer: γ), when built from an eigenscheme.
    pub j_to_plus: Option<[Vec<C<R>>; 3]>,
}

impl<R: Real> QubitFrame<R> {
    /// Assembles a frame from externally supplied pieces (the data-file
    /// ingestion path, where eigenvectors are not available).
    pub fn from_parts(
        ig: usize,
        ie: usize,
        all_energies: Vec<R>,
        n: [C<R>; 3],
    ) -> Result<Self, SpinError> {
        validate_doublet(ig, ie, &all_energies)?;
        let u_minus = all_energies[ig - 1];
        let u_plus = all_energies[ie - 1];
        Ok(Self {
            ig,
            ie,
            u_minus,
            u_plus,
            all_energies,
            n,
            j_to_minus: None,
            j_to_plus: None,
        })
    }

    /// Qubit gap ν₊₋ in cm⁻¹.
    pub fn gap_cm1(&self) -> R {
        self.u_plus - self.u_minus
    }

    /// Qubit gap ω₊₋/2π in GHz.
    pub fn gap_ghz(&self) -> R {
        self.gap_cm1() * R::of(CM1_TO_GHZ)
    }

    /// Qubit gap as an angular frequency ω₊₋ in rad/μs.
    pub fn omega_pm(&self) -> R {
        self.gap_cm1() * R::of(crate::constants::CM1_TO_RAD_PER_US)
    }
}

fn validate_doublet<R: Real>(
    ig: usize,
    ie: usize,
    energies: &[R],
) -> Result<(), SpinError> {
    let dim = energies.len();
    if ig == 0 || ie == 0 || ig >= ie || ie > dim {
        return Err(SpinError::Parameter(format!(
            "qubit indices must satisfy 1 ≤ ig < ie ≤ {dim} (got ig={ig}, ie={ie})"
        )));
    }
    let u_minus = energies[ig - 1];
    let u_plus = energies[ie - 1];
    if u_plus <= u_minus {
        return Err(SpinError::Parameter(format!(
            "qubit gap must be strictly positive (u− = {}, u+ = {})",
            u_minus.as_f64(),
            u_plus.as_f64()
        )));
    }
    let tol = R::of(DEGENERACY_TOL_CM1);
    for (c0, &e) in energies.iter().enumerate() {
        let c = c0 + 1;
        if c == ig || c == ie {
            continue;
        }
        for (level, u) in [(ig, u_minus), (ie, u_plus)] {
            if (e - u).abs() < tol {
                return Err(SpinError::DegenerateQubitLevel {
                    level,
                    other: c,
                    energy: u.as_f64(),
                    tol: DEGENERACY_TOL_CM1,
                });
            }
        }
    }
    Ok(())
}

/// Selects the qubit doublet (1-based indices `ig` < `ie`) from an
/// eigenscheme and computes all Ĵ_γ/ħ transition matrix elements.
///
/// # Errors
/// Parameter error on bad indices; [`SpinError::DegenerateQubitLevel`] when
/// another level sits within [`DEGENERACY_TOL_CM1`] of either qubit energy.
pub fn qubit_frame<R: Real>(
    scheme: &EigenScheme<R>,
    sys: &SpinSystem<R>,
    ig: usize,
    ie: usize,
) -> Result<QubitFrame<R>, SpinError> {
    validate_doublet(ig, ie, &scheme.energies)?;

    let dim_n = dim_of(sys.twice_i);
    let j_ops: [DMatrix<C<R>>; 3] = [
        kron(&stevens::jx::<R>(sys.twice_j), &eye::<R>(dim_n)),
        kron(&stevens::jy::<R>(sys.twice_j), &eye::<R>(dim_n)),
        kron(&stevens::jz::<R>(sys.twice_j), &eye::<R>(dim_n)),
    ];

    let u_m: DVector<C<R>> = scheme.vectors.column(ig - 1).into();
    let u_p: DVector<C<R>> = scheme.vectors.column(ie - 1).into();

    let mut n = [C::new(R::zero(), R::zero()); 3];
    let mut j_to_minus: [Vec<C<R>>; 3] = Default::default();
    let mut j_to_plus: [Vec<C<R>>; 3] = Default::default();
    for gamma in 0..3 {
        let jm = &j_ops[gamma] * &u_m;
        let jp = &j_ops[gamma] * &u_p;
        n[gamma] = u_p.dotc(&jm); // ⟨u+|J_γ|u−⟩
        let mut to_m = Vec::with_capacity(scheme.dim);
        let mut to_p = Vec::with_capacity(scheme.dim);
        for c in 0..scheme.dim {
            let vc: DVector<C<R>> = scheme.vectors.column(c).into();
            to_m.push(vc.dotc(&jm)); // ⟨c|J_γ|u−⟩
            to_p.push(vc.dotc(&jp)); // ⟨c|J_γ|u+⟩
        }
        j_to_minus[gamma] = to_m;
        j_to_plus[gamma] = to_p;
    }

    Ok(QubitFrame {
        ig,
        ie,
        u_minus: scheme.energies[ig - 1],
        u_plus: scheme.energies[ie - 1],
        all_energies: scheme.energies.clone(),
        n,
        j_to_minus: Some(j_to_minus),
        j_to_plus: Some(j_to_plus),
    })
}

/// Magnetic transition dipole moment μ₊₋ = μ_B · g_I · N, components in J/T.
pub fn transition_dipole<R: Real>(frame: &QubitFrame<R>, g_i: R) -> [C<R>; 3] {
    let scale = R::of(MUB_J_PER_T) * g_i;
    frame.n.map(|nz| nz * C::new(scale, R::zero()))
}

/// Complex Rabi frequency Ω_R = μ₊₋·B1/ħ in rad/μs, for a drive field `b1_mt`
/// in mT (lab frame). The linear-frequency magnitude is |Ω_R|/2π (MHz when
/// Ω_R is in rad/μs).
pub fn rabi_frequency<R: Real>(mu: &[C<R>; 3], b1_mt: [R; 3]) -> C<R> {
    // μ[J/T]·B1[T]/ħ[J·s] → rad/s; ×1e-6 → rad/μs; B1 mT → T is another 1e-3.
    let scale = R::of(1e-3 * 1e-6 / HBAR_J_S);
    let mut omega = C::new(R::zero(), R::zero());
    for gamma in 0..3 {
        omega += mu[gamma] * C::new(b1_mt[gamma] * scale, R::zero());
    }
    omega
}
