//! # spindyn
//!
//! Simulator for a single spin qubit driven through gate sequences (free
//! evolutions and microwave rotations) while relaxing under vibration-bath,
//! spin-bath, and semi-empirical rates. The rotating-frame Lindblad master
//! equation for the 2×2 qubit density matrix is solved analytically by
//! eigendecomposition of a real 4×4 coefficient matrix, with a fixed-step
//! RK4 integrator as verification oracle and ill-conditioning fallback.
//!
//! ## Pipeline
//!
//! 1. [`spin`] — build the static spin Hamiltonian (Extended Stevens
//!    Operators, Zeeman, hyperfine, quadrupole), diagonalize it, select the
//!    qubit doublet, and expose transition matrix elements, dipole moment
//!    and Rabi frequency.
//! 2. [`geometry`] — attach a right-handed frame to the static-field
//!    direction and resolve the linearly polarized drive field.
//! 3. [`phonon`] — one-phonon and two-phonon relaxation rates from
//!    vibration-mode data and spin–phonon coupling elements, plus additive
//!    semi-empirical rates and the detailed-balance option.
//! 4. [`lindblad`] — assemble and solve the 4×4 rotating-frame system;
//!    closed-form free evolution; zero-relaxation rotation operator.
//! 5. [`sequence`] — interpret gate-step codes, sweep variable durations,
//!    evaluate Mz/|Mxy|, and powder-average over Lebedev grids
//!    ([`lebedev`]) and drive-axis angles.
//! 6. [`analysis`] — fidelity, Bloch readout, and T1/Tm/Tdd extraction by
//!    (stretched) exponential fits.
//!
//! ## Units
//!
//! Energies in cm⁻¹, times in μs, rates in μs⁻¹, magnetic fields in mT,
//! angular frequencies in rad/μs, temperatures in K, angles in radians.
//! Conversion constants are pinned in [`constants`].
//!
//! ## Scalar genericity
//!
//! Every numeric routine is generic over [`scalar::Real`] (`f32` or `f64`).
//! The aliases below fix the common double-precision case.

pub mod analysis;
pub mod constants;
pub mod error;
pub mod geometry;
pub mod lebedev;
pub mod lindblad;
pub mod phonon;
pub mod scalar;
pub mod sequence;
pub mod spin;
pub mod stevens;

/// Double-precision spin system.
pub type SpinSystem = spin::SpinSystem<f64>;
/// Double-precision eigendecomposition result.
pub type EigenScheme = spin::EigenScheme<f64>;
/// Double-precision qubit frame.
pub type QubitFrame = spin::QubitFrame<f64>;
/// Double-precision field direction.
pub type FieldDirection = geometry::FieldDirection<f64>;
/// Double-precision drive configuration.
pub type DriveConfig = geometry::DriveConfig<f64>;
/// Double-precision vibration mode.
pub type VibrationMode = phonon::VibrationMode<f64>;
/// Double-precision coupling data.
pub type CouplingData = phonon::CouplingData<f64>;
/// Double-precision rate set.
pub type RateSet = phonon::RateSet<f64>;
/// Double-precision density state.
pub type DensityState = lindblad::DensityState<f64>;
/// Double-precision system matrix.
pub type SystemMatrix = lindblad::SystemMatrix<f64>;
/// Double-precision gate step.
pub type GateStep = sequence::GateStep<f64>;
/// Double-precision sweep configuration.
pub type SweepConfig = sequence::SweepConfig<f64>;
/// Double-precision sweep row.
pub type SweepPoint = sequence::SweepPoint<f64>;
/// Double-precision fit result.
pub type FitResult = analysis::FitResult<f64>;
