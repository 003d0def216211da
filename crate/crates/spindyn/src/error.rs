//! Error types for the numeric core.

use thiserror::Error;

/// Errors from spin-Hamiltonian construction and qubit-frame selection.
#[derive(Debug, Clone, Error)]
pub enum SpinError {
    /// Invalid Stevens-operator rank/order or quantum-number combination.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A matrix expected to be Hermitian was not, within tolerance.
    #[error("matrix is not Hermitian (max |H - H†| element = {defect:e})")]
    NonHermitian { defect: f64 },
    /// One of the selected qubit levels is degenerate with another level.
    #[error("qubit level {level} (E = {energy} cm⁻¹) is degenerate with level {other} within {tol} cm⁻¹")]
    DegenerateQubitLevel {
        level: usize,
        other: usize,
        energy: f64,
        tol: f64,
    },
}

/// Errors from relaxation-rate evaluation.
#[derive(Debug, Clone, Error)]
pub enum RateError {
    /// Out-of-range physical parameter (negative rate, T ≤ 0, σ ≤ 0, …).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Coupling data is inconsistent with the mode list or energy windows.
    #[error("inconsistent coupling data: {0}")]
    Inconsistent(String),
}

/// Errors from the master-equation engine.
#[derive(Debug, Clone, Error)]
pub enum EngineError {
    /// All six effective rates are zero; the relaxing-propagator branch is
    /// undefined in that regime (use the unitary rotation operator instead).
    #[error("all effective relaxation rates are zero; the dissipative propagator requires at least one positive rate")]
    AllRatesZero,
    /// Out-of-range argument (negative duration, non-positive step, …).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A matrix expected to be unitary was not, within tolerance.
    #[error("matrix is not unitary (max |RR† - I| element = {defect:e})")]
    NonUnitary { defect: f64 },
    /// A density state violated trace/positivity invariants.
    #[error("invalid density state: {0}")]
    InvalidState(String),
}

/// Errors from sequence interpretation and powder averaging.
#[derive(Debug, Clone, Error)]
pub enum SequenceError {
    /// Empty sequence, bad sweep bounds, or unknown step code.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Direction weights do not form a normalized distribution.
    #[error("direction weights sum to {sum}, expected 1 within {tol}")]
    WeightSum { sum: f64, tol: f64 },
    /// Bubbled up from the master-equation engine.
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Errors from curve fitting and fidelity evaluation.
#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    /// Too few points, non-increasing abscissa, or invalid inputs.
    #[error("invalid data: {0}")]
    Data(String),
}
