//! Shared fixtures for the integration and golden-number suites.
#![allow(dead_code)]

use num_complex::Complex;
use spindyn::geometry::DriveConfig;
use spindyn::phonon::RateSet;
use spindyn::spin::{build_hamiltonian, diagonalize, qubit_frame, QubitFrame, SpinSystem};
use spindyn::constants::MHZ_TO_CM1;

/// The minimal two-level fixture: gap 0.3 cm⁻¹ (8.99377374 GHz), transition
/// elements N = (1/2, i/2, 0), static field along +z.
pub fn toy_frame() -> QubitFrame<f64> {
    QubitFrame::from_parts(
        1,
        2,
        vec![0.0, 0.3],
        [
            Complex::new(0.5, 0.0),
            Complex::new(0.0, 0.5),
            Complex::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Drive used in all toy-gate fixtures: |B1| = 1.5 mT, ν_MW = 8.99377 GHz,
/// in-plane (α = 0).
pub fn toy_drive() -> DriveConfig<f64> {
    DriveConfig {
        b1_mag: 1.5,
        f_mw: 8.99377,
        alpha: 0.0,
        epsilon: 0.0,
    }
}

/// Rate floor used by the gate fixtures: Γmag,add = 1e-10 μs⁻¹ only.
pub fn floor_rates() -> RateSet<f64> {
    RateSet {
        gamma_mag_add: 1e-10,
        ..Default::default()
    }
}

/// A vanadyl complex: S = 1/2, I = 7/2, g = (1.986, 1.988, 1.970),
/// A = (138, 128, 413) MHz.
pub fn vanadyl_system() -> SpinSystem<f64> {
    SpinSystem::new(
        1,
        7,
        [1.986, 1.988, 1.970],
        vec![],
        [138.0 * MHZ_TO_CM1, 128.0 * MHZ_TO_CM1, 413.0 * MHZ_TO_CM1],
        0.0,
        2.0,
    )
    .unwrap()
}

/// A copper complex: S = 1/2, I = 3/2, g = (2.0215, 2.0215, 2.0898),
/// A = (118, 118, 495.4) MHz.
pub fn copper_system() -> SpinSystem<f64> {
    SpinSystem::new(
        1,
        3,
        [2.0215, 2.0215, 2.0898],
        vec![],
        [118.0 * MHZ_TO_CM1, 118.0 * MHZ_TO_CM1, 495.4 * MHZ_TO_CM1],
        0.0,
        2.0023,
    )
    .unwrap()
}

/// Diagonalizes `sys` at field `b_mt` and selects the (ig, ie) doublet.
pub fn frame_at_field(
    sys: &SpinSystem<f64>,
    b_mt: [f64; 3],
    ig: usize,
    ie: usize,
) -> QubitFrame<f64> {
    let h = build_hamiltonian(sys, b_mt);
    let scheme = diagonalize(&h).unwrap();
    qubit_frame(&scheme, sys, ig, ie).unwrap()
}
