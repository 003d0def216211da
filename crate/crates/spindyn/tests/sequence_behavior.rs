//! Behavioral tests for gate sequences: Hahn-echo refocusing, ε-averaging
//! invariances, and powder-average bookkeeping.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use spindyn::lindblad::DensityState;
use spindyn::phonon::RateSet;
use spindyn::sequence::{
    average_curves, run_sequence, sweep_tau, sweep_tau_epsilon_averaged, GateStep,
    SequenceContext, StepCode, SweepConfig, SweepPoint,
};

fn pi_pulse_duration() -> f64 {
    // |Omega| of the toy fixture: 2*pi*13.996245*2*(1.5*0.5) rad/us.
    let omega = 2.0 * std::f64::consts::PI * 13.996245 * 2.0 * 0.75;
    std::f64::consts::PI / omega
}

/// A Hahn echo refocuses the deterministic precession phase: the final
/// coherence must not depend on the qubit gap frequency.
#[test]
fn hahn_echo_refocuses_precession() {
    let rates = RateSet {
        gamma_mag_add: 0.02,
        ..Default::default()
    };
    let drive = toy_drive();
    let t_pi = pi_pulse_duration();
    let steps = [
        GateStep::new(StepCode::FixedRotation, t_pi / 2.0, 0.0).unwrap(),
        GateStep::new(StepCode::VariableFree, 0.0, 0.0).unwrap(),
        GateStep::new(StepCode::FixedRotation, t_pi, 0.0).unwrap(),
        GateStep::new(StepCode::VariableFree, 0.0, 0.0).unwrap(),
    ];
    let rho0 = DensityState::new(0.0, 1.0, 0.0, 0.0).unwrap();
    let tau = 0.731; // an arbitrary, non-commensurate delay

    // Two fixtures differing only in the gap (and a resonant drive for each).
    let mut finals = Vec::new();
    for gap_cm in [0.3, 0.4517] {
        let frame = spindyn::spin::QubitFrame::from_parts(
            1,
            2,
            vec![0.0, gap_cm],
            toy_frame().n,
        )
        .unwrap();
        let drive = spindyn::geometry::DriveConfig {
            f_mw: frame.gap_ghz(),
            ..drive
        };
        let ctx = SequenceContext {
            frame: &frame,
            rates: &rates,
            drive: &drive,
            g_i: 2.0,
            theta: 0.0,
            phi: 0.0,
        };
        let (last, _) = run_sequence(&ctx, &steps, &rho0, tau, 0.0).unwrap();
        finals.push(last);
    }
    for (x, y) in finals[0].to_vector().iter().zip(finals[1].to_vector()) {
        assert_abs_diff_eq!(*x, y, epsilon = 1e-9);
    }
}

/// Without the refocusing pulse the final coherence phase does depend on the
/// gap — guards against the echo test passing vacuously.
#[test]
fn free_precession_alone_does_not_refocus() {
    let rates = RateSet {
        gamma_mag_add: 0.02,
        ..Default::default()
    };
    let drive = toy_drive();
    let t_pi = pi_pulse_duration();
    let steps = [
        GateStep::new(StepCode::FixedRotation, t_pi / 2.0, 0.0).unwrap(),
        GateStep::new(StepCode::VariableFree, 0.0, 0.0).unwrap(),
    ];
    let rho0 = DensityState::new(0.0, 1.0, 0.0, 0.0).unwrap();
    let tau = 0.731;
    let mut finals = Vec::new();
    for gap_cm in [0.3, 0.4517] {
        let frame =
            spindyn::spin::QubitFrame::from_parts(1, 2, vec![0.0, gap_cm], toy_frame().n).unwrap();
        let drive = spindyn::geometry::DriveConfig {
            f_mw: frame.gap_ghz(),
            ..drive
        };
        let ctx = SequenceContext {
            frame: &frame,
            rates: &rates,
            drive: &drive,
            g_i: 2.0,
            theta: 0.0,
            phi: 0.0,
        };
        let (last, _) = run_sequence(&ctx, &steps, &rho0, tau, 0.0).unwrap();
        finals.push(last);
    }
    let d: f64 = finals[0]
        .to_vector()
        .iter()
        .zip(finals[1].to_vector())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    assert!(d > 1e-3, "coherence phase unexpectedly gap-independent (d = {d})");
}

/// The echo envelope decays at the pure-dephasing rate e^{-Γm·2τ}.
#[test]
fn hahn_envelope_matches_dephasing_rate() {
    let gm = 1.7;
    let rates = RateSet {
        gamma_mag_add: gm,
        ..Default::default()
    };
    let frame = toy_frame();
    let drive = toy_drive();
    let ctx = SequenceContext {
        frame: &frame,
        rates: &rates,
        drive: &drive,
        g_i: 2.0,
        theta: 0.0,
        phi: 0.0,
    };
    let t_pi = pi_pulse_duration();
    let steps = [
        GateStep::new(StepCode::FixedRotation, t_pi / 2.0, 0.0).unwrap(),
        GateStep::new(StepCode::VariableFree, 0.0, 0.0).unwrap(),
        GateStep::new(StepCode::FixedRotation, t_pi, 0.0).unwrap(),
        GateStep::new(StepCode::VariableFree, 0.0, 0.0).unwrap(),
    ];
    let rho0 = DensityState::new(0.0, 1.0, 0.0, 0.0).unwrap();
    let sweep = SweepConfig::new(0.0, 1.0, 21).unwrap();
    let rows = sweep_tau(&ctx, &steps, &rho0, &sweep, 0.0).unwrap();
    // Normalize by the tau = 0 point to cancel the fixed pulse-decay factor.
    let m0 = rows[0].mxy;
    for p in &rows[1..] {
        let expect = m0 * (-gm * p.time).exp();
        assert_abs_diff_eq!(p.mxy, expect, epsilon = 1e-6);
    }
}

/// ε-averaging over a full period is invariant under a global ε offset;
/// for the toy fixture (circular transition dipole) even a single ε equals
/// the average.
#[test]
fn epsilon_average_invariances() {
    let frame = toy_frame();
    let rates = floor_rates();
    let drive = toy_drive();
    let ctx = SequenceContext {
        frame: &frame,
        rates: &rates,
        drive: &drive,
        g_i: 2.0,
        theta: 0.0,
        phi: 0.0,
    };
    let steps = [GateStep::new(StepCode::VariableRotation, 0.0, 0.0).unwrap()];
    let rho0 = DensityState::new(0.0, 1.0, 0.0, 0.0).unwrap();
    let sweep = SweepConfig::new(0.0, 0.1, 9).unwrap();
    let avg = sweep_tau_epsilon_averaged(&ctx, &steps, &rho0, &sweep, 8).unwrap();
    let single = sweep_tau(&ctx, &steps, &rho0, &sweep, 1.234).unwrap();
    for (a, s) in avg.iter().zip(&single) {
        assert_abs_diff_eq!(a.mz, s.mz, epsilon = 1e-12);
        assert_abs_diff_eq!(a.mxy, s.mxy, epsilon = 1e-12);
    }
}

#[test]
fn powder_average_rejects_bad_weights() {
    let curve = vec![SweepPoint {
        time: 0.0,
        mz: 0.5,
        mxy: 0.1,
    }];
    // Weights summing to 0.9: rejected with the weight-sum error.
    let bad = vec![(0.45, curve.clone()), (0.45, curve.clone())];
    assert!(spindyn::sequence::powder_average(&bad).is_err());
    // Unchecked average with the same weights is allowed.
    assert!(average_curves(&bad, false).is_ok());
    // Proper weights pass and reproduce the common curve.
    let good = vec![(0.5, curve.clone()), (0.5, curve)];
    let avg = spindyn::sequence::powder_average(&good).unwrap();
    assert_abs_diff_eq!(avg[0].mz, 0.5);
    assert_abs_diff_eq!(avg[0].mxy, 0.1);
}
