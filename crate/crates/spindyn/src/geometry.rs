//! Geometry of the static-field direction and the linearly polarized drive.
//!
//! The static field points along û(θ,φ); a right-handed orthonormal frame
//! (X̃, Ỹ, Z̃=û) is attached to it, rotated about û by the pulse angle ε.
//! The drive field B1 lies in the Ỹ–Z̃ plane at polarization angle α.
//!
//! All angles are radians here; degree conversion happens at file ingestion.

use crate::scalar::Real;

/// A static-field direction with its quadrature weight and per-direction
/// spin-bath rate.
#[derive(Debug, Clone, Copy)]
pub struct FieldDirection<R: Real> {
    /// Zenithal angle θ ∈ [0, π], rad.
    pub theta: R,
    /// Azimuthal angle φ ∈ [0, 2π), rad.
    pub phi: R,
    /// Quadrature weight p_i ≥ 0 (weights sum to 1 over a grid).
    pub weight: R,
    /// Spin-bath rate 1/T_n + 1/T_e for this direction, μs⁻¹.
    pub gamma_mag: R,
}

/// Microwave-drive parameters.
#[derive(Debug, Clone, Copy)]
pub struct DriveConfig<R: Real> {
    /// |B1| in mT (≥ 0).
    pub b1_mag: R,
    /// Drive frequency ω_MW/2π in GHz (≥ 0).
    pub f_mw: R,
    /// Polarization angle α, rad.
    pub alpha: R,
    /// Rotation-axis angle ε, rad.
    pub epsilon: R,
}

/// Unit vector û = (sinθ cosφ, sinθ sinφ, cosθ) along the static field.
pub fn static_direction<R: Real>(theta: R, phi: R) -> [R; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    [st * cp, st * sp, ct]
}

/// Right-handed orthonormal frame (X̃, Ỹ, Z̃) attached to û(θ,φ), rotated by
/// ε about û:
///
/// n̂1 = (−sinφ, cosφ, 0), n̂2 = (cosθ cosφ, cosθ sinφ, −sinθ),
/// X̃ = n̂2 cosε + n̂1 sinε, Ỹ = −n̂2 sinε + n̂1 cosε, Z̃ = û.
///
/// The closed form stays finite at the poles (θ ∈ {0, π}): the pole frame
/// simply inherits the φ label of the direction.
pub fn frame_axes<R: Real>(theta: R, phi: R, epsilon: R) -> [[R; 3]; 3] {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let n1 = [-sp, cp, R::zero()];
    let n2 = [ct * cp, ct * sp, -st];
    let (se, ce) = (epsilon.sin(), epsilon.cos());
    let mut x = [R::zero(); 3];
    let mut y = [R::zero(); 3];
    for k in 0..3 {
        x[k] = n2[k] * ce + n1[k] * se;
        y[k] = -n2[k] * se + n1[k] * ce;
    }
    [x, y, static_direction(theta, phi)]
}

/// Lab-frame drive field B1 = |B1|(Ỹ cosα + Z̃ sinα), in mT.
///
/// The result is orthogonal to X̃ and has norm |B1| exactly (orthonormal
/// expansion); its projection on û is |B1|·sinα.
pub fn b1_vector<R: Real>(drive: &DriveConfig<R>, theta: R, phi: R) -> [R; 3] {
    let [_, y, z] = frame_axes(theta, phi, drive.epsilon);
    let (sa, ca) = (drive.alpha.sin(), drive.alpha.cos());
    let mut b1 = [R::zero(); 3];
    for k in 0..3 {
        b1[k] = drive.b1_mag * (y[k] * ca + z[k] * sa);
    }
    b1
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    fn det3(m: &[[f64; 3]; 3]) -> f64 {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    #[test]
    fn static_direction_special_cases() {
        let u = static_direction(0.0, 1.234);
        assert_abs_diff_eq!(u[2], 1.0, epsilon = 1e-15);
        let u = static_direction(FRAC_PI_2, FRAC_PI_2);
        assert_abs_diff_eq!(u[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], 1.0, epsilon = 1e-15);
        let u = static_direction(FRAC_PI_3, FRAC_PI_4);
        let e = 3f64.sqrt() / 2.0 * 2f64.sqrt() / 2.0;
        assert_abs_diff_eq!(u[0], e, epsilon = 1e-15);
        assert_abs_diff_eq!(u[1], e, epsilon = 1e-15);
        assert_abs_diff_eq!(u[2], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn frame_axes_reference_substitution() {
        // θ=π/2, φ=π/2, ε=0 → X̃=(0,0,−1), Ỹ=(−1,0,0), Z̃=(0,1,0).
        let [x, y, z] = frame_axes(FRAC_PI_2, FRAC_PI_2, 0.0);
        assert_abs_diff_eq!(x[2], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(y[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn frame_is_orthonormal_right_handed_everywhere() {
        for &theta in &[0.0, 1e-9, FRAC_PI_3, FRAC_PI_2, PI - 1e-9, PI] {
            for &phi in &[0.0, 0.7, PI, 5.1] {
                for &eps in &[0.0, 0.3, FRAC_PI_2, 4.0] {
                    let f = frame_axes(theta, phi, eps);
                    for a in 0..3 {
                        for b in 0..3 {
                            let expect = if a == b { 1.0 } else { 0.0 };
                            assert_abs_diff_eq!(
                                dot(&f[a], &f[b]),
                                expect,
                                epsilon = 1e-12
                            );
                        }
                    }
                    assert_abs_diff_eq!(det3(&f), 1.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn epsilon_quarter_turn_maps_x_to_y() {
        let (theta, phi, eps) = (1.1, 2.2, 0.4);
        let [x1, _, _] = frame_axes(theta, phi, eps + FRAC_PI_2);
        let [_, y0, _] = frame_axes(theta, phi, eps);
        for k in 0..3 {
            assert_abs_diff_eq!(x1[k], y0[k], epsilon = 1e-14);
        }
    }

    #[test]
    fn b1_norm_and_projection() {
        let drive = DriveConfig {
            b1_mag: 1.5,
            f_mw: 9.0,
            alpha: 0.8,
            epsilon: 2.1,
        };
        let (theta, phi) = (0.9, 4.2);
        let b1 = b1_vector(&drive, theta, phi);
        assert_abs_diff_eq!(dot(&b1, &b1).sqrt(), 1.5, epsilon = 1e-12);
        let u = static_direction(theta, phi);
        assert_abs_diff_eq!(dot(&b1, &u), 1.5 * 0.8f64.sin(), epsilon = 1e-12);
        let [x, _, _] = frame_axes(theta, phi, drive.epsilon);
        assert_abs_diff_eq!(dot(&b1, &x), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn b1_parallel_case_and_reference_direction() {
        // α = π/2 → B1 ∥ û.
        let drive = DriveConfig {
            b1_mag: 2.0,
            f_mw: 0.0,
            alpha: FRAC_PI_2,
            epsilon: 1.3,
        };
        let (theta, phi) = (0.6, 2.9);
        let b1 = b1_vector(&drive, theta, phi);
        let u = static_direction(theta, phi);
        for k in 0..3 {
            assert_abs_diff_eq!(b1[k], 2.0 * u[k], epsilon = 1e-13);
        }
        // θ=π/2, φ=π/2, ε=0, α=0 → B1 = |B1|·(−1,0,0).
        let drive = DriveConfig {
            b1_mag: 1.5,
            f_mw: 0.0,
            alpha: 0.0,
            epsilon: 0.0,
        };
        let b1 = b1_vector(&drive, FRAC_PI_2, FRAC_PI_2);
        assert_abs_diff_eq!(b1[0], -1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b1[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b1[2], 0.0, epsilon = 1e-14);
    }
}
