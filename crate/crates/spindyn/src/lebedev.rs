//! Octahedrally symmetric Lebedev quadrature grids on the unit sphere
//! (orders 6, 26 and 110), used for powder averaging over static-field
//! directions.
//!
//! Grids are generated from their symmetry orbits with weights normalized
//! so Σᵢ wᵢ = 1 (the spherical average is Σᵢ wᵢ f(ûᵢ)). Orbit parameters
//! for the 110-point rule are frozen to the standard Lebedev–Laikov values
//! (validated by exact integration of even monomials up to degree 16).

use crate::error::SequenceError;
use crate::geometry::FieldDirection;
use crate::scalar::Real;

/// A quadrature node: unit direction and normalized weight.
pub type Node = ([f64; 3], f64);

/// Octahedron-vertex orbit (±x, ±y, ±z axes), 6 points.
fn orbit_a1(w: f64, out: &mut Vec<Node>) {
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut v = [0.0; 3];
            v[axis] = sign;
            out.push((v, w));
        }
    }
}

/// Cube-vertex orbit (±1, ±1, ±1)/√3, 8 points.
fn orbit_a3(w: f64, out: &mut Vec<Node>) {
    let a = 1.0 / 3f64.sqrt();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                out.push(([sx * a, sy * a, sz * a], w));
            }
        }
    }
}

/// Cuboctahedron-edge orbit (±1, ±1, 0)/√2 and permutations, 12 points.
fn orbit_a2(w: f64, out: &mut Vec<Node>) {
    let a = 1.0 / 2f64.sqrt();
    for zero_pos in 0..3 {
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                let vals = [s1 * a, s2 * a];
                let mut p = [0.0; 3];
                let mut k = 0;
                for (i, slot) in p.iter_mut().enumerate() {
                    if i != zero_pos {
                        *slot = vals[k];
                        k += 1;
                    }
                }
                out.push((p, w));
            }
        }
    }
}

/// (±l, ±l, ±k) orbit with k = √(1 − 2l²), 24 points (k in each position).
fn orbit_llk(l: f64, w: f64, out: &mut Vec<Node>) {
    let k = (1.0 - 2.0 * l * l).sqrt();
    for k_pos in 0..3 {
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                for s3 in [1.0, -1.0] {
                    let signs = [s1, s2, s3];
                    let mut p = [0.0; 3];
                    for i in 0..3 {
                        p[i] = signs[i] * if i == k_pos { k } else { l };
                    }
                    out.push((p, w));
                }
            }
        }
    }
}

/// (±p, ±q, 0) orbit with q = √(1 − p²), all orderings, 24 points.
fn orbit_pq0(p: f64, w: f64, out: &mut Vec<Node>) {
    let q = (1.0 - p * p).sqrt();
    // All 6 placements of (p, q) into distinct slots, zero elsewhere.
    for p_pos in 0..3 {
        for q_pos in 0..3 {
            if q_pos == p_pos {
                continue;
            }
            for sp in [1.0, -1.0] {
                for sq in [1.0, -1.0] {
                    let mut v = [0.0; 3];
                    v[p_pos] = sp * p;
                    v[q_pos] = sq * q;
                    out.push((v, w));
                }
            }
        }
    }
}

/// Quadrature nodes of the `n`-point grid (n ∈ {6, 26, 110}); weights sum
/// to 1.
pub fn lebedev_nodes(n: usize) -> Result<Vec<Node>, SequenceError> {
    let mut out = Vec::with_capacity(n);
    match n {
        6 => orbit_a1(1.0 / 6.0, &mut out),
        26 => {
            orbit_a1(1.0 / 21.0, &mut out);
            orbit_a2(4.0 / 105.0, &mut out);
            orbit_a3(9.0 / 280.0, &mut out);
        }
        110 => {
            orbit_a1(3.828_270_494_927_210_7e-3, &mut out);
            orbit_a3(9.793_737_512_489_153_8e-3, &mut out);
            orbit_llk(1.851_156_353_446_706_5e-1, 8.211_737_283_191_472_2e-3, &mut out);
            orbit_llk(6.904_210_483_822_917_9e-1, 9.942_814_891_178_380_6e-3, &mut out);
            orbit_llk(3.956_894_730_559_134_0e-1, 9.595_471_336_072_292_8e-3, &mut out);
            orbit_pq0(4.783_690_288_121_478_2e-1, 9.694_996_361_662_997_3e-3, &mut out);
        }
        other => {
            return Err(SequenceError::Parameter(format!(
                "unsupported Lebedev order {other} (available: 6, 26, 110)"
            )))
        }
    }
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

/// The `n`-point grid as [`FieldDirection`]s (θ = acos z, φ = atan2(y, x)
/// wrapped into [0, 2π)), all sharing the given spin-bath rate.
pub fn lebedev_directions<R: Real>(
    n: usize,
    gamma_mag: R,
) -> Result<Vec<FieldDirection<R>>, SequenceError> {
    let nodes = lebedev_nodes(n)?;
    Ok(nodes
        .into_iter()
        .map(|([x, y, z], w)| {
            let theta = z.clamp(-1.0, 1.0).acos();
            let mut phi = y.atan2(x);
            if phi < 0.0 {
                phi += 2.0 * std::f64::consts::PI;
            }
            FieldDirection {
                theta: R::of(theta),
                phi: R::of(phi),
                weight: R::of(w),
                gamma_mag,
            }
        })
        .collect())
}
