//! Angular-momentum operators and Extended Stevens Operators (ESOs).
//!
//! Matrices are expressed in the |m⟩ basis with m *descending*
//! (m = j, j−1, …, −j), matching the ordering used for the product basis of
//! the full spin Hamiltonian.
//!
//! # Stevens-operator convention
//!
//! The operators Ô_k^q follow the classical EPR spin-Hamiltonian convention
//! (Abragam–Bleaney style "extended" set covering negative q): with
//! X = J(J+1), c_q = (J₊^q + J₋^q)/2, s_q = (J₊^q − J₋^q)/(2i) and the
//! rank/order polynomials f_{k,q}(J_z) tabulated below,
//!
//! * Ô_k^0  = f_{k,0}(J_z),
//! * Ô_k^q  = ½ (c_q f_{k,q} + f_{k,q} c_q)   for 0 < q ≤ k,
//! * Ô_k^−q = ½ (s_q f_{k,q} + f_{k,q} s_q)   for 0 < q ≤ k.
//!
//! This normalization reproduces the standard tabulated matrices (e.g.
//! Ô_2^0 = 3J_z²−X, Ô_2^2 = ½(J₊²+J₋²), Ô_4^0 diag(12,−48,72,−48,12) for
//! J=2), which the unit tests assert. All operators are Hermitian, and for
//! J = 1/2 every Ô_k^q with k ≥ 2 vanishes identically (Kramers).

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::SpinError;
use crate::scalar::Real;

/// Complex scalar shorthand.
pub type C<R> = Complex<R>;

/// Dimension of the |m⟩ basis for twice the quantum number `twice_j`.
#[inline]
pub fn dim_of(twice_j: u32) -> usize {
    twice_j as usize + 1
}

/// m-value (descending order) of basis index `idx` for quantum number j.
#[inline]
fn m_value<R: Real>(twice_j: u32, idx: usize) -> R {
    // m = j - idx
    R::of(twice_j as f64 / 2.0 - idx as f64)
}

/// J_z in the descending-m basis (diagonal, in units of ħ).
pub fn jz<R: Real>(twice_j: u32) -> DMatrix<C<R>> {
    let dim = dim_of(twice_j);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            C::new(m_value(twice_j, r), R::zero())
        } else {
            C::new(R::zero(), R::zero())
        }
    })
}

/// Raising operator J₊ in the descending-m basis (units of ħ):
/// ⟨m+1|J₊|m⟩ = √(j(j+1) − m(m+1)).
pub fn jplus<R: Real>(twice_j: u32) -> DMatrix<C<R>> {
    let dim = dim_of(twice_j);
    let j = R::of(twice_j as f64 / 2.0);
    let mut out = DMatrix::from_element(dim, dim, C::new(R::zero(), R::zero()));
    for col in 1..dim {
        let m: R = m_value(twice_j, col);
        let amp = (j * (j + R::one()) - m * (m + R::one())).sqrt();
        out[(col - 1, col)] = C::new(amp, R::zero());
    }
    out
}

/// Lowering operator J₋ = J₊† in the descending-m basis (units of ħ).
pub fn jminus<R: Real>(twice_j: u32) -> DMatrix<C<R>> {
    jplus::<R>(twice_j).adjoint()
}

/// Cartesian J_x = (J₊+J₋)/2.
pub fn jx<R: Real>(twice_j: u32) -> DMatrix<C<R>> {
    let half = C::new(R::of(0.5), R::zero());
    (jplus::<R>(twice_j) + jminus::<R>(twice_j)) * half
}

/// Cartesian J_y = (J₊−J₋)/(2i).
pub fn jy<R: Real>(twice_j: u32) -> DMatrix<C<R>> {
    let inv2i = C::new(R::zero(), R::of(-0.5)); // 1/(2i) = -i/2
    (jplus::<R>(twice_j) - jminus::<R>(twice_j)) * inv2i
}

/// Evaluates a polynomial in J_z with coefficients `coeffs[p]` multiplying
/// J_z^p (diagonal result).
fn jz_poly<R: Real>(twice_j: u32, coeffs: &[R]) -> DMatrix<C<R>> {
    let dim = dim_of(twice_j);
    DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            let m: R = m_value(twice_j, r);
            let mut acc = R::zero();
            let mut pw = R::one();
            for &co in coeffs {
                acc += co * pw;
                pw *= m;
            }
            C::new(acc, R::zero())
        } else {
            C::new(R::zero(), R::zero())
        }
    })
}

/// Rank/order polynomial f_{k,q}(J_z) as ascending power coefficients, for
/// X = J(J+1). Valid for k ∈ {2,4,6}, 0 ≤ q ≤ k.
fn f_poly<R: Real>(k: u8, q: u8, x: R) -> Vec<R> {
    let c = |v: f64| R::of(v);
    match (k, q) {
        // k = 2
        (2, 0) => vec![-x, R::zero(), c(3.0)],
        (2, 1) => vec![R::zero(), R::one()],
        (2, 2) => vec![R::one()],
        // k = 4
        (4, 0) => vec![
            c(3.0) * x * x - c(6.0) * x,
            R::zero(),
            c(25.0) - c(30.0) * x,
            R::zero(),
            c(35.0),
        ],
        (4, 1) => vec![R::zero(), -(c(3.0) * x + R::one()), R::zero(), c(7.0)],
        (4, 2) => vec![-x - c(5.0), R::zero(), c(7.0)],
        (4, 3) => vec![R::zero(), R::one()],
        (4, 4) => vec![R::one()],
        // k = 6
        (6, 0) => vec![
            -c(5.0) * x * x * x + c(40.0) * x * x - c(60.0) * x,
            R::zero(),
            c(105.0) * x * x - c(525.0) * x + c(294.0),
            R::zero(),
            c(735.0) - c(315.0) * x,
            R::zero(),
            c(231.0),
        ],
        (6, 1) => vec![
            R::zero(),
            c(5.0) * x * x - c(10.0) * x + c(12.0),
            R::zero(),
            c(15.0) - c(30.0) * x,
            R::zero(),
            c(33.0),
        ],
        (6, 2) => vec![
            x * x + c(10.0) * x + c(102.0),
            R::zero(),
            -(c(18.0) * x + c(123.0)),
            R::zero(),
            c(33.0),
        ],
        (6, 3) => vec![R::zero(), -(c(3.0) * x + c(59.0)), R::zero(), c(11.0)],
        (6, 4) => vec![-x - c(38.0), R::zero(), c(11.0)],
        (6, 5) => vec![R::zero(), R::one()],
        (6, 6) => vec![R::one()],
        _ => unreachable!("validated by caller"),
    }
}

/// Extended Stevens Operator Ô_k^q for rank k ∈ {2,4,6} and order |q| ≤ k,
/// in the descending-m basis of quantum number `twice_j`/2. Hermitian.
pub fn stevens_operator<R: Real>(
    k: u8,
    q: i8,
    twice_j: u32,
) -> Result<DMatrix<C<R>>, SpinError> {
    if !matches!(k, 2 | 4 | 6) {
        return Err(SpinError::Parameter(format!(
            "Stevens rank k must be 2, 4 or 6 (got {k})"
        )));
    }
    if q.unsigned_abs() > k {
        return Err(SpinError::Parameter(format!(
            "Stevens order |q| must not exceed k (got k={k}, q={q})"
        )));
    }
    let j = R::of(twice_j as f64 / 2.0);
    let x = j * (j + R::one());
    let aq = q.unsigned_abs();
    let f = jz_poly(twice_j, &f_poly(k, aq, x));
    if q == 0 {
        return Ok(f);
    }
    let jp = jplus::<R>(twice_j);
    let jm = jminus::<R>(twice_j);
    let mut jp_q = jp.clone();
    let mut jm_q = jm.clone();
    for _ in 1..aq {
        jp_q = &jp_q * &jp;
        jm_q = &jm_q * &jm;
    }
    let ladder = if q > 0 {
        // c_q = (J₊^q + J₋^q)/2
        (jp_q + jm_q) * C::new(R::of(0.5), R::zero())
    } else {
        // s_q = (J₊^q − J₋^q)/(2i)
        (jp_q - jm_q) * C::new(R::zero(), R::of(-0.5))
    };
    // Symmetrized product ½(c f + f c).
    let half = C::new(R::of(0.5), R::zero());
    Ok((&ladder * &f + &f * &ladder) * half)
}
