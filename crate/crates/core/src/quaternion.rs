//! Quaternions in the 2x2 complex-matrix representation.
//!
//! A quaternion is stored by its complex coefficient pair `(a, b)` and stands
//! for the matrix
//!
//! ```text
//! | a      i*conj(b) |
//! | i*b    conj(a)   |
//! ```
//!
//! so that `a = x0 + i*x3` and `b = x1 + i*x2` in terms of the four real
//! coefficients. All closed-form Green's function formulas downstream are
//! written in `(a, b)`, which is why the pair is primary and `x0..x3` are
//! derived accessors.

use num_complex::Complex64;
use thiserror::Error;

/// Entry-wise tolerance used by equality and zero tests.
pub const ENTRY_TOL: f64 = 1e-14;

#[derive(Debug, Error, PartialEq)]
pub enum QuaternionError {
    #[error("quaternion is zero and has no inverse")]
    ZeroInverse,
    #[error("z_epsilon requires eps > 0, got {0}")]
    NonPositiveEps(f64),
    #[error("diagonalization of a real quaternion is not unique")]
    RealDiagonalize,
}

/// Quaternion as the complex pair `(a, b)` of its matrix representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub a: Complex64,
    pub b: Complex64,
}

/// Eigenvalues (with nonnegative imaginary part) of `Q` and of `Q*i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    /// Eigenvalue of `Q` with `Im >= 0`.
    pub g: Complex64,
    /// Eigenvalue of `Q*i` with `Im >= 0`.
    pub g_i: Complex64,
}

impl Quaternion {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Quaternion { a, b }
    }

    pub fn from_reals(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quaternion {
            a: Complex64::new(x0, x3),
            b: Complex64::new(x1, x2),
        }
    }

    pub fn zero() -> Self {
        Quaternion::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn one() -> Self {
        Quaternion::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// The quaternion unit `i`, i.e. the complex scalar `i` embedded as `diag(i, -i)`.
    pub fn unit_i() -> Self {
        Quaternion::new(Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0))
    }

    /// Embeds a complex scalar as the quaternion `diag(z, conj(z))`.
    pub fn from_complex(z: Complex64) -> Self {
        Quaternion::new(z, Complex64::new(0.0, 0.0))
    }

    pub fn x0(&self) -> f64 {
        self.a.re
    }
    pub fn x1(&self) -> f64 {
        self.b.re
    }
    pub fn x2(&self) -> f64 {
        self.b.im
    }
    pub fn x3(&self) -> f64 {
        self.a.im
    }

    /// `det Q = |a|^2 + |b|^2`.
    pub fn det(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Quaternionic norm, `sqrt(det Q)`.
    pub fn norm(&self) -> f64 {
        self.det().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.a.norm() <= ENTRY_TOL && self.b.norm() <= ENTRY_TOL
    }

    /// True when the quaternion lies in the reals (`b = 0`, `Im a = 0`).
    pub fn is_real(&self) -> bool {
        self.b.norm() <= ENTRY_TOL && self.a.im.abs() <= ENTRY_TOL
    }

    /// True when the quaternion lies in the complex numbers (`b = 0`).
    pub fn is_complex(&self) -> bool {
        self.b.norm() <= ENTRY_TOL
    }

    /// Quaternion conjugate, the matrix adjoint `Q^*`.
    pub fn conj(&self) -> Self {
        Quaternion::new(self.a.conj(), -self.b)
    }

    /// The four matrix entries, row major.
    pub fn matrix(&self) -> [Complex64; 4] {
        let i = Complex64::new(0.0, 1.0);
        [self.a, i * self.b.conj(), i * self.b, self.a.conj()]
    }

    pub fn add(&self, rhs: &Quaternion) -> Self {
        Quaternion::new(self.a + rhs.a, self.b + rhs.b)
    }

    pub fn sub(&self, rhs: &Quaternion) -> Self {
        Quaternion::new(self.a - rhs.a, self.b - rhs.b)
    }

    pub fn scale(&self, t: f64) -> Self {
        Quaternion::new(self.a * t, self.b * t)
    }

    /// Right multiplication by the quaternion unit `i`: `Q * i = diag-product`.
    pub fn mul_unit_i(&self) -> Self {
        mul(self, &Quaternion::unit_i())
    }

    pub fn approx_eq(&self, rhs: &Quaternion, tol: f64) -> bool {
        (self.a - rhs.a).norm() <= tol && (self.b - rhs.b).norm() <= tol
    }
}

/// Matrix product of two quaternions; closed in the representation.
pub fn mul(q1: &Quaternion, q2: &Quaternion) -> Quaternion {
    // Row-by-column on the 2x2 forms:
    //   a = a1*a2 - conj(b1)*b2
    //   b = b1*a2 + conj(a1)*b2
    Quaternion::new(
        q1.a * q2.a - q1.b.conj() * q2.b,
        q1.b * q2.a + q1.a.conj() * q2.b,
    )
}

/// Matrix inverse. Fails on the zero quaternion.
pub fn inverse(q: &Quaternion) -> Result<Quaternion, QuaternionError> {
    if q.is_zero() {
        return Err(QuaternionError::ZeroInverse);
    }
    let d = q.det();
    // Q^{-1} = Q^* / det Q.
    Ok(Quaternion::new(q.a.conj() / d, -q.b / d))
}

/// Eigenvalues of `Q` and `Q*i`, both with nonnegative imaginary part:
/// `g = x0 + i*sqrt(x1^2 + x2^2 + x3^2)`, `gI = -x3 + i*sqrt(x0^2 + x1^2 + x2^2)`.
pub fn eigen(q: &Quaternion) -> EigenPair {
    let (x0, x1, x2, x3) = (q.x0(), q.x1(), q.x2(), q.x3());
    EigenPair {
        g: Complex64::new(x0, (x1 * x1 + x2 * x2 + x3 * x3).sqrt()),
        g_i: Complex64::new(-x3, (x0 * x0 + x1 * x1 + x2 * x2).sqrt()),
    }
}

/// The quaternion `((z, i*eps), (i*eps, conj(z)))` whose Green's function limit
/// as `eps -> 0+` recovers the Brown measure.
pub fn z_epsilon(z: Complex64, eps: f64) -> Result<Quaternion, QuaternionError> {
    if !(eps > 0.0) {
        return Err(QuaternionError::NonPositiveEps(eps));
    }
    Ok(Quaternion::new(z, Complex64::new(eps, 0.0)))
}

/// Diagonalizing transform for a non-real quaternion:
/// `S = ((i*b, g - a), (conj(g) - conj(a), i*conj(b)))` with `S Q S^{-1} = diag(g, conj(g))`.
///
/// Real quaternions are rejected: they are already scalar and the transform
/// degenerates. A complex quaternion is already diagonal, so `S` is the
/// identity (or the swap when `Im a < 0`, which reorders the eigenvalues);
/// the row-eigenvector formula above is singular there.
pub fn diagonalize(q: &Quaternion) -> Result<([Complex64; 4], Complex64), QuaternionError> {
    if q.is_real() {
        return Err(QuaternionError::RealDiagonalize);
    }
    let g = eigen(q).g;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    if q.is_complex() {
        let s = if q.a.im >= 0.0 {
            [one, zero, zero, one]
        } else {
            [zero, one, one, zero]
        };
        return Ok((s, g));
    }
    let i = Complex64::new(0.0, 1.0);
    let s = [i * q.b, g - q.a, g.conj() - q.a.conj(), i * q.b.conj()];
    Ok((s, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_q(rng: &mut StdRng) -> Quaternion {
        Quaternion::from_reals(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )
    }

    fn mat_mul(a: &[Complex64; 4], b: &[Complex64; 4]) -> [Complex64; 4] {
        [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ]
    }

    #[test]
    fn unit_i_squares_to_minus_one() {
        let q = Quaternion::new(c(0.0, 1.0), c(0.0, 0.0));
        let r = mul(&q, &q);
        assert!(r.approx_eq(&Quaternion::new(c(-1.0, 0.0), c(0.0, 0.0)), 1e-15));
    }

    #[test]
    fn mul_matches_matrix_product_and_identity() {
        let mut rng = StdRng::seed_from_u64(1);
        let id = Quaternion::one();
        for _ in 0..200 {
            let q1 = random_q(&mut rng);
            let q2 = random_q(&mut rng);
            let q12 = mul(&q1, &q2);
            let m = mat_mul(&q1.matrix(), &q2.matrix());
            let qm = q12.matrix();
            for k in 0..4 {
                assert!((m[k] - qm[k]).norm() <= 1e-12);
            }
            assert!(mul(&q1, &id).approx_eq(&q1, 1e-15));
        }
    }

    #[test]
    fn norm_is_multiplicative() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..1000 {
            let q1 = random_q(&mut rng);
            let q2 = random_q(&mut rng);
            let lhs = mul(&q1, &q2).norm();
            let rhs = q1.norm() * q2.norm();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }

    #[test]
    fn mul_is_associative() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..1000 {
            let (q1, q2, q3) = (random_q(&mut rng), random_q(&mut rng), random_q(&mut rng));
            let lhs = mul(&mul(&q1, &q2), &q3);
            let rhs = mul(&q1, &mul(&q2, &q3));
            assert!(lhs.approx_eq(&rhs, 1e-12 * (1.0 + lhs.norm())));
        }
    }

    #[test]
    fn inverse_examples_and_round_trip() {
        let q = Quaternion::new(c(2.0, 0.0), c(0.0, 0.0));
        let inv = inverse(&q).unwrap();
        assert!(inv.approx_eq(&Quaternion::new(c(0.5, 0.0), c(0.0, 0.0)), 1e-15));

        let q = Quaternion::new(c(0.0, 0.0), c(1.0, 0.0));
        let inv = inverse(&q).unwrap();
        assert!((q.det() - 1.0).abs() < 1e-15);
        // unit quaternion: inverse equals the conjugate
        assert!(inv.approx_eq(&q.conj(), 1e-15));

        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..200 {
            let q = random_q(&mut rng);
            if q.norm() < 1e-3 {
                continue;
            }
            let r = mul(&q, &inverse(&q).unwrap());
            assert!(r.approx_eq(&Quaternion::one(), 1e-12));
        }

        assert_eq!(
            inverse(&Quaternion::zero()),
            Err(QuaternionError::ZeroInverse)
        );
    }

    #[test]
    fn eigen_examples() {
        // A = i (x3 = 1), B = 0: g = i, gI = -1
        let e = eigen(&Quaternion::new(c(0.0, 1.0), c(0.0, 0.0)));
        assert!((e.g - c(0.0, 1.0)).norm() <= 1e-15);
        assert!((e.g_i - c(-1.0, 0.0)).norm() <= 1e-15);

        // A = 0, B = 1 (x1 = 1): g = i, gI = i
        let e = eigen(&Quaternion::new(c(0.0, 0.0), c(1.0, 0.0)));
        assert!((e.g - c(0.0, 1.0)).norm() <= 1e-15);
        assert!((e.g_i - c(0.0, 1.0)).norm() <= 1e-15);

        // A = 2+3i, B = 0.5: g = 2 + i*sqrt(9.25)
        let e = eigen(&Quaternion::new(c(2.0, 3.0), c(0.5, 0.0)));
        assert!((e.g - c(2.0, 9.25f64.sqrt())).norm() <= 1e-14);
    }

    #[test]
    fn eigen_norms_and_reality() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..500 {
            let q = random_q(&mut rng);
            let e = eigen(&q);
            assert!((e.g.norm() - q.norm()).abs() <= 1e-12 * q.norm().max(1.0));
            assert!((e.g_i.norm() - q.norm()).abs() <= 1e-12 * q.norm().max(1.0));
            // conjugation leaves |g| fixed
            assert!((eigen(&q.conj()).g.norm() - e.g.norm()).abs() <= 1e-12);
        }
        // g real iff Q real; gI real iff Q*i real i.e. Q in i*R
        assert!(eigen(&Quaternion::from_reals(1.5, 0.0, 0.0, 0.0)).g.im == 0.0);
        let q = Quaternion::new(c(0.0, 2.0), c(0.0, 0.0)); // Q = 2i, Q*i = -2 real
        assert!(eigen(&q).g_i.im == 0.0);
    }

    #[test]
    fn z_epsilon_examples() {
        let q = z_epsilon(c(0.0, 0.0), 1.0).unwrap();
        assert_eq!(q.a, c(0.0, 0.0));
        assert_eq!(q.b, c(1.0, 0.0));

        let q = z_epsilon(c(2.0, 3.0), 0.5).unwrap();
        assert_eq!(q.a, c(2.0, 3.0));
        let e = eigen(&q);
        assert!((e.g - c(2.0, 9.25f64.sqrt())).norm() <= 1e-14);
        // Im g exceeds |Im z| for eps > 0
        assert!(e.g.im > 3.0);

        assert!(z_epsilon(c(1.0, 0.0), 0.0).is_err());
        assert!(z_epsilon(c(1.0, 0.0), -0.1).is_err());
    }

    #[test]
    fn diagonalize_round_trip() {
        // A = i, B = 0 recovers diag(i, -i)
        let q = Quaternion::new(c(0.0, 1.0), c(0.0, 0.0));
        let (s, g) = diagonalize(&q).unwrap();
        assert!((g - c(0.0, 1.0)).norm() <= 1e-15);
        let det = s[0] * s[3] - s[1] * s[2];
        assert!(det.norm() > 1e-12);
        let s_inv = [s[3] / det, -s[1] / det, -s[2] / det, s[0] / det];
        let m = mat_mul(&mat_mul(&s, &q.matrix()), &s_inv);
        assert!((m[0] - g).norm() <= 1e-10);
        assert!((m[3] - g.conj()).norm() <= 1e-10);
        assert!(m[1].norm() <= 1e-10 && m[2].norm() <= 1e-10);

        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..200 {
            let q = random_q(&mut rng);
            if q.is_real() {
                continue;
            }
            let (s, g) = diagonalize(&q).unwrap();
            let det = s[0] * s[3] - s[1] * s[2];
            if det.norm() < 1e-8 {
                continue;
            }
            let s_inv = [s[3] / det, -s[1] / det, -s[2] / det, s[0] / det];
            let m = mat_mul(&mat_mul(&s, &q.matrix()), &s_inv);
            assert!((m[0] - g).norm() <= 1e-10 && (m[3] - g.conj()).norm() <= 1e-10);
            assert!(m[1].norm() <= 1e-10 && m[2].norm() <= 1e-10);
        }

        assert_eq!(
            diagonalize(&Quaternion::from_reals(3.0, 0.0, 0.0, 0.0)),
            Err(QuaternionError::RealDiagonalize)
        );
    }
}
