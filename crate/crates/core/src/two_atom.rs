//! Closed forms for the inverse Green's function machinery when both
//! Hermitian parts have exactly two atoms.
//!
//! Everything is driven by the discriminant polynomials
//! `D_p(w) = ((alpha' - alpha) w + (1 - 2a))^2 + 4a(1-a)` (and `D_q`), whose
//! principal square root has its branch cut exactly on the vertical rays
//! `I_p`. Points within `CUT_TOL` of a cut are rejected rather than silently
//! resolved; callers probing one-sided limits must offset explicitly. The
//! continuous real-line extensions are selected automatically when
//! `|Im| < REAL_AXIS_TOL`.

use num_complex::Complex64;
use thiserror::Error;

use crate::quaternion::{eigen, Quaternion};

/// Distance to a branch cut below which arguments are rejected.
pub const CUT_TOL: f64 = 1e-12;
/// Imaginary parts below this select the continuous real-line extensions.
pub const REAL_AXIS_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum TwoAtomError {
    #[error("weight {0} outside (0, 1)")]
    WeightOutOfRange(f64),
    #[error("atom positions must be distinct")]
    EqualAtoms,
    #[error("argument at the pole w = 0")]
    PoleAtZero,
    #[error("argument on the branch cut I_p")]
    OnCutP,
    #[error("argument on the branch cut I_q")]
    OnCutQ,
    #[error("zero quaternion")]
    ZeroQuaternion,
    #[error("quaternion eigenvalue g in the excluded set S_p")]
    InSP,
    #[error("quaternion eigenvalue gI in the excluded set S_q")]
    InSQ,
}

/// Two-atom data: `mu_p = a d_alpha + (1-a) d_alpha'`,
/// `mu_q = b d_beta + (1-b) d_beta'`.
#[derive(Debug, Clone, Copy)]
pub struct TwoAtomPair {
    pub alpha: f64,
    pub alpha_p: f64,
    pub beta: f64,
    pub beta_p: f64,
    pub a: f64,
    pub b: f64,
}

/// One measure's worth of branch data for the square-root machinery.
#[derive(Debug, Clone, Copy)]
struct Side {
    span: f64,    // alpha' - alpha
    skew: f64,    // 1 - 2a
    prod4: f64,   // 4 a (1 - a)
    balanced: bool, // a == 1/2
}

impl Side {
    fn d(&self, w: Complex64) -> Complex64 {
        let t = self.span * w + self.skew;
        t * t + self.prod4
    }

    fn cut_re(&self) -> f64 {
        -self.skew / self.span
    }

    fn cut_im_min(&self) -> f64 {
        self.prod4.sqrt() / self.span.abs()
    }

    fn in_cut(&self, w: Complex64) -> bool {
        (w.re - self.cut_re()).abs() <= CUT_TOL && w.im.abs() > self.cut_im_min()
    }

    /// Euclidean distance from `w` to the cut rays.
    fn cut_distance(&self, w: Complex64) -> f64 {
        let dx = (w.re - self.cut_re()).abs();
        let dy = (self.cut_im_min() - w.im.abs()).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    /// `Im(sqrt(D(g))) / Im(g)` with its continuous real-line extension.
    fn cty2(&self, g: Complex64) -> Result<f64, TwoAtomError> {
        if g.im.abs() < REAL_AXIS_TOL {
            let t = g.re;
            let d = self.d(Complex64::new(t, 0.0)).re;
            Ok(self.span * (self.span * t + self.skew) / d.sqrt())
        } else if self.cut_distance(g) <= CUT_TOL {
            Err(TwoAtomError::OnCutP)
        } else {
            Ok(self.d(g).sqrt().im / g.im)
        }
    }

    /// `Im(conj(g) sqrt(D(g))) / Im(g)` with real-line extension, and the
    /// `a = 1/2` continuous extension (zero) on the cut.
    fn cty3(&self, g: Complex64) -> Result<f64, TwoAtomError> {
        if g.im.abs() < REAL_AXIS_TOL {
            let t = g.re;
            let d = self.d(Complex64::new(t, 0.0)).re;
            Ok((-self.skew * self.span * t - 1.0) / d.sqrt())
        } else if self.cut_distance(g) <= CUT_TOL {
            if self.balanced {
                Ok(0.0)
            } else {
                Err(TwoAtomError::OnCutP)
            }
        } else {
            Ok((g.conj() * self.d(g).sqrt()).im / g.im)
        }
    }
}

impl TwoAtomPair {
    pub fn new(
        alpha: f64,
        alpha_p: f64,
        a: f64,
        beta: f64,
        beta_p: f64,
        b: f64,
    ) -> Result<Self, TwoAtomError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(TwoAtomError::WeightOutOfRange(a));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(TwoAtomError::WeightOutOfRange(b));
        }
        if alpha == alpha_p || beta == beta_p {
            return Err(TwoAtomError::EqualAtoms);
        }
        Ok(TwoAtomPair {
            alpha,
            alpha_p,
            beta,
            beta_p,
            a,
            b,
        })
    }

    fn p_side(&self) -> Side {
        Side {
            span: self.alpha_p - self.alpha,
            skew: 1.0 - 2.0 * self.a,
            prod4: 4.0 * self.a * (1.0 - self.a),
            balanced: self.a == 0.5,
        }
    }

    fn q_side(&self) -> Side {
        Side {
            span: self.beta_p - self.beta,
            skew: 1.0 - 2.0 * self.b,
            prod4: 4.0 * self.b * (1.0 - self.b),
            balanced: self.b == 0.5,
        }
    }

    pub fn mid_x(&self) -> f64 {
        0.5 * (self.alpha + self.alpha_p)
    }

    pub fn mid_y(&self) -> f64 {
        0.5 * (self.beta + self.beta_p)
    }

    /// `D_p(w)`.
    pub fn d_p(&self, w: Complex64) -> Complex64 {
        self.p_side().d(w)
    }

    /// `D_q(w)`.
    pub fn d_q(&self, w: Complex64) -> Complex64 {
        self.q_side().d(w)
    }

    /// Membership in the branch-cut ray pair `I_p` (strict at the endpoints,
    /// `1e-12` tolerance on the real part).
    pub fn in_cut_p(&self, w: Complex64) -> bool {
        self.p_side().in_cut(w)
    }

    pub fn in_cut_q(&self, w: Complex64) -> bool {
        self.q_side().in_cut(w)
    }

    /// Functional inverse of `G_p` away from the cut:
    /// `B_p(w) = (alpha + alpha')/2 + (1 + sqrt(D_p(w))) / (2w)`.
    pub fn b_p(&self, w: Complex64) -> Result<Complex64, TwoAtomError> {
        if w.norm() <= CUT_TOL {
            return Err(TwoAtomError::PoleAtZero);
        }
        let side = self.p_side();
        if side.cut_distance(w) <= CUT_TOL {
            return Err(TwoAtomError::OnCutP);
        }
        Ok(self.mid_x() + (1.0 + side.d(w).sqrt()) / (2.0 * w))
    }

    pub fn b_q(&self, w: Complex64) -> Result<Complex64, TwoAtomError> {
        if w.norm() <= CUT_TOL {
            return Err(TwoAtomError::PoleAtZero);
        }
        let side = self.q_side();
        if side.cut_distance(w) <= CUT_TOL {
            return Err(TwoAtomError::OnCutQ);
        }
        Ok(self.mid_y() + (1.0 + side.d(w).sqrt()) / (2.0 * w))
    }

    /// `beta_p(g)`, real-valued, continuous across the real axis.
    pub fn beta_p(&self, g: Complex64) -> Result<f64, TwoAtomError> {
        Ok(self.mid_x() + 0.5 * self.p_side().cty2(g)?)
    }

    /// `beta_q` evaluated at `gI`.
    pub fn beta_q(&self, g_i: Complex64) -> Result<f64, TwoAtomError> {
        self.q_side()
            .cty2(g_i)
            .map(|v| self.mid_y() + 0.5 * v)
            .map_err(|_| TwoAtomError::OnCutQ)
    }

    /// `beta_p'(g)`; diverges at `g = 0`, and for `a = 1/2` extends onto the
    /// cut by `-1/(2|g|^2)`.
    pub fn beta_p_prime(&self, g: Complex64) -> Result<f64, TwoAtomError> {
        let n2 = g.norm_sqr();
        if n2 <= CUT_TOL * CUT_TOL {
            return Err(TwoAtomError::PoleAtZero);
        }
        Ok((-1.0 + self.p_side().cty3(g)?) / (2.0 * n2))
    }

    pub fn beta_q_prime(&self, g_i: Complex64) -> Result<f64, TwoAtomError> {
        let n2 = g_i.norm_sqr();
        if n2 <= CUT_TOL * CUT_TOL {
            return Err(TwoAtomError::PoleAtZero);
        }
        self.q_side()
            .cty3(g_i)
            .map(|v| (-1.0 + v) / (2.0 * n2))
            .map_err(|_| TwoAtomError::OnCutQ)
    }

    /// The real field `l(Q) = beta_p'(g) + beta_q'(gI) + 1/det Q`, computed in
    /// the cancellation-free combined form
    /// `(cty3_p(g) + cty3_q(gI)) / (2 |g|^2)`; uses the continuity domain
    /// `g not in S_p` and `gI not in S_q` where `S = {0}` for a balanced
    /// weight and `I cup {0}` otherwise.
    pub fn ell(&self, q: &Quaternion) -> Result<f64, TwoAtomError> {
        if q.is_zero() {
            return Err(TwoAtomError::ZeroQuaternion);
        }
        let e = eigen(q);
        let p_term = self.p_side().cty3(e.g).map_err(|_| TwoAtomError::InSP)?;
        let q_term = self.q_side().cty3(e.g_i).map_err(|_| TwoAtomError::InSQ)?;
        Ok((p_term + q_term) / (2.0 * q.det()))
    }

    /// Complex inverse Green's function
    /// `B_X(w) = mid_x + i mid_y + (sqrt(D_p(w)) + sqrt(D_q(iw))) / (2w)`.
    pub fn b_x_complex(&self, w: Complex64) -> Result<Complex64, TwoAtomError> {
        if w.norm() <= CUT_TOL {
            return Err(TwoAtomError::PoleAtZero);
        }
        let p = self.p_side();
        let q = self.q_side();
        let iw = Complex64::new(0.0, 1.0) * w;
        if p.cut_distance(w) <= CUT_TOL {
            return Err(TwoAtomError::OnCutP);
        }
        if q.cut_distance(iw) <= CUT_TOL {
            return Err(TwoAtomError::OnCutQ);
        }
        Ok(Complex64::new(self.mid_x(), self.mid_y())
            + (p.d(w).sqrt() + q.d(iw).sqrt()) / (2.0 * w))
    }

    /// Quaternionic inverse Green's function on its maximal continuity
    /// domain (`g` off `I_p + {0}`, `gI` off `I_q + {0}`):
    /// `B_X(Q) = k + k' i - l Q*` with `k = beta_p(g)`, `k' = beta_q(gI)`.
    pub fn b_x_quaternion(&self, q: &Quaternion) -> Result<Quaternion, TwoAtomError> {
        if q.is_zero() {
            return Err(TwoAtomError::ZeroQuaternion);
        }
        let e = eigen(q);
        if self.p_side().cut_distance(e.g) <= CUT_TOL {
            return Err(TwoAtomError::OnCutP);
        }
        if self.q_side().cut_distance(e.g_i) <= CUT_TOL {
            return Err(TwoAtomError::OnCutQ);
        }
        if q.is_complex() {
            // the restriction to complex arguments is the complex B_X
            return self.b_x_complex(q.a).map(Quaternion::from_complex);
        }
        let k = self.beta_p(e.g)?;
        let kp = self.beta_q(e.g_i)?;
        let l = self.ell(q)?;
        Ok(Quaternion::new(
            Complex64::new(k, kp) - l * q.a.conj(),
            l * q.b,
        ))
    }

    /// `B_p` lifted to quaternions: `B_p(g0)` for complex arguments,
    /// `beta_p(g) - beta_p'(g) Q*` otherwise.
    pub fn b_p_quaternion(&self, q: &Quaternion) -> Result<Quaternion, TwoAtomError> {
        if q.is_complex() {
            return self.b_p(q.a).map(Quaternion::from_complex);
        }
        let e = eigen(q);
        let bp = self.beta_p(e.g)?;
        let bpp = self.beta_p_prime(e.g)?;
        let qc = q.conj();
        Ok(Quaternion::new(bp - bpp * qc.a, -bpp * qc.b))
    }

    /// `B_{iq}` lifted to quaternions via the complex-scaling law
    /// `B_{cX}(Q) = c B_X(Q c)` with `c = i`.
    pub fn b_iq_quaternion(&self, q: &Quaternion) -> Result<Quaternion, TwoAtomError> {
        let qi = q.mul_unit_i();
        let inner = if qi.is_complex() {
            self.b_q(qi.a).map(Quaternion::from_complex)?
        } else {
            let e = eigen(&qi);
            let bq = self.beta_q(e.g).map_err(|_| TwoAtomError::OnCutQ)?;
            let bqp = self.beta_q_prime(e.g).map_err(|e2| match e2 {
                TwoAtomError::PoleAtZero => TwoAtomError::PoleAtZero,
                _ => TwoAtomError::OnCutQ,
            })?;
            let qc = qi.conj();
            Quaternion::new(bq - bqp * qc.a, -bqp * qc.b)
        };
        Ok(crate::quaternion::mul(&Quaternion::unit_i(), &inner))
    }

    /// `(x - alpha)(x - alpha') - (y - beta)(y - beta')`; zero exactly on the
    /// hyperbola associated with the pair.
    pub fn hyperbola_residual(&self, z: Complex64) -> f64 {
        (z.re - self.alpha) * (z.re - self.alpha_p) - (z.im - self.beta) * (z.im - self.beta_p)
    }

    /// Coordinate-interval membership in the rectangle, open or closed.
    pub fn rect_membership(&self, z: Complex64, open: bool) -> bool {
        let (x_lo, x_hi) = minmax(self.alpha, self.alpha_p);
        let (y_lo, y_hi) = minmax(self.beta, self.beta_p);
        if open {
            z.re > x_lo && z.re < x_hi && z.im > y_lo && z.im < y_hi
        } else {
            z.re >= x_lo && z.re <= x_hi && z.im >= y_lo && z.im <= y_hi
        }
    }

    /// Brown-measure atom weights `(eps00, eps01, eps10, eps11, eps)`:
    /// `eps00 = max(0, a + b - 1)` and cyclically, with `eps` the remainder.
    pub fn atom_weights(&self) -> (f64, f64, f64, f64, f64) {
        let (a, b) = (self.a, self.b);
        let e00 = (a + b - 1.0).max(0.0);
        let e01 = (a + (1.0 - b) - 1.0).max(0.0);
        let e10 = ((1.0 - a) + b - 1.0).max(0.0);
        let e11 = ((1.0 - a) + (1.0 - b) - 1.0).max(0.0);
        (e00, e01, e10, e11, 1.0 - e00 - e01 - e10 - e11)
    }

    /// The four rectangle corners `alpha + i beta`, ...
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.alpha, self.beta),
            Complex64::new(self.alpha, self.beta_p),
            Complex64::new(self.alpha_p, self.beta),
            Complex64::new(self.alpha_p, self.beta_p),
        ]
    }
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
