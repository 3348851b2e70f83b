//! Resultants of multivariate polynomials via Sylvester determinants.
//!
//! The determinant of a polynomial-entry matrix is computed by fraction-free
//! Bareiss elimination: every division along the way is exact in the ring, so
//! the intermediate entries are honest minors and degree growth stays under
//! control. Cofactor expansion is kept as an independent oracle for tests.

use rayon::prelude::*;
use thiserror::Error;

use crate::poly::{GaussPoly, Var};

#[derive(Debug, Error)]
pub enum ResultantError {
    #[error("both polynomials are constant in {0}; resultant undefined")]
    BothConstant(&'static str),
    #[error("resultant of the zero polynomial")]
    ZeroPolynomial,
    #[error("Bareiss pivot division failed; matrix entries are not minors of an integral-domain matrix")]
    InexactDivision,
}

/// Sylvester matrix of `a` and `b` with respect to `var`, row-major.
///
/// `a` of degree n and `b` of degree k give the (n+k) x (n+k) matrix whose
/// first k columns are shifted copies of `a`'s coefficients (descending) and
/// last n columns shifted copies of `b`'s.
pub fn sylvester_matrix(a: &GaussPoly, b: &GaussPoly, var: Var) -> Vec<Vec<GaussPoly>> {
    let n = a.degree(var) as usize;
    let k = b.degree(var) as usize;
    let ac = a.coeffs_in(var);
    let bc = b.coeffs_in(var);
    let s = n + k;
    let mut m = vec![vec![GaussPoly::zero(); s]; s];
    for col in 0..k {
        for d in 0..=n {
            // coefficient of var^(n-d) lands in row col+d
            m[col + d][col] = ac[n - d].clone();
        }
    }
    for col in 0..n {
        for d in 0..=k {
            m[col + d][k + col] = bc[k - d].clone();
        }
    }
    m
}

/// Determinant by fraction-free Bareiss elimination with row pivoting.
/// Rows of each elimination step run in parallel; the result is exact and
/// independent of the parallel schedule.
pub fn bareiss_determinant(mut m: Vec<Vec<GaussPoly>>) -> Result<GaussPoly, ResultantError> {
    let s = m.len();
    if s == 0 {
        return Ok(GaussPoly::one());
    }
    let mut sign_flip = false;
    let mut prev = GaussPoly::one();
    for k in 0..s - 1 {
        if m[k][k].is_zero() {
            match (k + 1..s).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(GaussPoly::zero()),
            }
        }
        let pivot = m[k][k].clone();
        let pivot_row: Vec<GaussPoly> = m[k][k..].to_vec();
        let updated: Result<Vec<Vec<GaussPoly>>, ResultantError> = m[k + 1..]
            .par_iter()
            .map(|row| {
                let lead = row[k].clone();
                let mut out = Vec::with_capacity(s - k - 1);
                for j in k + 1..s {
                    let num = pivot
                        .mul(&row[j])
                        .sub(&lead.mul(&pivot_row[j - k]));
                    let q = num
                        .exact_div(&prev)
                        .map_err(|_| ResultantError::InexactDivision)?;
                    out.push(q);
                }
                Ok(out)
            })
            .collect();
        for (i, row) in updated?.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                m[k + 1 + i][k + 1 + j] = v;
            }
        }
        prev = pivot;
    }
    let mut det = m[s - 1][s - 1].clone();
    if sign_flip {
        det = det.neg();
    }
    Ok(det)
}

/// Cofactor (Laplace) expansion along the first row; exponential, test oracle
/// for small matrices only.
pub fn cofactor_determinant(m: &[Vec<GaussPoly>]) -> GaussPoly {
    let s = m.len();
    if s == 0 {
        return GaussPoly::one();
    }
    if s == 1 {
        return m[0][0].clone();
    }
    let mut det = GaussPoly::zero();
    for col in 0..s {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<GaussPoly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = m[0][col].mul(&cofactor_determinant(&minor));
        if col % 2 == 0 {
            det = det.add(&term);
        } else {
            det = det.sub(&term);
        }
    }
    det
}

/// Resultant of `a` and `b` with respect to `var`.
///
/// When exactly one argument is constant in `var` the power rule
/// `Res(a, c) = c^(deg a)` applies; both constant is an error.
pub fn resultant(a: &GaussPoly, b: &GaussPoly, var: Var) -> Result<GaussPoly, ResultantError> {
    if a.is_zero() || b.is_zero() {
        return Err(ResultantError::ZeroPolynomial);
    }
    let n = a.degree(var);
    let k = b.degree(var);
    match (n, k) {
        (0, 0) => Err(ResultantError::BothConstant(var.name())),
        (0, _) => Ok(a.pow(k)),
        (_, 0) => Ok(b.pow(n)),
        _ => bareiss_determinant(sylvester_matrix(a, b, var)),
    }
}
