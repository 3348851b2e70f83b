//! Monte-Carlo quaternionic Green's function estimates on the `z_eps` ladder,
//! and the trend classification of probe points.
//!
//! Per replica the estimator computes
//!
//! ```text
//! A_hat = tau[ (Xz* Xz + eps^2)^{-1} Xz* ]      Xz = z - X
//! B_hat = eps * tau[ (Xz* Xz + eps^2)^{-1} ]
//! ```
//!
//! with `tau` the normalized trace; replica scatter gives the standard
//! errors. `B_hat` is stored as the positive magnitude; the Green's function
//! value itself sits in the lower quaternionic half-plane, so the
//! reconstructed quaternion carries `-B_hat` (see [`GreenEntry::quaternion`]).

use ndarray::Array2;
use ndarray_linalg::{c64, InverseC};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_matrix, EnsembleSpec, EsdError};
use crate::quaternion::Quaternion;

/// Default epsilon ladder for classification.
pub const DEFAULT_LADDER: [f64; 5] = [0.2, 0.1, 0.05, 0.02, 0.01];

/// One `(z, eps)` estimate with replica statistics.
#[derive(Debug, Clone, Serialize)]
pub struct GreenEntry {
    pub eps: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub a_stderr: f64,
    /// Positive magnitude `eps * tau[(Xz* Xz + eps^2)^{-1}]`.
    pub b: f64,
    pub b_stderr: f64,
    /// Imaginary defect of the off-diagonal estimate (zero in exact
    /// arithmetic; statistical noise here).
    pub b_im: f64,
    pub b_im_stderr: f64,
    /// `|upper-left - conj(lower-right)|` of the averaged estimate.
    pub sym_defect: f64,
    /// `eps / b`, the off-diagonal field magnitude from `l * B = eps`.
    pub l_hat: f64,
    /// Quaternionic norm of the estimate.
    pub q_norm: f64,
}

impl GreenEntry {
    pub fn a(&self) -> Complex64 {
        Complex64::new(self.a_re, self.a_im)
    }

    /// The estimated Green quaternion. The true value maps the upper
    /// quaternionic half-plane to the lower one, so its `b`-part is `-b`.
    pub fn quaternion(&self) -> Quaternion {
        Quaternion::new(self.a(), Complex64::new(-self.b, 0.0))
    }
}

/// Ladder of estimates at one probe point.
#[derive(Debug, Clone, Serialize)]
pub struct GreenEstimate {
    pub z_re: f64,
    pub z_im: f64,
    pub entries: Vec<GreenEntry>,
}

/// Replica matrices with their cached Gram matrices, reused across probe
/// points and epsilons.
pub struct GreenLab {
    spec: EnsembleSpec,
    xs: Vec<Array2<c64>>,
    grams: Vec<Array2<c64>>,
}

impl GreenLab {
    pub fn new(spec: EnsembleSpec) -> Result<Self, EsdError> {
        spec.validate()?;
        let xs: Result<Vec<_>, _> = (0..spec.replicas)
            .into_par_iter()
            .map(|r| build_matrix(&spec, r))
            .collect();
        let xs = xs?;
        let grams: Vec<Array2<c64>> = xs
            .par_iter()
            .map(|x| x.t().mapv(|v| v.conj()).dot(x))
            .collect();
        Ok(GreenLab { spec, xs, grams })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    /// One `(z, eps)` estimate averaged over the replicas.
    pub fn estimate(&self, z: Complex64, eps: f64) -> Result<GreenEntry, EsdError> {
        let n = self.spec.n;
        let zc = c64::new(z.re, z.im);
        let per_replica: Result<Vec<(c64, c64, c64)>, EsdError> = (0..self.spec.replicas)
            .into_par_iter()
            .map(|r| {
                let x = &self.xs[r];
                let gram = &self.grams[r];
                // M = |z|^2 - conj(z) X - z X^* + X^* X + eps^2
                let mut m_mat = gram.clone();
                let zb = zc.conj();
                for i in 0..n {
                    for j in 0..n {
                        m_mat[[i, j]] -= zb * x[[i, j]] + zc * x[[j, i]].conj();
                    }
                }
                let shift = c64::new(z.norm_sqr() + eps * eps, 0.0);
                for i in 0..n {
                    m_mat[[i, i]] += shift;
                }
                let minv = m_mat
                    .invc()
                    .map_err(|e| EsdError::SolveFailed(format!("{e}")))?;
                // tau[Minv Xz*] and tau[Xz Minv], Xz = z - X
                let mut tr_minv = c64::new(0.0, 0.0);
                let mut tr_a = c64::new(0.0, 0.0);
                let mut tr_d = c64::new(0.0, 0.0);
                for i in 0..n {
                    tr_minv += minv[[i, i]];
                    for j in 0..n {
                        let xz_ij = if i == j { zc - x[[i, j]] } else { -x[[i, j]] };
                        // (Xz*)_{ji} = conj(Xz_{ij}) pairs with Minv_{ij}^T... direct sums:
                        tr_a += minv[[i, j]] * xz_ij.conj();
                        tr_d += xz_ij * minv[[j, i]];
                    }
                }
                let inv_n = 1.0 / n as f64;
                Ok((tr_a * inv_n, tr_minv * inv_n * eps, tr_d * inv_n))
            })
            .collect();
        let per_replica = per_replica?;

        let k = per_replica.len() as f64;
        let mean_a = per_replica.iter().map(|v| v.0).sum::<c64>() / k;
        let mean_b = per_replica.iter().map(|v| v.1).sum::<c64>() / k;
        let mean_d = per_replica.iter().map(|v| v.2).sum::<c64>() / k;
        let stderr = |sel: &dyn Fn(&(c64, c64, c64)) -> f64, mean: f64| -> f64 {
            if per_replica.len() < 2 {
                return 0.0;
            }
            let var = per_replica
                .iter()
                .map(|v| {
                    let d = sel(v) - mean;
                    d * d
                })
                .sum::<f64>()
                / (k - 1.0);
            (var / k).sqrt()
        };
        let a_stderr = {
            let sre = stderr(&|v| v.0.re, mean_a.re);
            let sim = stderr(&|v| v.0.im, mean_a.im);
            (sre * sre + sim * sim).sqrt()
        };
        let b_stderr = stderr(&|v| v.1.re, mean_b.re);
        let b_im_stderr = stderr(&|v| v.1.im, mean_b.im);

        let b = mean_b.re;
        let a = Complex64::new(mean_a.re, mean_a.im);
        Ok(GreenEntry {
            eps,
            a_re: a.re,
            a_im: a.im,
            a_stderr,
            b,
            b_stderr,
            b_im: mean_b.im,
            b_im_stderr,
            sym_defect: (mean_a - mean_d.conj()).norm(),
            l_hat: eps / b,
            q_norm: (a.norm_sqr() + b * b).sqrt(),
        })
    }

    pub fn estimate_ladder(
        &self,
        z: Complex64,
        ladder: &[f64],
    ) -> Result<GreenEstimate, EsdError> {
        validate_ladder(ladder)?;
        let entries: Result<Vec<_>, _> =
            ladder.iter().map(|&eps| self.estimate(z, eps)).collect();
        Ok(GreenEstimate {
            z_re: z.re,
            z_im: z.im,
            entries: entries?,
        })
    }
}

pub fn validate_ladder(ladder: &[f64]) -> Result<(), EsdError> {
    if ladder.len() < 3 {
        return Err(EsdError::BadLadder);
    }
    for w in ladder.windows(2) {
        if !(w[1] > 0.0 && w[1] < w[0]) {
            return Err(EsdError::BadLadder);
        }
    }
    if !(ladder[0] > 0.0) {
        return Err(EsdError::BadLadder);
    }
    Ok(())
}

/// Trend classification of a probe point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Interior,
    Exterior,
    BoundaryLike,
    Divergent,
    Unresolved,
}

/// Classification thresholds; configuration data, not constants baked into
/// the decision code.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ClassifyThresholds {
    /// Total quaternion-norm growth across the ladder that counts as
    /// divergence (with monotone growth).
    pub divergence_factor: f64,
    /// Relative variation over the last two rungs that counts as stabilized.
    pub stabilize_tol: f64,
    /// `b` values above this are "away from zero".
    pub b_floor: f64,
    /// `l_hat` values above this are "bounded away from zero".
    pub l_floor: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            divergence_factor: 1.5,
            stabilize_tol: 0.2,
            b_floor: 0.1,
            l_floor: 0.05,
        }
    }
}

/// Trend report for one probe point.
#[derive(Debug, Clone, Serialize)]
pub struct ClassifyReport {
    pub classification: Classification,
    pub growth_total: f64,
    pub growth_monotone: bool,
    pub b_last: f64,
    pub b_rel_change: f64,
    pub l_last: f64,
    pub l_rel_change: f64,
    pub estimate: GreenEstimate,
}

/// Classifies the trends of a ladder estimate:
/// divergent growth of the quaternion norm, stabilization of `b` away from
/// zero (interior), `b -> 0` with `l_hat` bounded away from zero (exterior),
/// or both trending to zero (boundary-like).
pub fn classify(estimate: GreenEstimate, thresholds: &ClassifyThresholds) -> ClassifyReport {
    let e = &estimate.entries;
    let norms: Vec<f64> = e.iter().map(|v| v.q_norm).collect();
    let bs: Vec<f64> = e.iter().map(|v| v.b).collect();
    let ls: Vec<f64> = e.iter().map(|v| v.l_hat).collect();
    let last = e.len() - 1;

    let growth_monotone = norms.windows(2).all(|w| w[1] > w[0]);
    let growth_total = norms[last] / norms[0];
    let b_last = bs[last];
    let b_rel_change = (bs[last] - bs[last - 1]).abs() / bs[last].abs().max(1e-300);
    let l_last = ls[last];
    let l_rel_change = (ls[last] - ls[last - 1]).abs() / ls[last].abs().max(1e-300);
    let b_decreasing = bs[last] < bs[0];
    let l_decreasing = ls[last] < ls[0];

    let classification = if growth_monotone && growth_total >= thresholds.divergence_factor {
        Classification::Divergent
    } else if b_last >= thresholds.b_floor && b_rel_change <= thresholds.stabilize_tol {
        Classification::Interior
    } else if b_decreasing
        && l_rel_change <= thresholds.stabilize_tol
        && l_last >= thresholds.l_floor
    {
        Classification::Exterior
    } else if b_decreasing && l_decreasing {
        Classification::BoundaryLike
    } else {
        Classification::Unresolved
    };

    ClassifyReport {
        classification,
        growth_total,
        growth_monotone,
        b_last,
        b_rel_change,
        l_last,
        l_rel_change,
        estimate,
    }
}

/// Convenience wrapper: estimate a ladder and classify it.
pub fn classify_point(
    lab: &GreenLab,
    z: Complex64,
    ladder: &[f64],
    thresholds: &ClassifyThresholds,
) -> Result<ClassifyReport, EsdError> {
    let est = lab.estimate_ladder(z, ladder)?;
    Ok(classify(est, thresholds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::AtomicMeasure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_spec(alpha: f64, beta: f64, n: usize) -> EnsembleSpec {
        EnsembleSpec {
            mu_p: AtomicMeasure::new(vec![alpha], vec![1.0]).unwrap(),
            mu_q: AtomicMeasure::new(vec![beta], vec![1.0]).unwrap(),
            n,
            seed: 3,
            replicas: 2,
        }
    }

    #[test]
    fn scalar_case_matches_closed_form() {
        // single atoms: X = (alpha + i beta) I exactly, so
        // G(z_eps) = z_eps-shifted closed form with no randomness
        let (alpha, beta) = (0.5, -0.25);
        let lab = GreenLab::new(scalar_spec(alpha, beta, 8)).unwrap();
        let z = c(1.25, 0.5);
        let eps = 0.3;
        let entry = lab.estimate(z, eps).unwrap();
        let d = z - c(alpha, beta);
        let denom = d.norm_sqr() + eps * eps;
        let want_a = d.conj() / denom;
        let want_b = eps / denom;
        assert!((entry.a() - want_a).norm() <= 1e-10);
        assert!((entry.b - want_b).abs() <= 1e-10);
        assert!(entry.b_im.abs() <= 1e-12);
        assert!(entry.sym_defect <= 1e-10);
        // l * b = eps identically
        assert_eq!(entry.l_hat * entry.b, eps);
    }

    #[test]
    fn b_positive_and_symmetry() {
        let spec = EnsembleSpec {
            mu_p: AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap(),
            mu_q: AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap(),
            n: 60,
            seed: 9,
            replicas: 3,
        };
        let lab = GreenLab::new(spec).unwrap();
        for z in [c(0.9, 0.4), c(2.0, 0.0), c(-0.3, 0.8)] {
            for eps in [0.2, 0.05] {
                let e = lab.estimate(z, eps).unwrap();
                assert!(e.b > 0.0);
                assert!(e.b_im.abs() <= 3.0 * e.b_im_stderr.max(1e-12));
                assert!(e.sym_defect <= 1e-9);
                assert_eq!(e.l_hat, eps / e.b);
            }
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&[0.2, 0.1, 0.05]).is_ok());
        assert!(validate_ladder(&[0.2, 0.1]).is_err());
        assert!(validate_ladder(&[0.1, 0.2, 0.3]).is_err());
        assert!(validate_ladder(&[0.2, 0.1, 0.0]).is_err());
    }

    #[test]
    fn classify_synthetic_trends() {
        let th = ClassifyThresholds::default();
        let mk = |rows: &[(f64, f64, f64)]| GreenEstimate {
            z_re: 0.0,
            z_im: 0.0,
            entries: rows
                .iter()
                .map(|&(eps, a, b)| GreenEntry {
                    eps,
                    a_re: a,
                    a_im: 0.0,
                    a_stderr: 0.0,
                    b,
                    b_stderr: 0.0,
                    b_im: 0.0,
                    b_im_stderr: 0.0,
                    sym_defect: 0.0,
                    l_hat: eps / b,
                    q_norm: (a * a + b * b).sqrt(),
                })
                .collect(),
        };
        // interior: b stabilizes near 1
        let r = classify(
            mk(&[(0.2, 0.5, 0.9), (0.1, 0.5, 0.98), (0.05, 0.5, 1.0), (0.02, 0.5, 1.01), (0.01, 0.5, 1.0)]),
            &th,
        );
        assert_eq!(r.classification, Classification::Interior);
        // exterior: b ~ eps / 2
        let r = classify(
            mk(&[(0.2, 0.5, 0.1), (0.1, 0.5, 0.05), (0.05, 0.5, 0.025), (0.02, 0.5, 0.01), (0.01, 0.5, 0.005)]),
            &th,
        );
        assert_eq!(r.classification, Classification::Exterior);
        // divergent: norms grow monotonically by > 1.5 total
        let r = classify(
            mk(&[(0.2, 1.0, 1.0), (0.1, 1.4, 1.4), (0.05, 2.0, 2.0), (0.02, 3.1, 3.1), (0.01, 4.4, 4.4)]),
            &th,
        );
        assert_eq!(r.classification, Classification::Divergent);
        // boundary-like: b ~ sqrt(eps), l ~ sqrt(eps), both to 0, norm not monotone
        let r = classify(
            mk(&[(0.2, 0.01, 0.45), (0.1, 0.01, 0.32), (0.05, 0.01, 0.22), (0.02, 0.01, 0.14), (0.01, 0.01, 0.1)]),
            &th,
        );
        assert_eq!(r.classification, Classification::BoundaryLike);
    }
}
