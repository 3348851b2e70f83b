//! Finitely atomic probability measures on the real line and their complex
//! Green's (Cauchy) transforms.
//!
//! `G_mu(z) = sum_i a_i / (z - alpha_i)` is the workhorse of the Omega solver;
//! its preimages are found by clearing denominators into a degree-n polynomial
//! and running Aberth-Ehrlich simultaneous iteration, with a final Newton
//! polish against `G` itself.

use num_complex::Complex64;
use thiserror::Error;

use crate::rational::GaussRational;
use num_rational::BigRational;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("measure needs at least one atom")]
    Empty,
    #[error("atoms/weights length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("weight {0} is negative")]
    NegativeWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    WeightSum(f64),
    #[error("z = {0} is at an atom (pole of the transform)")]
    AtomPole(Complex64),
    #[error("w = 0 is the pole at infinity; preimages undefined")]
    ZeroTarget,
    #[error("root finder failed to converge: worst residual {0:.3e}")]
    RootsDiverged(f64),
}

/// Atomic probability measure, optionally carrying exact rational data.
///
/// Weights constructed from rationals keep the exact values alongside the
/// float views; the curve pipeline insists on them, the numeric paths never
/// look at them. Duplicate atom positions are allowed.
#[derive(Debug, Clone)]
pub struct AtomicMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
    exact: Option<(Vec<BigRational>, Vec<BigRational>)>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        if atoms.len() != weights.len() {
            return Err(MeasureError::LengthMismatch(atoms.len(), weights.len()));
        }
        for &w in &weights {
            if w < 0.0 {
                return Err(MeasureError::NegativeWeight(w));
            }
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(MeasureError::WeightSum(s));
        }
        Ok(AtomicMeasure {
            atoms,
            weights,
            exact: None,
        })
    }

    /// Exact-rational constructor; weights must sum to exactly one.
    pub fn from_rationals(
        atoms: Vec<BigRational>,
        weights: Vec<BigRational>,
    ) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        if atoms.len() != weights.len() {
            return Err(MeasureError::LengthMismatch(atoms.len(), weights.len()));
        }
        let mut sum = BigRational::from_integer(0.into());
        for w in &weights {
            if w < &BigRational::from_integer(0.into()) {
                return Err(MeasureError::NegativeWeight(crate::rational::to_f64(w)));
            }
            sum += w;
        }
        if sum != BigRational::from_integer(1.into()) {
            return Err(MeasureError::WeightSum(crate::rational::to_f64(&sum)));
        }
        let af: Vec<f64> = atoms.iter().map(crate::rational::to_f64).collect();
        let wf: Vec<f64> = weights.iter().map(crate::rational::to_f64).collect();
        Ok(AtomicMeasure {
            atoms: af,
            weights: wf,
            exact: Some((atoms, weights)),
        })
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Exact atoms/weights when the measure was built from rationals.
    pub fn exact(&self) -> Option<(&[BigRational], &[BigRational])> {
        self.exact.as_ref().map(|(a, w)| (&a[..], &w[..]))
    }

    /// Exact atoms as Gaussian rationals (real), for the curve pipeline.
    pub fn exact_gauss(&self) -> Option<(Vec<GaussRational>, Vec<GaussRational>)> {
        self.exact.as_ref().map(|(a, w)| {
            (
                a.iter().map(|r| GaussRational::from_rational(r.clone())).collect(),
                w.iter().map(|r| GaussRational::from_rational(r.clone())).collect(),
            )
        })
    }

    /// Largest atom magnitude, the operator norm of the multiplication operator.
    pub fn sup_norm(&self) -> f64 {
        self.atoms.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }
}

/// Complex Green's function `G_mu(z) = sum a_i / (z - alpha_i)`.
pub fn cauchy(mu: &AtomicMeasure, z: Complex64) -> Result<Complex64, MeasureError> {
    for &a in mu.atoms() {
        if (z - a).norm() <= 1e-14 {
            return Err(MeasureError::AtomPole(z));
        }
    }
    let mut s = Complex64::new(0.0, 0.0);
    for (&a, &w) in mu.atoms().iter().zip(mu.weights()) {
        s += w / (z - a);
    }
    Ok(s)
}

/// Merges duplicate atom positions (within `1e-14`), summing weights.
fn merged(mu: &AtomicMeasure) -> (Vec<f64>, Vec<f64>) {
    let mut atoms: Vec<f64> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (&a, &w) in mu.atoms().iter().zip(mu.weights()) {
        if let Some(k) = atoms.iter().position(|&b| (b - a).abs() <= 1e-14) {
            weights[k] += w;
        } else {
            atoms.push(a);
            weights.push(w);
        }
    }
    (atoms, weights)
}

/// All solutions of `G_mu(zeta) = w`.
///
/// Duplicated atoms are merged first (they would create spurious roots of the
/// cleared polynomial at the poles), so the count equals the number of
/// distinct atoms. Every returned root is Newton-polished against `G`
/// directly and satisfies `|G(zeta) - w| <= 1e-8`.
pub fn cauchy_preimages(mu: &AtomicMeasure, w: Complex64) -> Result<Vec<Complex64>, MeasureError> {
    if w.norm() <= 1e-14 {
        return Err(MeasureError::ZeroTarget);
    }
    let (atoms, weights) = merged(mu);
    let n = atoms.len();

    // Cleared polynomial  w * prod(z - a_i) - sum_i w_i prod_{s != i} (z - a_s),
    // coefficients in ascending degree order.
    let mut coeffs = poly_from_roots(&atoms);
    for c in coeffs.iter_mut() {
        *c *= w;
    }
    for i in 0..n {
        let others: Vec<f64> = atoms
            .iter()
            .enumerate()
            .filter(|&(s, _)| s != i)
            .map(|(_, &a)| a)
            .collect();
        let part = poly_from_roots(&others);
        for (c, p) in coeffs.iter_mut().zip(part.iter()) {
            *c -= weights[i] * p;
        }
    }

    let mut roots = aberth_ehrlich(&coeffs)?;

    // Newton polish on the rational function itself.
    let mut worst = 0.0f64;
    for r in roots.iter_mut() {
        for _ in 0..40 {
            let gv = match cauchy_at(&atoms, &weights, *r) {
                Some(v) => v,
                None => break,
            };
            let f = gv - w;
            if f.norm() <= 1e-13 * w.norm().max(1.0) {
                break;
            }
            let d = cauchy_derivative_at(&atoms, &weights, *r);
            if d.norm() < 1e-300 {
                break;
            }
            *r -= f / d;
        }
        let res = cauchy_at(&atoms, &weights, *r)
            .map(|v| (v - w).norm())
            .unwrap_or(f64::INFINITY);
        worst = worst.max(res);
    }
    if worst > 1e-8 * w.norm().max(1.0) {
        return Err(MeasureError::RootsDiverged(worst));
    }
    Ok(roots)
}

fn cauchy_at(atoms: &[f64], weights: &[f64], z: Complex64) -> Option<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (&a, &w) in atoms.iter().zip(weights) {
        let d = z - a;
        if d.norm() < 1e-300 {
            return None;
        }
        s += w / d;
    }
    Some(s)
}

fn cauchy_derivative_at(atoms: &[f64], weights: &[f64], z: Complex64) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (&a, &w) in atoms.iter().zip(weights) {
        let d = z - a;
        s -= w / (d * d);
    }
    s
}

/// Monic expansion of `prod (z - r_i)`, ascending coefficients, length n+1.
fn poly_from_roots(roots: &[f64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); roots.len() + 1];
    c[0] = Complex64::new(1.0, 0.0);
    let mut deg = 0usize;
    for &r in roots {
        deg += 1;
        for k in (1..=deg).rev() {
            let lower = c[k - 1];
            c[k] = lower - r * c[k];
        }
        c[0] *= -r;
    }
    c
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Aberth-Ehrlich simultaneous root iteration. `coeffs` ascending, leading
/// coefficient nonzero, degree >= 1.
fn aberth_ehrlich(coeffs: &[Complex64]) -> Result<Vec<Complex64>, MeasureError> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let deriv: Vec<Complex64> = (1..=n).map(|k| coeffs[k] * k as f64).collect();

    // Initial guesses on a circle sized by the Cauchy bound, slightly
    // irrational angle offset so symmetric configurations do not stall.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0f64, f64::max);
    let center = -coeffs[n - 1] / (lead * n as f64);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.354) / n as f64 + 0.7;
            center + Complex64::from_polar(radius, th)
        })
        .collect();

    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let z = roots[i];
            let p = poly_eval(coeffs, z);
            let dp = poly_eval(&deriv, z);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { p };
            let mut rep = Complex64::new(0.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    let d = z - zj;
                    if d.norm() > 1e-14 {
                        rep += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * rep;
            let step = if denom.norm() > 1e-14 {
                newton / denom
            } else {
                newton
            };
            roots[i] = z - step;
            moved = moved.max(step.norm());
        }
        worst = moved;
        if moved <= 1e-14 * radius.max(1.0) {
            break;
        }
    }
    if !worst.is_finite() {
        return Err(MeasureError::RootsDiverged(worst));
    }
    Ok(roots)
}

/// Deterministic eigenvalue multiset for a diagonal model of size `n`:
/// largest-remainder rounding of `n * a_i`, ties broken by atom index.
pub fn sample_matrix_spectrum(mu: &AtomicMeasure, n: usize) -> Vec<f64> {
    assert!(n >= 1, "matrix size must be at least 1");
    let k = mu.len();
    let mut counts: Vec<usize> = Vec::with_capacity(k);
    let mut fracs: Vec<(usize, f64)> = Vec::with_capacity(k);
    let mut used = 0usize;
    for (i, &w) in mu.weights().iter().enumerate() {
        let exact = w * n as f64;
        let fl = exact.floor();
        counts.push(fl as usize);
        used += fl as usize;
        fracs.push((i, exact - fl));
    }
    // stable sort keeps atom order on ties; descending fractional part
    fracs.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for &(i, _) in fracs.iter().take(n - used) {
        counts[i] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for (i, &c) in counts.iter().enumerate() {
        out.extend(std::iter::repeat(mu.atoms()[i]).take(c));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_half() -> AtomicMeasure {
        AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn cauchy_examples() {
        let mu = half_half();
        assert!((cauchy(&mu, c(2.0, 0.0)).unwrap() - c(2.0 / 3.0, 0.0)).norm() <= 1e-15);
        assert!((cauchy(&mu, c(0.0, 1.0)).unwrap() - c(0.0, -0.5)).norm() <= 1e-15);
        let d0 = AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap();
        assert!((cauchy(&d0, c(5.0, 0.0)).unwrap() - c(0.2, 0.0)).norm() <= 1e-15);
        assert!(cauchy(&mu, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn cauchy_symmetries() {
        let mu = AtomicMeasure::new(vec![-1.5, 0.25, 2.0], vec![0.2, 0.5, 0.3]).unwrap();
        let mut s = 11u64;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for _ in 0..200 {
            let z = c(next(), next());
            if z.im.abs() < 1e-3 {
                continue;
            }
            let g = cauchy(&mu, z).unwrap();
            let gc = cauchy(&mu, z.conj()).unwrap();
            assert!((gc - g.conj()).norm() <= 1e-13);
            if z.im > 0.0 {
                assert!(g.im < 0.0, "upper half-plane must map to lower");
            }
        }
        // z G(z) -> 1 at |z| = 1e6
        let z = c(1e6, 0.3);
        let g = cauchy(&mu, z).unwrap();
        assert!((z * g - c(1.0, 0.0)).norm() <= 1e-5);
    }

    #[test]
    fn preimage_examples() {
        let d0 = AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap();
        let r = cauchy_preimages(&d0, c(0.5, 0.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0, 0.0)).norm() <= 1e-12);

        let mu = half_half();
        let mut r = cauchy_preimages(&mu, c(1.0, 0.0)).unwrap();
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        assert_eq!(r.len(), 2);
        assert!((r[0] - c(1.0 - phi, 0.0)).norm() <= 1e-10);
        assert!((r[1] - c(phi, 0.0)).norm() <= 1e-10);

        assert!(cauchy_preimages(&mu, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn preimage_round_trip_and_permutation() {
        let mu = AtomicMeasure::new(vec![-2.0, -0.5, 1.0, 3.0], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        let perm =
            AtomicMeasure::new(vec![3.0, -0.5, -2.0, 1.0], vec![0.2, 0.4, 0.1, 0.3]).unwrap();
        let mut s = 5u64;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..50 {
            let w = c(next(), next());
            if w.norm() < 0.05 {
                continue;
            }
            let roots = cauchy_preimages(&mu, w).unwrap();
            assert_eq!(roots.len(), 4);
            for &r in &roots {
                assert!((cauchy(&mu, r).unwrap() - w).norm() <= 1e-8);
            }
            let mut a: Vec<(f64, f64)> = roots.iter().map(|z| (z.re, z.im)).collect();
            let mut b: Vec<(f64, f64)> = cauchy_preimages(&perm, w)
                .unwrap()
                .iter()
                .map(|z| (z.re, z.im))
                .collect();
            let key = |p: &(f64, f64)| (p.0, p.1);
            a.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            b.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
            for (x, y) in a.iter().zip(&b) {
                assert!((x.0 - y.0).abs() <= 1e-8 && (x.1 - y.1).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn spectrum_rounding() {
        let mu = AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let s = sample_matrix_spectrum(&mu, 4);
        assert_eq!(s, vec![0.0, 0.0, 1.0, 1.0]);

        let thirds = AtomicMeasure::new(
            vec![-1.0, 0.0, 1.0],
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        )
        .unwrap();
        let s = sample_matrix_spectrum(&thirds, 10);
        assert_eq!(s.len(), 10);
        for v in [-1.0, 0.0, 1.0] {
            let cnt = s.iter().filter(|&&x| x == v).count();
            assert!(cnt == 3 || cnt == 4, "count {cnt} for atom {v}");
        }

        let mu = AtomicMeasure::new(vec![5.0, 7.0], vec![0.4, 0.6]).unwrap();
        assert_eq!(sample_matrix_spectrum(&mu, 1), vec![7.0]);
    }

    #[test]
    fn validation_errors() {
        assert!(AtomicMeasure::new(vec![], vec![]).is_err());
        assert!(AtomicMeasure::new(vec![0.0], vec![0.9]).is_err());
        assert!(AtomicMeasure::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
    }
}
