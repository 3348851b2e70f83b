//! Numerical tracing of the boundary set: the points `z = x + iy` admitting
//! `g` off the real and imaginary axes and real `m` with
//!
//! ```text
//! G_p(x + m/g) = g        G_q(y + (1 - m)/(ig)) = ig .
//! ```
//!
//! The first realness condition determines `m` (and `x`) in closed form per
//! preimage branch of `G_p`, collapsing the search to zero contours of one
//! real residual over a 2-D grid in the `g`-plane. Contours are located by
//! sign changes on grid edges (marching-squares style) and refined by
//! bisection, with preimage branches carried between nodes by
//! nearest-neighbor continuation.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::curve::{CurveError, CurveResult, CurveScorer};
use crate::measure::{cauchy, cauchy_preimages, AtomicMeasure, MeasureError};

#[derive(Debug, Error)]
pub enum OmegaError {
    #[error("g within the guard band of the real or imaginary axis")]
    GuardBand,
    #[error("preimage branch {0} out of range ({1} branches)")]
    BranchOutOfRange(usize, usize),
    #[error("preimage solve failed: {0}")]
    Preimage(#[from] MeasureError),
    #[error("curve is degenerate: {0}")]
    Curve(#[from] CurveError),
    #[error("grid resolution below 8 per axis")]
    GridTooCoarse,
    #[error("grid tolerance must be positive")]
    BadTolerance,
}

/// Rectangle and resolution of the `g`-plane sweep.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Residual tolerance for a converged crossing.
    pub tol: f64,
    /// Exclusion band around the real and imaginary axes.
    pub guard: f64,
    /// Root-continuation jump threshold, in units of the local root spread.
    pub jump_factor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            re_range: (-3.0, 3.0),
            im_range: (-3.0, 3.0),
            nx: 400,
            ny: 400,
            tol: 1e-11,
            guard: 1e-6,
            jump_factor: 0.5,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), OmegaError> {
        if self.nx < 8 || self.ny < 8 {
            return Err(OmegaError::GridTooCoarse);
        }
        if !(self.tol > 0.0) {
            return Err(OmegaError::BadTolerance);
        }
        Ok(())
    }
}

/// A solved boundary point with its certificate.
#[derive(Debug, Clone)]
pub struct OmegaWitness {
    pub z: Complex64,
    pub g: Complex64,
    pub m: f64,
    /// Max realness defect of the two defining equations at the witness.
    pub residual: f64,
    pub branch_j: usize,
    pub branch_l: usize,
    /// Set when branch continuation in the originating cell was ambiguous.
    pub flagged: bool,
}

/// Preimage data at one `g`-plane node: `G_p` preimages of `g`, `G_q`
/// preimages of `ig`, and the per-branch `(m, x)` solving the first realness
/// condition.
#[derive(Debug, Clone)]
struct NodeData {
    zetas: Vec<Complex64>,
    xis: Vec<Complex64>,
    ms: Vec<f64>,
}

fn canonical_sort(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
}

fn node_data(mu_p: &AtomicMeasure, mu_q: &AtomicMeasure, g: Complex64) -> Option<NodeData> {
    let mut zetas = cauchy_preimages(mu_p, g).ok()?;
    let ig = Complex64::new(0.0, 1.0) * g;
    let mut xis = cauchy_preimages(mu_q, ig).ok()?;
    canonical_sort(&mut zetas);
    canonical_sort(&mut xis);
    let inv_g = 1.0 / g;
    if inv_g.im == 0.0 {
        return None;
    }
    let ms: Vec<f64> = zetas.iter().map(|z| z.im / inv_g.im).collect();
    Some(NodeData { zetas, xis, ms })
}

/// The unique real `m` (and the resulting real `x`) making
/// `x + m/g` equal to the `j`-th canonical preimage of `g` under `G_p`.
pub fn m_from_g(
    mu_p: &AtomicMeasure,
    g: Complex64,
    branch_j: usize,
) -> Result<(f64, f64), OmegaError> {
    if g.im.abs() <= 1e-12 {
        return Err(OmegaError::GuardBand);
    }
    let mut zetas = cauchy_preimages(mu_p, g)?;
    canonical_sort(&mut zetas);
    let zeta = *zetas
        .get(branch_j)
        .ok_or(OmegaError::BranchOutOfRange(branch_j, zetas.len()))?;
    let inv_g = 1.0 / g;
    let m = zeta.im / inv_g.im;
    Ok((m, (zeta - m * inv_g).re))
}

/// Signed realness defect of the second equation at `g` for preimage
/// branches `(j, l)` in canonical order.
pub fn omega_residual(
    mu_p: &AtomicMeasure,
    mu_q: &AtomicMeasure,
    g: Complex64,
    branch_j: usize,
    branch_l: usize,
) -> Result<f64, OmegaError> {
    if g.im.abs() <= 1e-12 || g.re.abs() <= 1e-12 {
        return Err(OmegaError::GuardBand);
    }
    let (m, _x) = m_from_g(mu_p, g, branch_j)?;
    let ig = Complex64::new(0.0, 1.0) * g;
    let mut xis = cauchy_preimages(mu_q, ig)?;
    canonical_sort(&mut xis);
    let xi = *xis
        .get(branch_l)
        .ok_or(OmegaError::BranchOutOfRange(branch_l, xis.len()))?;
    Ok((xi - (1.0 - m) / ig).im)
}

fn residual_for(xi: Complex64, m: f64, g: Complex64) -> f64 {
    let ig = Complex64::new(0.0, 1.0) * g;
    (xi - (1.0 - m) / ig).im
}

/// Matches `target` roots to the reference order: greedy nearest-neighbor.
/// Returns `None` (ambiguous) when a jump exceeds `jump_factor` times the
/// local spread of the reference roots.
fn match_roots(
    reference: &[Complex64],
    target: &[Complex64],
    jump_factor: f64,
) -> Option<Vec<usize>> {
    let n = reference.len();
    if target.len() != n {
        return None;
    }
    let spread = if n > 1 {
        let mut s = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                s = s.max((reference[i] - reference[j]).norm());
            }
        }
        s.max(1e-9)
    } else {
        f64::INFINITY
    };
    let mut used = vec![false; n];
    let mut perm = vec![0usize; n];
    for (i, r) in reference.iter().enumerate() {
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (j, t) in target.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (r - t).norm();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        if best == usize::MAX || (n > 1 && best_d > jump_factor * spread) {
            return None;
        }
        used[best] = true;
        perm[i] = best;
    }
    Some(perm)
}

/// One refined crossing: bisects along the segment `[ga, gb]` tracking the
/// `(j, l)` branches by continuation from the `a`-side anchors.
#[allow(clippy::too_many_arguments)]
fn refine_crossing(
    mu_p: &AtomicMeasure,
    mu_q: &AtomicMeasure,
    ga: Complex64,
    gb: Complex64,
    anchor_zeta: Complex64,
    anchor_xi: Complex64,
    mut fa: f64,
    mut fb: f64,
    spec: &GridSpec,
    flagged: bool,
) -> Option<OmegaWitness> {
    let mut lo = ga;
    let mut hi = gb;
    let mut zeta_ref = anchor_zeta;
    let mut xi_ref = anchor_xi;
    let mut best: Option<(Complex64, Complex64, Complex64, f64, f64)> = None;

    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let mut zetas = cauchy_preimages(mu_p, mid).ok()?;
        let ig = Complex64::new(0.0, 1.0) * mid;
        let mut xis = cauchy_preimages(mu_q, ig).ok()?;
        canonical_sort(&mut zetas);
        canonical_sort(&mut xis);
        let zj = *zetas
            .iter()
            .min_by(|a, b| {
                (*a - zeta_ref)
                    .norm()
                    .partial_cmp(&(*b - zeta_ref).norm())
                    .unwrap()
            })?;
        let xl = *xis
            .iter()
            .min_by(|a, b| {
                (*a - xi_ref).norm().partial_cmp(&(*b - xi_ref).norm()).unwrap()
            })?;
        let inv = 1.0 / mid;
        if inv.im == 0.0 {
            return None;
        }
        let m = zj.im / inv.im;
        let f = residual_for(xl, m, mid);
        if best.map(|b| f.abs() < b.4.abs()).unwrap_or(true) {
            best = Some((mid, zj, xl, m, f));
        }
        // bisect all the way down: the witness position can be orders of
        // magnitude more sensitive than the residual near the arc ends
        if (f > 0.0) == (fa > 0.0) {
            lo = mid;
            fa = f;
        } else {
            hi = mid;
            fb = f;
        }
        let _ = fb;
        zeta_ref = zj;
        xi_ref = xl;
        if (hi - lo).norm() <= 1e-14 * (1.0 + mid.norm()) {
            break;
        }
    }

    let (g, zeta, xi, m, f) = best?;
    if f.abs() > spec.tol.max(1e-10) {
        return None;
    }
    // witness m stays away from {0, 1}
    if m.abs() <= 1e-9 || (m - 1.0).abs() <= 1e-9 {
        return None;
    }
    let inv = 1.0 / g;
    let x = (zeta - m * inv).re;
    let ig = Complex64::new(0.0, 1.0) * g;
    let y = (xi - (1.0 - m) / ig).re;
    let z = Complex64::new(x, y);

    // final self-check of both defining equations
    let r1 = cauchy(mu_p, Complex64::new(x, 0.0) + m * inv)
        .map(|v| (v - g).norm())
        .unwrap_or(f64::INFINITY);
    let r2 = cauchy(mu_q, Complex64::new(y, 0.0) + (1.0 - m) / ig)
        .map(|v| (v - ig).norm())
        .unwrap_or(f64::INFINITY);
    if r1 > 1e-8 || r2 > 1e-8 {
        return None;
    }

    Some(OmegaWitness {
        z,
        g,
        m,
        residual: f.abs().max(r1).max(r2),
        branch_j: 0, // labels filled by the caller
        branch_l: 0,
        flagged,
    })
}

/// Sweeps the grid and emits every refined contour crossing as a witness.
/// An empty result is a legitimate outcome (scalar-like configurations).
pub fn trace_omega(
    mu_p: &AtomicMeasure,
    mu_q: &AtomicMeasure,
    spec: &GridSpec,
) -> Result<Vec<OmegaWitness>, OmegaError> {
    spec.validate()?;
    let (re_lo, re_hi) = spec.re_range;
    let (im_lo, im_hi) = spec.im_range;
    let dx = (re_hi - re_lo) / (spec.nx - 1) as f64;
    let dy = (im_hi - im_lo) / (spec.ny - 1) as f64;

    let g_at = |i: usize, j: usize| Complex64::new(re_lo + i as f64 * dx, im_lo + j as f64 * dy);
    let admissible =
        |g: Complex64| g.re.abs() > spec.guard && g.im.abs() > spec.guard;

    // per-node preimage data, rows in parallel
    let nodes: Vec<Vec<Option<NodeData>>> = (0..spec.ny)
        .into_par_iter()
        .map(|j| {
            (0..spec.nx)
                .map(|i| {
                    let g = g_at(i, j);
                    if admissible(g) {
                        node_data(mu_p, mu_q, g)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    // every horizontal and vertical edge, rows in parallel
    let mut witnesses: Vec<OmegaWitness> = (0..spec.ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut out: Vec<OmegaWitness> = Vec::new();
            for i in 0..spec.nx {
                for (di, dj) in [(1usize, 0usize), (0, 1)] {
                    let (i2, j2) = (i + di, j + dj);
                    if i2 >= spec.nx || j2 >= spec.ny {
                        continue;
                    }
                    let (a, b) = (&nodes[j][i], &nodes[j2][i2]);
                    let (Some(a), Some(b)) = (a, b) else { continue };
                    let ga = g_at(i, j);
                    let gb = g_at(i2, j2);
                    process_edge(mu_p, mu_q, ga, gb, a, b, spec, &mut out);
                }
            }
            out
        })
        .collect();

    // canonical ordering: branch pair, then position along the contour
    witnesses.sort_by(|a, b| {
        (a.branch_j, a.branch_l)
            .cmp(&(b.branch_j, b.branch_l))
            .then(a.g.re.partial_cmp(&b.g.re).unwrap())
            .then(a.g.im.partial_cmp(&b.g.im).unwrap())
    });
    Ok(witnesses)
}

#[allow(clippy::too_many_arguments)]
fn process_edge(
    mu_p: &AtomicMeasure,
    mu_q: &AtomicMeasure,
    ga: Complex64,
    gb: Complex64,
    a: &NodeData,
    b: &NodeData,
    spec: &GridSpec,
    out: &mut Vec<OmegaWitness>,
) {
    // axis between the endpoints: skip, contours are picked up on the far side
    if (ga.re > 0.0) != (gb.re > 0.0) || (ga.im > 0.0) != (gb.im > 0.0) {
        return;
    }
    let mut flagged = false;
    let (perm_z, perm_x) = match (
        match_roots(&a.zetas, &b.zetas, spec.jump_factor),
        match_roots(&a.xis, &b.xis, spec.jump_factor),
    ) {
        (Some(pz), Some(px)) => (pz, px),
        _ => {
            // one midpoint subdivision, then give up but mark the attempt
            let mid = 0.5 * (ga + gb);
            let Some(mdata) = node_data(mu_p, mu_q, mid) else {
                return;
            };
            let half1 = (
                match_roots(&a.zetas, &mdata.zetas, spec.jump_factor),
                match_roots(&a.xis, &mdata.xis, spec.jump_factor),
            );
            let half2 = (
                match_roots(&mdata.zetas, &b.zetas, spec.jump_factor),
                match_roots(&mdata.xis, &b.xis, spec.jump_factor),
            );
            match (half1, half2) {
                ((Some(pz1), Some(px1)), (Some(pz2), Some(px2))) => {
                    flagged = true;
                    let pz: Vec<usize> = pz1.iter().map(|&k| pz2[k]).collect();
                    let px: Vec<usize> = px1.iter().map(|&k| px2[k]).collect();
                    (pz, px)
                }
                _ => return,
            }
        }
    };

    for j in 0..a.zetas.len() {
        for l in 0..a.xis.len() {
            let fa = residual_for(a.xis[l], a.ms[j], ga);
            let fb = residual_for(b.xis[perm_x[l]], b.ms[perm_z[j]], gb);
            if !fa.is_finite() || !fb.is_finite() {
                continue;
            }
            if (fa > 0.0) == (fb > 0.0) {
                continue;
            }
            if let Some(mut w) = refine_crossing(
                mu_p,
                mu_q,
                ga,
                gb,
                a.zetas[j],
                a.xis[l],
                fa,
                fb,
                spec,
                flagged,
            ) {
                w.branch_j = j;
                w.branch_l = l;
                out.push(w);
            }
        }
    }
}

/// Cross-validation report of witnesses against the exact curve.
#[derive(Debug, Clone)]
pub struct CurveCheckReport {
    pub scores: Vec<f64>,
    pub max_score: f64,
    pub mean_score: f64,
}

/// Normalized `|f|` vanishing scores of every witness on the exact curve.
pub fn verify_against_curve(
    witnesses: &[OmegaWitness],
    curve: &CurveResult,
) -> Result<CurveCheckReport, OmegaError> {
    let scorer = CurveScorer::new(curve).map_err(OmegaError::Curve)?;
    let mut scores = Vec::with_capacity(witnesses.len());
    for w in witnesses {
        scores.push(scorer.score(w.z).map_err(OmegaError::Curve)?);
    }
    let max_score = scores.iter().cloned().fold(0.0f64, f64::max);
    let mean_score = if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    };
    Ok(CurveCheckReport {
        scores,
        max_score,
        mean_score,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn m_from_g_single_atom() {
        // mu = delta_0: zeta = 1/g, m = 1, x = 0
        let mu = AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap();
        let (m, x) = m_from_g(&mu, c(0.4, 0.7), 0).unwrap();
        assert!((m - 1.0).abs() <= 1e-12);
        assert!(x.abs() <= 1e-12);
    }

    #[test]
    fn m_from_g_realness() {
        let mu = AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let g = c(0.2, 0.3);
        for j in 0..2 {
            let (m, x) = m_from_g(&mu, g, j).unwrap();
            // x + m/g equals the branch preimage: imaginary part of the
            // difference from a B-branch value is zero by construction
            let v = c(x, 0.0) + m / g;
            let gv = cauchy(&mu, v).unwrap();
            assert!((gv - g).norm() <= 1e-10);
        }
        assert!(m_from_g(&mu, c(0.5, 0.0), 0).is_err());
        assert!(matches!(
            m_from_g(&mu, g, 5),
            Err(OmegaError::BranchOutOfRange(5, 2))
        ));
    }

    #[test]
    fn residual_guard_and_degenerate_config() {
        let d0 = AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap();
        assert!(omega_residual(&d0, &d0, c(0.5, 0.0), 0, 0).is_err());
        // delta_0 / delta_0: scalar operator, no zero crossings off the axes
        let spec = GridSpec {
            nx: 60,
            ny: 60,
            ..GridSpec::default()
        };
        let ws = trace_omega(&d0, &d0, &spec).unwrap();
        assert!(ws.is_empty(), "got {} witnesses", ws.len());
    }

    #[test]
    fn two_atom_witnesses_on_hyperbola() {
        let mu_p = AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let mu_q = AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let pair = crate::two_atom::TwoAtomPair::new(-1.0, 1.0, 0.5, 0.0, 1.0, 0.5).unwrap();
        let spec = GridSpec {
            nx: 160,
            ny: 160,
            ..GridSpec::default()
        };
        let ws = trace_omega(&mu_p, &mu_q, &spec).unwrap();
        assert!(ws.len() > 100, "only {} witnesses", ws.len());
        for w in &ws {
            assert!(w.residual <= 1e-8);
            assert!(
                pair.hyperbola_residual(w.z).abs() <= 1e-8,
                "hyperbola defect {} at {}",
                pair.hyperbola_residual(w.z),
                w.z
            );
            assert!(pair.rect_membership(w.z, true), "z = {}", w.z);
            assert!(w.m.abs() > 1e-9 && (w.m - 1.0).abs() > 1e-9);
        }
    }

    #[test]
    fn grid_stability_under_refinement() {
        // doubling the resolution keeps (and extends) the contour: every
        // coarse witness has a nearby fine witness
        let mu_p = AtomicMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        let mu_q = AtomicMeasure::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        let coarse = GridSpec {
            nx: 80,
            ny: 80,
            ..GridSpec::default()
        };
        let fine = GridSpec {
            nx: 160,
            ny: 160,
            ..GridSpec::default()
        };
        let wc = trace_omega(&mu_p, &mu_q, &coarse).unwrap();
        let wf = trace_omega(&mu_p, &mu_q, &fine).unwrap();
        assert!(wf.len() >= wc.len());
        for w in &wc {
            let nearest = wf
                .iter()
                .map(|v| (v.z - w.z).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 0.1, "lost witness at {}", w.z);
        }
    }

    #[test]
    fn grid_validation() {
        let d0 = AtomicMeasure::new(vec![0.0], vec![1.0]).unwrap();
        let bad = GridSpec {
            nx: 4,
            ..GridSpec::default()
        };
        assert!(trace_omega(&d0, &d0, &bad).is_err());
    }
}
