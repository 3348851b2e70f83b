//! The boundary-curve pipeline: from a pair of rational atomic measures to
//! the exact two-variable polynomial whose zero set contains the traced
//! boundary set.
//!
//! Steps, all exact over the Gaussian rationals:
//!   1. build the polynomial system in `(g, m, x, y)`,
//!   2. eliminate `g` by a Sylvester resultant (`f1`),
//!   3. divide `f1` by `m^(n-1) (m-1)^(k-1)` (`f2`; a nonzero remainder is a
//!      contract violation and is reported, never patched over),
//!   4. split `f2` into real and imaginary coefficient parts,
//!   5. eliminate `m` by a second resultant, giving the real curve `f(x, y)`.
//!
//! Degenerate outcomes (identically zero split parts or final resultant) are
//! first-class results: the guarantee of a nonzero answer only holds off a
//! measure-zero set of configurations, so the pipeline reports rather than
//! fails.

use num_complex::Complex64;
use thiserror::Error;

use crate::measure::AtomicMeasure;
use crate::poly::{GaussPoly, Var};
use crate::rational::GaussRational;
use crate::resultant::{resultant, ResultantError};

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("curve pipeline requires exact rational measures")]
    NonRationalMeasure,
    #[error("division by m^(n-1)(m-1)^(k-1) left a nonzero remainder: {0} terms")]
    DivisibilityViolation(usize),
    #[error("resultant failed: {0}")]
    Resultant(#[from] ResultantError),
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
    #[error("final polynomial has nonreal coefficients")]
    NonRealCurve,
}

/// Exact-rational configuration for the pipeline.
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub mu_p: AtomicMeasure,
    pub mu_q: AtomicMeasure,
}

impl CurveConfig {
    pub fn new(mu_p: AtomicMeasure, mu_q: AtomicMeasure) -> Result<Self, CurveError> {
        if mu_p.exact().is_none() || mu_q.exact().is_none() {
            return Err(CurveError::NonRationalMeasure);
        }
        Ok(CurveConfig { mu_p, mu_q })
    }

    pub fn n(&self) -> usize {
        self.mu_p.len()
    }

    pub fn k(&self) -> usize {
        self.mu_q.len()
    }
}

/// Everything the pipeline produced, with degeneracy flags.
#[derive(Debug, Clone)]
pub struct CurveResult {
    pub f1: GaussPoly,
    pub f2: GaussPoly,
    pub re_f2: GaussPoly,
    pub im_f2: GaussPoly,
    /// Final curve; `None` when a degeneracy stopped step 4.
    pub f: Option<GaussPoly>,
    pub re_f2_zero: bool,
    pub im_f2_zero: bool,
    pub f_zero: bool,
    /// Set when n + k exceeds the practical Sylvester size cap of 7.
    pub size_warning: bool,
}

impl CurveResult {
    pub fn is_degenerate(&self) -> bool {
        self.re_f2_zero || self.im_f2_zero || self.f_zero
    }
}

/// The polynomial system whose solutions (with `g` off the axes and `m` real)
/// define the traced boundary set:
///
/// ```text
/// prod_i (g(x - alpha_i) + m) - sum_i a_i prod_{s!=i} (g(x - alpha_s) + m) = 0
/// prod_j (ig(y - beta_j) + 1 - m) - sum_j b_j prod_{s!=j} (ig(y - beta_s) + 1 - m) = 0
/// ```
pub fn build_system(cfg: &CurveConfig) -> Result<(GaussPoly, GaussPoly), CurveError> {
    let (alphas, a_wts) = cfg
        .mu_p
        .exact_gauss()
        .ok_or(CurveError::NonRationalMeasure)?;
    let (betas, b_wts) = cfg
        .mu_q
        .exact_gauss()
        .ok_or(CurveError::NonRationalMeasure)?;

    let g = GaussPoly::var(Var::G);
    let m = GaussPoly::var(Var::M);
    let x = GaussPoly::var(Var::X);
    let y = GaussPoly::var(Var::Y);
    let one = GaussPoly::one();
    let ig = g.scale(&GaussRational::i());

    // factors g(x - alpha_i) + m
    let p_factors: Vec<GaussPoly> = alphas
        .iter()
        .map(|al| {
            g.mul(&x.sub(&GaussPoly::constant(al.clone())))
                .add(&m)
        })
        .collect();
    // factors i g(y - beta_j) + 1 - m
    let q_factors: Vec<GaussPoly> = betas
        .iter()
        .map(|be| {
            ig.mul(&y.sub(&GaussPoly::constant(be.clone())))
                .add(&one)
                .sub(&m)
        })
        .collect();

    let poly_p = prod_minus_weighted_sum(&p_factors, &a_wts);
    let poly_q = prod_minus_weighted_sum(&q_factors, &b_wts);
    Ok((poly_p, poly_q))
}

/// `prod_i f_i - sum_i w_i prod_{s != i} f_s`, with the partial products
/// built by prefix/suffix tables so each factor multiplies in once.
fn prod_minus_weighted_sum(factors: &[GaussPoly], weights: &[GaussRational]) -> GaussPoly {
    let n = factors.len();
    let mut prefix = vec![GaussPoly::one()];
    for f in factors {
        let last = prefix.last().unwrap().mul(f);
        prefix.push(last);
    }
    let mut suffix = vec![GaussPoly::one(); n + 1];
    for i in (0..n).rev() {
        suffix[i] = factors[i].mul(&suffix[i + 1]);
    }
    let mut out = prefix[n].clone();
    for i in 0..n {
        let others = prefix[i].mul(&suffix[i + 1]);
        out = out.sub(&others.scale(&weights[i]));
    }
    out
}

/// Runs the whole algorithm. The divisibility of `f1` by
/// `m^(n-1) (m-1)^(k-1)` is a theorem for systems built here; a remainder
/// means the inputs violated the contract (weights not summing to one) and is
/// surfaced as an error.
pub fn run_pipeline(cfg: &CurveConfig) -> Result<CurveResult, CurveError> {
    let (poly_p, poly_q) = build_system(cfg)?;
    run_pipeline_with_system(cfg, poly_p, poly_q)
}

/// Pipeline steps 1-4 on an explicit system; split out so tests (and the
/// corruption hook in the CLI) can feed a modified system through.
pub fn run_pipeline_with_system(
    cfg: &CurveConfig,
    poly_p: GaussPoly,
    poly_q: GaussPoly,
) -> Result<CurveResult, CurveError> {
    let n = cfg.n() as u32;
    let k = cfg.k() as u32;
    let size_warning = cfg.n() + cfg.k() > 7;

    let f1 = resultant(&poly_p, &poly_q, Var::G)?;

    let m = GaussPoly::var(Var::M);
    let m_minus_1 = m.sub(&GaussPoly::one());
    let divisor = m.pow(n - 1).mul(&m_minus_1.pow(k - 1));
    let f2 = f1
        .exact_div(&divisor)
        .map_err(|e| match e {
            crate::poly::PolyError::DivisionRemainder { remainder } => {
                CurveError::DivisibilityViolation(remainder.num_terms())
            }
            _ => CurveError::DivisibilityViolation(0),
        })?;

    let (re_f2, im_f2) = f2.split_re_im();
    let re_f2_zero = re_f2.is_zero();
    let im_f2_zero = im_f2.is_zero();

    let (f, f_zero) = if re_f2_zero || im_f2_zero {
        (None, false)
    } else {
        let f = resultant(&re_f2, &im_f2, Var::M)?;
        if !f.is_real() {
            return Err(CurveError::NonRealCurve);
        }
        let z = f.is_zero();
        (Some(f), z)
    };

    Ok(CurveResult {
        f1,
        f2,
        re_f2,
        im_f2,
        f,
        re_f2_zero,
        im_f2_zero,
        f_zero,
        size_warning,
    })
}

/// Float evaluation of the curve at `z = x + iy`; the curve has real
/// coefficients so the value is real.
pub fn curve_eval(result: &CurveResult, z: Complex64) -> Result<f64, CurveError> {
    let f = result
        .f
        .as_ref()
        .filter(|_| !result.f_zero)
        .ok_or(CurveError::Degenerate("no final curve polynomial"))?;
    let zero = Complex64::new(0.0, 0.0);
    let v = f.eval([
        zero,
        zero,
        Complex64::new(z.re, 0.0),
        Complex64::new(z.im, 0.0),
    ]);
    Ok(v.re)
}

/// Normalized vanishing score: the first-order (Newton) distance estimate
/// `|f(x, y)| / ||grad f(x, y)||`, regularized by the term-magnitude scale so
/// critical points cannot divide by zero. The estimate behaves like the
/// Euclidean distance to the zero set divided by the local multiplicity, so
/// it is comparable across configs of very different degree.
pub fn normalized_score(result: &CurveResult, z: Complex64) -> Result<f64, CurveError> {
    Ok(CurveScorer::new(result)?.score(z)?)
}

/// Precomputed scorer: the curve with its two partial derivatives.
pub struct CurveScorer<'a> {
    f: &'a GaussPoly,
    fx: GaussPoly,
    fy: GaussPoly,
}

impl<'a> CurveScorer<'a> {
    pub fn new(result: &'a CurveResult) -> Result<Self, CurveError> {
        let f = result
            .f
            .as_ref()
            .filter(|_| !result.f_zero)
            .ok_or(CurveError::Degenerate("no final curve polynomial"))?;
        Ok(CurveScorer {
            f,
            fx: f.derivative(crate::poly::Var::X),
            fy: f.derivative(crate::poly::Var::Y),
        })
    }

    fn regularizer(&self, z: Complex64) -> f64 {
        let (ax, ay) = (z.re.abs().max(1.0), z.im.abs().max(1.0));
        let mut scale = 0.0f64;
        for (e, c) in self.f.terms() {
            scale += c.to_complex().norm() * ax.powi(e[2] as i32) * ay.powi(e[3] as i32);
        }
        scale
    }

    /// Exact-arithmetic score. Double evaluation carries absolute noise of
    /// order eps * (term scale), which swamps the tiny values this score
    /// exists to certify near the variety's singular points.
    pub fn score(&self, z: Complex64) -> Result<f64, CurveError> {
        let xq = num_rational::BigRational::from_float(z.re)
            .ok_or(CurveError::Degenerate("non-finite evaluation point"))?;
        let yq = num_rational::BigRational::from_float(z.im)
            .ok_or(CurveError::Degenerate("non-finite evaluation point"))?;
        let zero = GaussRational::zero();
        let xg = GaussRational::from_rational(xq);
        let yg = GaussRational::from_rational(yq);
        let point = [&zero, &zero, &xg, &yg];
        let v = crate::rational::to_f64(&self.f.eval_exact(point).re);
        let fx = crate::rational::to_f64(&self.fx.eval_exact(point).re);
        let fy = crate::rational::to_f64(&self.fy.eval_exact(point).re);
        let grad = (fx * fx + fy * fy).sqrt();
        Ok(v.abs() / (grad + 1e-12 * self.regularizer(z)))
    }

    /// Float score; good to absolute ~1e-6, fine for region scans.
    pub fn score_fast(&self, z: Complex64) -> f64 {
        let zero = Complex64::new(0.0, 0.0);
        let point = [
            zero,
            zero,
            Complex64::new(z.re, 0.0),
            Complex64::new(z.im, 0.0),
        ];
        let v = self.f.eval(point).re;
        let fx = self.fx.eval(point).re;
        let fy = self.fy.eval(point).re;
        let grad = (fx * fx + fy * fy).sqrt();
        v.abs() / (grad + 1e-12 * self.regularizer(z))
    }
}

/// Exact proportionality test: returns the scalar `c` with `self = c * other`
/// when one exists.
pub fn proportionality(p: &GaussPoly, q: &GaussPoly) -> Option<GaussRational> {
    if p.is_zero() || q.is_zero() {
        return None;
    }
    let (pe, pc) = p.leading()?;
    let (qe, qc) = q.leading()?;
    if pe != qe {
        return None;
    }
    let c = pc.clone() * qc.inv();
    if *p == q.scale(&c) {
        Some(c)
    } else {
        None
    }
}
