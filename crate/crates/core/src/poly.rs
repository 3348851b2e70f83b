//! Sparse multivariate polynomials over the Gaussian rationals, in the fixed
//! variable universe `(g, m, x, y)`.
//!
//! This is the substrate of the boundary-curve algorithm: everything here is
//! exact ring arithmetic. Monomials are dense exponent vectors keyed in a
//! `BTreeMap`; graded-lex (with `g` most significant) is the canonical term
//! order for leading-term division and for serialization.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::rational::GaussRational;

/// The fixed, ordered variable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    G = 0,
    M = 1,
    X = 2,
    Y = 3,
}

pub const ALL_VARS: [Var; 4] = [Var::G, Var::M, Var::X, Var::Y];

impl Var {
    pub fn name(&self) -> &'static str {
        match self {
            Var::G => "g",
            Var::M => "m",
            Var::X => "x",
            Var::Y => "y",
        }
    }
}

pub type Exps = [u32; 4];

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("exact division left a nonzero remainder")]
    DivisionRemainder { remainder: Box<GaussPoly> },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("variable {0} is unbound at evaluation")]
    UnboundVariable(&'static str),
    #[error("polynomial depends on g and cannot be serialized in (m, x, y) form")]
    SerializeWithG,
}

/// Graded-lex on exponent vectors, `g` most significant.
fn grlex(a: &Exps, b: &Exps) -> std::cmp::Ordering {
    let ta: u32 = a.iter().sum();
    let tb: u32 = b.iter().sum();
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

/// Exact multivariate polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussPoly {
    terms: BTreeMap<Exps, GaussRational>,
}

impl GaussPoly {
    pub fn zero() -> Self {
        GaussPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        GaussPoly::constant(GaussRational::one())
    }

    pub fn constant(c: GaussRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0, 0, 0, 0], c);
        }
        GaussPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        GaussPoly::monomial(v, 1, GaussRational::one())
    }

    pub fn monomial(v: Var, e: u32, c: GaussRational) -> Self {
        let mut exps = [0, 0, 0, 0];
        exps[v as usize] = e;
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        GaussPoly { terms }
    }

    pub fn term(exps: Exps, c: GaussRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        GaussPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &GaussRational)> {
        self.terms.iter()
    }

    /// Degree in one variable; zero polynomial reports 0.
    pub fn degree(&self, v: Var) -> u32 {
        self.terms
            .keys()
            .map(|e| e[v as usize])
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.terms.keys().any(|e| e[v as usize] > 0)
    }

    fn insert_add(&mut self, exps: Exps, c: GaussRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exps) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &GaussPoly) -> GaussPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.insert_add(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &GaussPoly) -> GaussPoly {
        let mut out = self.clone();
        for (e, c) in rhs.terms.iter() {
            out.insert_add(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> GaussPoly {
        GaussPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussRational) -> GaussPoly {
        if c.is_zero() {
            return GaussPoly::zero();
        }
        GaussPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &GaussPoly) -> GaussPoly {
        let mut out = GaussPoly::zero();
        for (ea, ca) in self.terms.iter() {
            for (eb, cb) in rhs.terms.iter() {
                let exps = [
                    ea[0] + eb[0],
                    ea[1] + eb[1],
                    ea[2] + eb[2],
                    ea[3] + eb[3],
                ];
                out.insert_add(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> GaussPoly {
        let mut base = self.clone();
        let mut acc = GaussPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Leading term under graded-lex.
    pub fn leading(&self) -> Option<(&Exps, &GaussRational)> {
        self.terms.iter().max_by(|a, b| grlex(a.0, b.0))
    }

    /// Exact quotient `self / d`; the error carries the nonzero remainder,
    /// which doubles as the divisibility test.
    pub fn exact_div(&self, d: &GaussPoly) -> Result<GaussPoly, PolyError> {
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (dl_exps, dl_coeff) = {
            let (e, c) = d.leading().unwrap();
            (*e, c.clone())
        };
        let dl_inv = dl_coeff.inv();
        let mut rem = self.clone();
        let mut quot = GaussPoly::zero();
        while let Some((re, rc)) = rem.leading().map(|(e, c)| (*e, c.clone())) {
            if (0..4).any(|k| re[k] < dl_exps[k]) {
                return Err(PolyError::DivisionRemainder {
                    remainder: Box::new(rem),
                });
            }
            let qe = [
                re[0] - dl_exps[0],
                re[1] - dl_exps[1],
                re[2] - dl_exps[2],
                re[3] - dl_exps[3],
            ];
            let qc = &rc * &dl_inv;
            let qterm = GaussPoly::term(qe, qc);
            rem = rem.sub(&qterm.mul(d));
            quot = quot.add(&qterm);
        }
        Ok(quot)
    }

    /// Formal partial derivative with respect to `v`.
    pub fn derivative(&self, v: Var) -> GaussPoly {
        let mut out = GaussPoly::zero();
        for (e, c) in self.terms.iter() {
            let k = e[v as usize];
            if k == 0 {
                continue;
            }
            let mut de = *e;
            de[v as usize] = k - 1;
            out.insert_add(de, c * &GaussRational::from_int(k as i64));
        }
        out
    }

    /// Coefficient-wise real/imaginary split; both results are real.
    pub fn split_re_im(&self) -> (GaussPoly, GaussPoly) {
        let mut re = GaussPoly::zero();
        let mut im = GaussPoly::zero();
        for (e, c) in self.terms.iter() {
            re.insert_add(*e, GaussRational::from_rational(c.re.clone()));
            im.insert_add(*e, GaussRational::from_rational(c.im.clone()));
        }
        (re, im)
    }

    /// True when every coefficient has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `v`, from
    /// degree 0 up; each entry is a polynomial in the other variables.
    pub fn coeffs_in(&self, v: Var) -> Vec<GaussPoly> {
        let deg = self.degree(v) as usize;
        let mut out = vec![GaussPoly::zero(); deg + 1];
        for (e, c) in self.terms.iter() {
            let k = e[v as usize] as usize;
            let mut rest = *e;
            rest[v as usize] = 0;
            out[k].insert_add(rest, c.clone());
        }
        out
    }

    /// Substitutes exact rational values for the given variables (`None`
    /// leaves the variable in place).
    pub fn substitute(&self, vals: [Option<&GaussRational>; 4]) -> GaussPoly {
        let mut out = GaussPoly::zero();
        for (e, c) in self.terms.iter() {
            let mut coeff = c.clone();
            let mut rest = *e;
            for k in 0..4 {
                if let Some(v) = vals[k] {
                    for _ in 0..e[k] {
                        coeff = &coeff * v;
                    }
                    rest[k] = 0;
                }
            }
            out.insert_add(rest, coeff);
        }
        out
    }

    /// Floating evaluation with all four variables bound.
    pub fn eval(&self, vals: [Complex64; 4]) -> Complex64 {
        // power tables keep the per-term cost at four lookups
        let mut pows: [Vec<Complex64>; 4] = [vec![], vec![], vec![], vec![]];
        for k in 0..4 {
            let d = self
                .terms
                .keys()
                .map(|e| e[k])
                .max()
                .unwrap_or(0) as usize;
            let mut table = Vec::with_capacity(d + 1);
            table.push(Complex64::new(1.0, 0.0));
            for j in 1..=d {
                let prev = table[j - 1];
                table.push(prev * vals[k]);
            }
            pows[k] = table;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms.iter() {
            let mut t = c.to_complex();
            for k in 0..4 {
                t *= pows[k][e[k] as usize];
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at Gaussian-rational points.
    pub fn eval_exact(&self, vals: [&GaussRational; 4]) -> GaussRational {
        let mut pows: [Vec<GaussRational>; 4] =
            [vec![], vec![], vec![], vec![]];
        for k in 0..4 {
            let d = self.terms.keys().map(|e| e[k]).max().unwrap_or(0) as usize;
            let mut table = Vec::with_capacity(d + 1);
            table.push(GaussRational::one());
            for j in 1..=d {
                let next = &table[j - 1] * vals[k];
                table.push(next);
            }
            pows[k] = table;
        }
        let mut acc = GaussRational::zero();
        for (e, c) in self.terms.iter() {
            let mut t = c.clone();
            for k in 0..4 {
                if e[k] > 0 {
                    t = &t * &pows[k][e[k] as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Removes the integer content and normalizes the sign of the leading
    /// coefficient; used only for the human-facing "normalized" rendering.
    pub fn normalized(&self) -> GaussPoly {
        use num_bigint::BigInt;
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        if self.is_zero() {
            return GaussPoly::zero();
        }
        // lcm of denominators, gcd of numerators across re/im parts
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            for part in [&c.re, &c.im] {
                if !part.is_zero() {
                    den_lcm = den_lcm.lcm(part.denom());
                    num_gcd = num_gcd.gcd(part.numer());
                }
            }
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let scale = GaussRational::from_rational(num_rational::BigRational::new(
            den_lcm, num_gcd,
        ));
        let mut out = self.scale(&scale);
        let lead_sign_neg = out
            .leading()
            .map(|(_, c)| {
                if c.re.is_zero() {
                    c.im.is_negative()
                } else {
                    c.re.is_negative()
                }
            })
            .unwrap_or(false);
        if lead_sign_neg {
            out = out.neg();
        }
        out
    }

    /// Terms sorted by graded-lex, for canonical output.
    pub fn sorted_terms(&self) -> Vec<(Exps, GaussRational)> {
        let mut v: Vec<(Exps, GaussRational)> =
            self.terms.iter().map(|(e, c)| (*e, c.clone())).collect();
        v.sort_by(|a, b| grlex(&a.0, &b.0));
        v
    }
}

impl GaussPoly {
    /// Serializes into the interchange form: a JSON array of terms
    /// `{ "exps": [e_m, e_x, e_y], "re": {"num", "den"}, "im": {"num", "den"} }`
    /// with decimal strings for the big integers, sorted by graded-lex.
    /// Polynomials still involving `g` are internal and refuse to serialize.
    pub fn to_json(&self) -> Result<serde_json::Value, PolyError> {
        if self.depends_on(Var::G) {
            return Err(PolyError::SerializeWithG);
        }
        let frac = |r: &num_rational::BigRational| {
            serde_json::json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
        };
        let terms: Vec<serde_json::Value> = self
            .sorted_terms()
            .into_iter()
            .map(|(e, c)| {
                serde_json::json!({
                    "exps": [e[1], e[2], e[3]],
                    "re": frac(&c.re),
                    "im": frac(&c.im),
                })
            })
            .collect();
        Ok(serde_json::Value::Array(terms))
    }

    pub fn from_json(v: &serde_json::Value) -> Option<GaussPoly> {
        use num_bigint::BigInt;
        let mut out = GaussPoly::zero();
        let arr = v.as_array()?;
        for t in arr {
            let exps = t.get("exps")?.as_array()?;
            if exps.len() != 3 {
                return None;
            }
            let mut e = [0u32; 4];
            for (k, x) in exps.iter().enumerate() {
                e[k + 1] = x.as_u64()? as u32;
            }
            let part = |key: &str| -> Option<num_rational::BigRational> {
                let o = t.get(key)?;
                let num: BigInt = o.get("num")?.as_str()?.parse().ok()?;
                let den: BigInt = o.get("den")?.as_str()?.parse().ok()?;
                Some(num_rational::BigRational::new(num, den))
            };
            out.insert_add(e, GaussRational::new(part("re")?, part("im")?));
        }
        Some(out)
    }
}

impl fmt::Display for GaussPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.sorted_terms().into_iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}", c)?;
            for (k, v) in ALL_VARS.iter().enumerate() {
                if e[k] == 1 {
                    write!(f, "*{}", v.name())?;
                } else if e[k] > 1 {
                    write!(f, "*{}^{}", v.name(), e[k])?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> GaussPoly {
        GaussPoly::var(Var::X)
    }
    fn y() -> GaussPoly {
        GaussPoly::var(Var::Y)
    }
    fn m() -> GaussPoly {
        GaussPoly::var(Var::M)
    }
    fn iy() -> GaussPoly {
        y().scale(&GaussRational::i())
    }

    #[test]
    fn ring_examples() {
        // (x + iy)(x - iy) = x^2 + y^2
        let p = x().add(&iy()).mul(&x().sub(&iy()));
        let want = x().mul(&x()).add(&y().mul(&y()));
        assert_eq!(p, want);

        // p + 0 = p
        let p = m().mul(&x()).add(&GaussPoly::one());
        assert_eq!(p.add(&GaussPoly::zero()), p);

        // m * (m - 1) = m^2 - m
        let p = m().mul(&m().sub(&GaussPoly::one()));
        let want = m().pow(2).sub(&m());
        assert_eq!(p, want);
    }

    #[test]
    fn exact_div_examples() {
        let m2_minus_m = m().pow(2).sub(&m());
        let q = m2_minus_m.exact_div(&m()).unwrap();
        assert_eq!(q, m().sub(&GaussPoly::one()));

        let p = x().add(&iy()).pow(2).mul(&m());
        let q = p.exact_div(&m()).unwrap();
        assert_eq!(q, x().add(&iy()).pow(2));

        // a random-ish product divides exactly
        let a = x()
            .pow(2)
            .add(&m().mul(&y()))
            .sub(&GaussPoly::constant(GaussRational::from_ratio(3, 7)));
        let d = m().pow(2).add(&x()).add(&GaussPoly::one());
        let prod = a.mul(&d);
        assert_eq!(prod.exact_div(&d).unwrap(), a);

        // remainder is reported
        let err = m()
            .pow(2)
            .add(&GaussPoly::one())
            .exact_div(&m())
            .unwrap_err();
        match err {
            PolyError::DivisionRemainder { remainder } => {
                assert_eq!(*remainder, GaussPoly::one())
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn split_examples() {
        // (1 + 2i) m x
        let c = GaussRational::new(
            num_rational::BigRational::from_integer(1.into()),
            num_rational::BigRational::from_integer(2.into()),
        );
        let p = m().mul(&x()).scale(&c);
        let (re, im) = p.split_re_im();
        assert_eq!(re, m().mul(&x()));
        assert_eq!(im, m().mul(&x()).scale(&GaussRational::from_int(2)));

        let real = x().pow(3).sub(&y());
        let (re, im) = real.split_re_im();
        assert_eq!(re, real);
        assert!(im.is_zero());

        // recombine
        let p = x().add(&iy()).pow(3);
        let (re, im) = p.split_re_im();
        assert_eq!(re.add(&im.scale(&GaussRational::i())), p);
    }

    #[test]
    fn eval_examples() {
        let p = x().pow(2).add(&y().pow(2));
        let v = p.eval([
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        ]);
        assert!((v - Complex64::new(25.0, 0.0)).norm() <= 1e-12);

        let p = m().mul(&m().sub(&GaussPoly::one()));
        let v = p.eval([
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(v.norm() <= 1e-15);

        // float eval matches exact eval demoted to float
        let p = x()
            .pow(3)
            .mul(&m())
            .add(&y().scale(&GaussRational::from_ratio(5, 3)))
            .sub(&GaussPoly::constant(GaussRational::from_ratio(-7, 11)));
        let pt = [
            GaussRational::from_ratio(1, 3),
            GaussRational::from_ratio(-4, 5),
            GaussRational::from_ratio(9, 7),
            GaussRational::from_ratio(2, 9),
        ];
        let exact = p.eval_exact([&pt[0], &pt[1], &pt[2], &pt[3]]).to_complex();
        let float = p.eval([
            pt[0].to_complex(),
            pt[1].to_complex(),
            pt[2].to_complex(),
            pt[3].to_complex(),
        ]);
        assert!((exact - float).norm() <= 1e-10 * exact.norm().max(1.0));
    }

    #[test]
    fn degree_bookkeeping() {
        let p = x().pow(2).mul(&m().pow(3)).add(&y());
        assert_eq!(p.degree(Var::M), 3);
        assert_eq!(p.degree(Var::X), 2);
        assert_eq!(p.degree(Var::G), 0);
        assert_eq!(p.total_degree(), 5);
        let cs = p.coeffs_in(Var::M);
        assert_eq!(cs.len(), 4);
        assert_eq!(cs[0], y());
        assert_eq!(cs[3], x().pow(2));
    }
}
