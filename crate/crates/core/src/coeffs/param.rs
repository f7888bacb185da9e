//! Polynomials and rational functions in the four structure parameters
//! `q, alpha, beta, gamma` over the rationals.
//!
//! [`ParamPoly`] is a sparse polynomial in `Z[q, alpha, beta, gamma]` (the
//! coefficients are `BigRat`, but normalized fractions keep them integral),
//! with monomials ordered lexicographically by the exponent vector
//! `(q, alpha, beta, gamma)`.  [`ParamRat`] is a quotient of two such
//! polynomials.
//!
//! Full multivariate gcd is deliberately avoided.  In this library every
//! denominator that ever arises is a product of powers of `1 - q`, `alpha`,
//! `beta` and `gamma*(1-q) + alpha*beta`, so fractions stay small with two
//! cheaper reductions: common monomial content, and common rational content.
//! The arithmetic additionally tries single exact polynomial divisions
//! before forming a product denominator, which keeps denominators from
//! compounding during long computations.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

use super::{BigRat, CoeffError};

/// Number of named structure parameters.
pub const NUM_PARAMS: usize = 4;

/// Exponent vector of a parameter monomial, indexed by [`Param`].
pub type ExpVec = [u32; NUM_PARAMS];

/// The four structure parameters, in their fixed variable order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Param {
    Q = 0,
    Alpha = 1,
    Beta = 2,
    Gamma = 3,
}

impl Param {
    pub const ALL: [Param; NUM_PARAMS] = [Param::Q, Param::Alpha, Param::Beta, Param::Gamma];

    pub fn name(&self) -> &'static str {
        match self {
            Param::Q => "q",
            Param::Alpha => "alpha",
            Param::Beta => "beta",
            Param::Gamma => "gamma",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        match name {
            "q" => Some(Param::Q),
            "alpha" => Some(Param::Alpha),
            "beta" => Some(Param::Beta),
            "gamma" => Some(Param::Gamma),
            _ => None,
        }
    }
}

/// A sparse polynomial in `q, alpha, beta, gamma` with rational coefficients.
///
/// Invariant: no stored coefficient is zero, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamPoly {
    terms: BTreeMap<ExpVec, BigRat>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        ParamPoly::constant(BigRat::one())
    }

    pub fn constant(c: BigRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0; NUM_PARAMS], c);
        }
        ParamPoly { terms }
    }

    pub fn symbol(p: Param) -> Self {
        let mut exps = [0; NUM_PARAMS];
        exps[p as usize] = 1;
        ParamPoly::monomial(exps, BigRat::one())
    }

    pub fn monomial(exps: ExpVec, coeff: BigRat) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        ParamPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&[0; NUM_PARAMS])
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.contains_key(&[0; NUM_PARAMS]))
    }

    /// The constant value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRat> {
        if self.terms.is_empty() {
            return Some(BigRat::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&[0; NUM_PARAMS]) {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExpVec, &BigRat)> {
        self.terms.iter()
    }

    /// The lexicographically largest monomial and its coefficient.
    pub fn leading(&self) -> Option<(&ExpVec, &BigRat)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, exps: ExpVec, coeff: BigRat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (e, c) in other.terms.iter() {
            out.add_term(*e, -c.clone());
        }
        out
    }

    pub fn neg(&self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ea, ca) in self.terms.iter() {
            for (eb, cb) in other.terms.iter() {
                let mut e = *ea;
                for (i, x) in eb.iter().enumerate() {
                    e[i] += x;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn mul_scalar(&self, c: &BigRat) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> ParamPoly {
        if exp == 0 {
            return ParamPoly::one();
        }
        // Monomials exponentiate in one step.
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            let mut ee = *e;
            for x in ee.iter_mut() {
                *x *= exp;
            }
            return ParamPoly::monomial(ee, num::pow::pow(c.clone(), exp as usize));
        }
        let mut base = self.clone();
        let mut acc = ParamPoly::one();
        let mut n = exp;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Componentwise minimum of all exponent vectors: the monomial content.
    fn min_exponents(&self) -> Option<ExpVec> {
        let mut it = self.terms.keys();
        let mut min = *it.next()?;
        for e in it {
            for i in 0..NUM_PARAMS {
                min[i] = min[i].min(e[i]);
            }
        }
        Some(min)
    }

    /// Divides by the monomial `exps`; every term must be divisible.
    fn div_monomial(&self, exps: &ExpVec) -> ParamPoly {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut d = *e;
                    for i in 0..NUM_PARAMS {
                        debug_assert!(d[i] >= exps[i]);
                        d[i] -= exps[i];
                    }
                    (d, c.clone())
                })
                .collect(),
        }
    }

    /// Positive gcd of all coefficients (`gcd(a/b, c/d) = gcd(a,c)/lcm(b,d)`);
    /// zero for the zero polynomial.
    fn content(&self) -> BigRat {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(&c.numer().abs());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            BigRat::zero()
        } else {
            BigRat::new(num, den)
        }
    }

    fn div_scalar(&self, c: &BigRat) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(e, k)| (*e, k / c)).collect(),
        }
    }

    /// Exact polynomial division: returns `Some(q)` with `self = divisor * q`,
    /// or `None` if the division leaves a remainder.
    ///
    /// Long division by the lexicographic leading term; each step cancels the
    /// current leading monomial, and lex order on exponent vectors is a well
    /// order, so the loop terminates.
    pub fn exact_div(&self, divisor: &ParamPoly) -> Option<ParamPoly> {
        if divisor.is_zero() {
            return None;
        }
        let (lead_e, lead_c) = divisor.leading().unwrap();
        let lead_e = *lead_e;
        let lead_c = lead_c.clone();
        let mut rem = self.clone();
        let mut quot = ParamPoly::zero();
        while let Some((re, rc)) = rem.leading() {
            let mut te = *re;
            for i in 0..NUM_PARAMS {
                if te[i] < lead_e[i] {
                    return None;
                }
                te[i] -= lead_e[i];
            }
            let tc = rc / &lead_c;
            quot.add_term(te, tc.clone());
            let t = ParamPoly::monomial(te, tc);
            rem = rem.sub(&t.mul(divisor));
        }
        Some(quot)
    }

    /// Evaluates at the point `values` (indexed by [`Param`]), staying in
    /// rational arithmetic.
    pub fn eval_rat(&self, values: &[BigRat; NUM_PARAMS]) -> BigRat {
        let mut acc = BigRat::zero();
        for (e, c) in self.terms.iter() {
            let mut term = c.clone();
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term *= num::pow::pow(values[i].clone(), exp as usize);
                }
            }
            acc += term;
        }
        acc
    }

    /// Substitutes a polynomial for each parameter.
    pub fn compose(&self, values: &[ParamPoly; NUM_PARAMS]) -> ParamPoly {
        let mut acc = ParamPoly::zero();
        for (e, c) in self.terms.iter() {
            let mut term = ParamPoly::constant(c.clone());
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    term = term.mul(&values[i].pow(exp));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// True if the parameter occurs in some term.
    pub fn mentions(&self, p: Param) -> bool {
        self.terms.keys().any(|e| e[p as usize] > 0)
    }

    /// Formats one term without a sign, e.g. `3*q^2*alpha`; `1` for the
    /// constant monomial with unit coefficient.
    fn format_abs_term(exps: &ExpVec, coeff: &BigRat) -> String {
        let mut parts: Vec<String> = Vec::new();
        let abs = coeff.abs();
        let trivial_mono = exps.iter().all(|&e| e == 0);
        if !abs.is_one() || trivial_mono {
            parts.push(abs.to_string());
        }
        for p in Param::ALL {
            let e = exps[p as usize];
            if e == 1 {
                parts.push(p.name().to_string());
            } else if e > 1 {
                parts.push(format!("{}^{}", p.name(), e));
            }
        }
        parts.join("*")
    }
}

impl std::fmt::Display for ParamPoly {
    /// Compact form, terms in descending lex order: `2*q^2*alpha-q+1`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            write!(f, "{}", ParamPoly::format_abs_term(e, c))?;
        }
        Ok(())
    }
}

/// A rational function `num/den` in `q, alpha, beta, gamma`.
///
/// Invariants: `den != 0`; the pair carries no common monomial factor and no
/// common rational content; all coefficients are integers and the leading
/// coefficient of `den` is positive.  Equality is mathematical (by cross
/// multiplication), since the stored form is not a canonical reduced
/// fraction.
#[derive(Clone, Debug)]
pub struct ParamRat {
    num: ParamPoly,
    den: ParamPoly,
}

impl ParamRat {
    /// Builds `num/den`, normalizing; errors if `den` is zero.
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<ParamRat, CoeffError> {
        if den.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let mut r = ParamRat { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(num: ParamPoly) -> ParamRat {
        let mut r = ParamRat { num, den: ParamPoly::one() };
        r.normalize();
        r
    }

    pub fn constant(c: BigRat) -> ParamRat {
        ParamRat::from_poly(ParamPoly::constant(c))
    }

    pub fn symbol(p: Param) -> ParamRat {
        ParamRat { num: ParamPoly::symbol(p), den: ParamPoly::one() }
    }

    pub fn zero() -> ParamRat {
        ParamRat { num: ParamPoly::zero(), den: ParamPoly::one() }
    }

    pub fn one() -> ParamRat {
        ParamRat { num: ParamPoly::one(), den: ParamPoly::one() }
    }

    pub fn numerator(&self) -> &ParamPoly {
        &self.num
    }

    pub fn denominator(&self) -> &ParamPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Light normalization: strip common monomial content, make every
    /// coefficient integral with overall content 1, and normalize the sign of
    /// the denominator's leading coefficient.  No multivariate gcd.
    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = ParamPoly::one();
            return;
        }
        let mn = self.num.min_exponents().unwrap();
        let md = self.den.min_exponents().unwrap();
        let mut common = [0u32; NUM_PARAMS];
        let mut any = false;
        for i in 0..NUM_PARAMS {
            common[i] = mn[i].min(md[i]);
            any |= common[i] > 0;
        }
        if any {
            self.num = self.num.div_monomial(&common);
            self.den = self.den.div_monomial(&common);
        }
        // Joint rational content of numerator and denominator.
        let cn = self.num.content();
        let cd = self.den.content();
        let c = BigRat::new(
            cn.numer().gcd(cd.numer()),
            cn.denom().lcm(cd.denom()),
        );
        if !c.is_one() {
            self.num = self.num.div_scalar(&c);
            self.den = self.den.div_scalar(&c);
        }
        if self.den.leading().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            self.num = self.num.neg();
            self.den = self.den.neg();
        }
    }

    /// Re-normalized copy; the cheap reductions are already maintained by
    /// every operation, so this is primarily for callers that built a value
    /// through the raw constructors.
    pub fn simplify(&self) -> ParamRat {
        let mut r = self.clone();
        r.normalize();
        r
    }

    /// Divisibility-aware cancellation for products: reduces the pair
    /// `(num, den)` by one exact division if either divides the other.
    fn cancel(num: ParamPoly, den: ParamPoly) -> (ParamPoly, ParamPoly) {
        if den.is_one() || num.is_zero() {
            return (num, den);
        }
        if let Some(q) = num.exact_div(&den) {
            return (q, ParamPoly::one());
        }
        if let Some(q) = den.exact_div(&num) {
            return (ParamPoly::one(), q);
        }
        (num, den)
    }

    pub fn add(&self, other: &ParamRat) -> ParamRat {
        let (num, den) = if self.den == other.den {
            (self.num.add(&other.num), self.den.clone())
        } else if let Some(k) = other.den.exact_div(&self.den) {
            // self.den divides other.den: common denominator other.den.
            (self.num.mul(&k).add(&other.num), other.den.clone())
        } else if let Some(k) = self.den.exact_div(&other.den) {
            (self.num.add(&other.num.mul(&k)), self.den.clone())
        } else {
            (
                self.num.mul(&other.den).add(&other.num.mul(&self.den)),
                self.den.mul(&other.den),
            )
        };
        let mut r = ParamRat { num, den };
        r.normalize();
        r
    }

    pub fn sub(&self, other: &ParamRat) -> ParamRat {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ParamRat {
        ParamRat { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, other: &ParamRat) -> ParamRat {
        // Cross-cancel before multiplying to keep denominators from piling up.
        let (a, d) = ParamRat::cancel(self.num.clone(), other.den.clone());
        let (c, b) = ParamRat::cancel(other.num.clone(), self.den.clone());
        let mut r = ParamRat { num: a.mul(&c), den: b.mul(&d) };
        r.normalize();
        r
    }

    pub fn inv(&self) -> Result<ParamRat, CoeffError> {
        if self.num.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        let mut r = ParamRat { num: self.den.clone(), den: self.num.clone() };
        r.normalize();
        Ok(r)
    }

    pub fn div(&self, other: &ParamRat) -> Result<ParamRat, CoeffError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, exp: u32) -> ParamRat {
        ParamRat { num: self.num.pow(exp), den: self.den.pow(exp) }
    }

    /// Mathematical equality by cross multiplication.
    pub fn eq_rat(&self, other: &ParamRat) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// The constant value if this is a constant (denominator reduces away).
    pub fn as_constant(&self) -> Option<BigRat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub fn mentions(&self, p: Param) -> bool {
        self.num.mentions(p) || self.den.mentions(p)
    }
}

impl PartialEq for ParamRat {
    fn eq(&self, other: &Self) -> bool {
        self.eq_rat(other)
    }
}

impl Eq for ParamRat {}

impl std::fmt::Display for ParamRat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        write!(f, "{}/({})", num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> ParamPoly {
        ParamPoly::symbol(Param::Q)
    }
    fn alpha() -> ParamPoly {
        ParamPoly::symbol(Param::Alpha)
    }
    fn beta() -> ParamPoly {
        ParamPoly::symbol(Param::Beta)
    }
    fn int(n: i64) -> ParamPoly {
        ParamPoly::constant(BigRat::from_integer(n.into()))
    }

    #[test]
    fn poly_ring_basics() {
        let p = q().add(&int(1)); // q + 1
        let m = q().sub(&int(1)); // q - 1
        let prod = p.mul(&m); // q^2 - 1
        assert_eq!(prod, q().mul(&q()).sub(&int(1)));
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.pow(2), p.mul(&p));
        assert_eq!(int(0), ParamPoly::zero());
    }

    #[test]
    fn exact_division() {
        let p = q().pow(2).sub(&int(1));
        let d = q().sub(&int(1));
        let quot = p.exact_div(&d).unwrap();
        assert_eq!(quot, q().add(&int(1)));
        // alpha does not divide q^2 - 1.
        assert!(p.exact_div(&alpha()).is_none());
        // Multivariate: (q*alpha + alpha) / alpha = q + 1.
        let p2 = q().mul(&alpha()).add(&alpha());
        assert_eq!(p2.exact_div(&alpha()).unwrap(), q().add(&int(1)));
    }

    #[test]
    fn rat_normalization_strips_content() {
        // (2*alpha^2) / (4*alpha) should store as alpha / 2.
        let r = ParamRat::new(alpha().pow(2).mul_scalar(&BigRat::from_integer(2.into())), alpha().mul_scalar(&BigRat::from_integer(4.into()))).unwrap();
        assert_eq!(r.numerator(), &alpha());
        assert_eq!(r.denominator(), &int(2));
    }

    #[test]
    fn rat_denominator_sign() {
        // alpha / (1 - q) stores with denominator q - 1 leading positive.
        let r = ParamRat::new(alpha(), int(1).sub(&q())).unwrap();
        assert!(r.denominator().leading().unwrap().1 > &BigRat::zero());
        assert_eq!(r.to_string(), "-alpha/(q-1)");
    }

    #[test]
    fn rat_field_ops_and_eq() {
        let a = ParamRat::new(alpha(), int(1).sub(&q())).unwrap();
        let b = ParamRat::new(alpha().mul(&q()).sub(&alpha()), q().sub(&int(1)).pow(2)).unwrap();
        // b = alpha*(q-1)/(q-1)^2 = alpha/(q-1) = -a.
        assert!(b.eq_rat(&a.neg()));
        assert!(a.add(&b).is_zero());
        let prod = a.mul(&a.inv().unwrap());
        assert!(prod.is_one());
        // (a/b) * b = a even without gcd.
        let c = ParamRat::new(q().add(&int(1)), beta()).unwrap();
        assert!(a.div(&c).unwrap().mul(&c).eq_rat(&a));
    }

    #[test]
    fn divisibility_aware_add_keeps_denominator() {
        // alpha/(q-1) + beta/(q-1)^2 should have denominator (q-1)^2, not (q-1)^3.
        let d1 = q().sub(&int(1));
        let a = ParamRat::new(alpha(), d1.clone()).unwrap();
        let b = ParamRat::new(beta(), d1.pow(2)).unwrap();
        let s = a.add(&b);
        assert_eq!(s.denominator(), &d1.pow(2));
    }

    #[test]
    fn display_and_constants() {
        assert_eq!(int(0).to_string(), "0");
        assert_eq!(q().sub(&int(1)).to_string(), "q-1");
        assert_eq!(int(1).sub(&q()).to_string(), "-q+1");
        let t = q().pow(2).mul(&alpha()).mul_scalar(&BigRat::from_integer(3.into()));
        assert_eq!(t.to_string(), "3*q^2*alpha");
        assert_eq!(ParamRat::constant(BigRat::new(1.into(), 2.into())).as_constant(), Some(BigRat::new(1.into(), 2.into())));
        assert!(ParamRat::symbol(Param::Gamma).as_constant().is_none());
    }

    #[test]
    fn compose_substitution() {
        // (q*alpha) composed with q -> q^2, alpha -> 1 - q gives q^2 - q^3.
        let p = q().mul(&alpha());
        let vals = [q().pow(2), int(1).sub(&q()), beta(), ParamPoly::symbol(Param::Gamma)];
        let got = p.compose(&vals);
        assert_eq!(got, q().pow(2).sub(&q().pow(3)));
    }
}
