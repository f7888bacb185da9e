//! Coefficient fields for the algebra family.
//!
//! Three field modes are supported and never mixed implicitly:
//!
//! * [`FieldMode::Rational`] - exact rationals of arbitrary precision;
//! * [`FieldMode::Symbolic`] - the rational function field
//!   `Q(q, alpha, beta, gamma)`, for computing with generic parameters;
//! * [`FieldMode::Prime`]`(p)` - the prime field GF(p).
//!
//! [`FieldElem`] is the tagged element type.  Binary operations demand equal
//! modes and report [`CoeffError::MixedFieldModes`] otherwise; the only
//! sanctioned bridge between modes is [`FieldElem::specialize`], which
//! substitutes concrete values for the symbolic parameters.

mod gf;
mod param;

pub use gf::{is_prime_u64, GfElem};
pub use param::{ExpVec, Param, ParamPoly, ParamRat, NUM_PARAMS};

use num::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number of arbitrary precision.
pub type BigRat = num::BigRational;
pub use num::bigint::BigInt;

/// Errors from coefficient arithmetic.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum CoeffError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field modes")]
    MixedFieldModes,
    #[error("denominator vanishes under the given specialization")]
    DenominatorVanishes,
    #[error("no value assigned for symbol {}", .0.name())]
    MissingSymbol(Param),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Descriptor of a coefficient field.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum FieldMode {
    Rational,
    Symbolic,
    Prime(u64),
}

impl FieldMode {
    /// Validated constructor for GF(p); rejects composite moduli.
    pub fn prime(p: u64) -> Result<FieldMode, CoeffError> {
        if is_prime_u64(p) {
            Ok(FieldMode::Prime(p))
        } else {
            Err(CoeffError::NotPrime(p))
        }
    }

    pub fn zero(&self) -> FieldElem {
        match self {
            FieldMode::Rational => FieldElem::Rat(BigRat::zero()),
            FieldMode::Symbolic => FieldElem::Sym(ParamRat::zero()),
            FieldMode::Prime(p) => FieldElem::Gf(GfElem::new(0, *p)),
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> FieldElem {
        match self {
            FieldMode::Rational => FieldElem::Rat(BigRat::from_integer(n.into())),
            FieldMode::Symbolic => FieldElem::Sym(ParamRat::constant(BigRat::from_integer(n.into()))),
            FieldMode::Prime(p) => FieldElem::Gf(GfElem::new(n, *p)),
        }
    }

    /// Embeds a rational constant; in GF(p) the denominator must be a unit.
    pub fn embed_rat(&self, c: &BigRat) -> Result<FieldElem, CoeffError> {
        match self {
            FieldMode::Rational => Ok(FieldElem::Rat(c.clone())),
            FieldMode::Symbolic => Ok(FieldElem::Sym(ParamRat::constant(c.clone()))),
            FieldMode::Prime(p) => {
                let num = GfElem::from_bigint(c.numer(), *p);
                let den = GfElem::from_bigint(c.denom(), *p);
                Ok(FieldElem::Gf(num.mul(&den.inv()?)?))
            }
        }
    }
}

impl std::fmt::Display for FieldMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldMode::Rational => write!(f, "Q"),
            FieldMode::Symbolic => write!(f, "Q(q,alpha,beta,gamma)"),
            FieldMode::Prime(p) => write!(f, "GF({})", p),
        }
    }
}

/// An element of one of the three coefficient fields.
#[derive(Clone, Debug)]
pub enum FieldElem {
    Rat(BigRat),
    Sym(ParamRat),
    Gf(GfElem),
}

impl FieldElem {
    pub fn mode(&self) -> FieldMode {
        match self {
            FieldElem::Rat(_) => FieldMode::Rational,
            FieldElem::Sym(_) => FieldMode::Symbolic,
            FieldElem::Gf(g) => FieldMode::Prime(g.prime()),
        }
    }

    /// The symbolic indeterminate `q`, `alpha`, `beta` or `gamma`.
    pub fn symbol(p: Param) -> FieldElem {
        FieldElem::Sym(ParamRat::symbol(p))
    }

    pub fn from_rat(c: BigRat) -> FieldElem {
        FieldElem::Rat(c)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rat(c) => c.is_zero(),
            FieldElem::Sym(r) => r.is_zero(),
            FieldElem::Gf(g) => g.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElem::Rat(c) => c.is_one(),
            FieldElem::Sym(r) => r.is_one(),
            FieldElem::Gf(g) => g.value() == 1,
        }
    }

    fn check_mode(&self, other: &FieldElem) -> Result<(), CoeffError> {
        if self.mode() == other.mode() {
            Ok(())
        } else {
            Err(CoeffError::MixedFieldModes)
        }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem, CoeffError> {
        self.check_mode(other)?;
        Ok(match (self, other) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a + b),
            (FieldElem::Sym(a), FieldElem::Sym(b)) => FieldElem::Sym(a.add(b)),
            (FieldElem::Gf(a), FieldElem::Gf(b)) => FieldElem::Gf(a.add(b)?),
            _ => unreachable!("modes checked above"),
        })
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem, CoeffError> {
        self.check_mode(other)?;
        Ok(match (self, other) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a - b),
            (FieldElem::Sym(a), FieldElem::Sym(b)) => FieldElem::Sym(a.sub(b)),
            (FieldElem::Gf(a), FieldElem::Gf(b)) => FieldElem::Gf(a.sub(b)?),
            _ => unreachable!("modes checked above"),
        })
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem, CoeffError> {
        self.check_mode(other)?;
        Ok(match (self, other) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a * b),
            (FieldElem::Sym(a), FieldElem::Sym(b)) => FieldElem::Sym(a.mul(b)),
            (FieldElem::Gf(a), FieldElem::Gf(b)) => FieldElem::Gf(a.mul(b)?),
            _ => unreachable!("modes checked above"),
        })
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem, CoeffError> {
        self.check_mode(other)?;
        if other.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(match (self, other) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => FieldElem::Rat(a / b),
            (FieldElem::Sym(a), FieldElem::Sym(b)) => FieldElem::Sym(a.div(b)?),
            (FieldElem::Gf(a), FieldElem::Gf(b)) => FieldElem::Gf(a.mul(&b.inv()?)?),
            _ => unreachable!("modes checked above"),
        })
    }

    pub fn try_inv(&self) -> Result<FieldElem, CoeffError> {
        if self.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        Ok(match self {
            FieldElem::Rat(a) => FieldElem::Rat(a.recip()),
            FieldElem::Sym(a) => FieldElem::Sym(a.inv()?),
            FieldElem::Gf(a) => FieldElem::Gf(a.inv()?),
        })
    }

    pub fn neg(&self) -> FieldElem {
        match self {
            FieldElem::Rat(a) => FieldElem::Rat(-a),
            FieldElem::Sym(a) => FieldElem::Sym(a.neg()),
            FieldElem::Gf(a) => FieldElem::Gf(a.neg()),
        }
    }

    pub fn pow(&self, exp: u32) -> FieldElem {
        match self {
            FieldElem::Rat(a) => FieldElem::Rat(num::pow::pow(a.clone(), exp as usize)),
            FieldElem::Sym(a) => FieldElem::Sym(a.pow(exp)),
            FieldElem::Gf(a) => FieldElem::Gf(a.pow(exp)),
        }
    }

    /// Mathematical equality; errors when the operands live in different
    /// field modes.
    pub fn try_eq(&self, other: &FieldElem) -> Result<bool, CoeffError> {
        self.check_mode(other)?;
        Ok(match (self, other) {
            (FieldElem::Rat(a), FieldElem::Rat(b)) => a == b,
            (FieldElem::Sym(a), FieldElem::Sym(b)) => a.eq_rat(b),
            (FieldElem::Gf(a), FieldElem::Gf(b)) => a == b,
            _ => unreachable!("modes checked above"),
        })
    }

    /// Normalized copy; only symbolic elements carry non-trivial reductions.
    pub fn simplify(&self) -> FieldElem {
        match self {
            FieldElem::Sym(a) => FieldElem::Sym(a.simplify()),
            other => other.clone(),
        }
    }

    /// Substitutes concrete values for symbolic parameters.
    ///
    /// Every parameter occurring in the element must be assigned; values must
    /// share the assignment's target mode.  Errors with
    /// [`CoeffError::DenominatorVanishes`] when the denominator evaluates to
    /// zero.  Non-symbolic elements pass through unchanged provided their
    /// mode equals the target.
    pub fn specialize(&self, assignment: &Assignment) -> Result<FieldElem, CoeffError> {
        let r = match self {
            FieldElem::Sym(r) => r,
            other => {
                return if other.mode() == assignment.target {
                    Ok(other.clone())
                } else {
                    Err(CoeffError::MixedFieldModes)
                };
            }
        };
        let num = assignment.eval_poly(r.numerator())?;
        let den = assignment.eval_poly(r.denominator())?;
        if den.is_zero() {
            return Err(CoeffError::DenominatorVanishes);
        }
        num.try_div(&den)
    }

    /// Splits the element for printing: a sign, the printed magnitude, and
    /// whether the magnitude needs parentheses inside a product.
    pub(crate) fn display_parts(&self) -> (bool, String, bool) {
        match self {
            FieldElem::Rat(c) => (c.is_negative(), c.abs().to_string(), false),
            FieldElem::Gf(g) => (false, g.to_string(), false),
            FieldElem::Sym(r) => {
                if r.denominator().is_one() && r.numerator().num_terms() == 1 {
                    let (e, c) = r.numerator().leading().unwrap();
                    let mut body = String::new();
                    if c.is_negative() {
                        body.push_str(&format_abs_sym_term(e, c));
                        (true, body, false)
                    } else {
                        body.push_str(&format_abs_sym_term(e, c));
                        (false, body, false)
                    }
                } else {
                    let s = r.to_string();
                    (false, s, true)
                }
            }
        }
    }
}

fn format_abs_sym_term(exps: &ExpVec, coeff: &BigRat) -> String {
    let mut parts: Vec<String> = Vec::new();
    let abs = coeff.abs();
    let trivial = exps.iter().all(|&e| e == 0);
    if !abs.is_one() || trivial {
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

impl PartialEq for FieldElem {
    /// Mathematical equality within a mode; elements of different modes are
    /// never equal.
    fn eq(&self, other: &Self) -> bool {
        self.try_eq(other).unwrap_or(false)
    }
}

impl Eq for FieldElem {}

impl std::fmt::Display for FieldElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldElem::Rat(c) => write!(f, "{}", c),
            FieldElem::Sym(r) => write!(f, "{}", r),
            FieldElem::Gf(g) => write!(f, "{}", g),
        }
    }
}

macro_rules! impl_field_op {
    ($trait:ident, $method:ident, $try_method:ident) => {
        impl std::ops::$trait for &FieldElem {
            type Output = FieldElem;
            /// Panics on mixed field modes; use the `try_` form when the
            /// operands are not known to share a mode.
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.$try_method(rhs).expect("field operands share a mode")
            }
        }
    };
}

impl_field_op!(Add, add, try_add);
impl_field_op!(Sub, sub, try_sub);
impl_field_op!(Mul, mul, try_mul);

impl std::ops::Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::neg(self)
    }
}

/// A substitution of concrete values for the symbolic parameters, together
/// with the field mode the values live in.
#[derive(Clone, Debug)]
pub struct Assignment {
    target: FieldMode,
    values: [Option<FieldElem>; NUM_PARAMS],
}

impl Assignment {
    pub fn new(target: FieldMode) -> Assignment {
        Assignment { target, values: [None, None, None, None] }
    }

    /// Assigns a value to one parameter; the value must live in the target
    /// mode.
    pub fn set(mut self, p: Param, value: FieldElem) -> Result<Assignment, CoeffError> {
        if value.mode() != self.target {
            return Err(CoeffError::MixedFieldModes);
        }
        self.values[p as usize] = Some(value);
        Ok(self)
    }

    pub fn target(&self) -> FieldMode {
        self.target
    }

    pub fn get(&self, p: Param) -> Option<&FieldElem> {
        self.values[p as usize].as_ref()
    }

    /// Evaluates a parameter polynomial in the target field.
    fn eval_poly(&self, poly: &ParamPoly) -> Result<FieldElem, CoeffError> {
        let mut acc = self.target.zero();
        for (exps, coeff) in poly.iter() {
            let mut term = self.target.embed_rat(coeff)?;
            for p in Param::ALL {
                let e = exps[p as usize];
                if e > 0 {
                    let v = self
                        .values[p as usize]
                        .as_ref()
                        .ok_or(CoeffError::MissingSymbol(p))?;
                    term = term.try_mul(&v.pow(e))?;
                }
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> FieldElem {
        FieldElem::Rat(BigRat::new(n.into(), d.into()))
    }

    #[test]
    fn mode_mixing_rejected() {
        let a = FieldMode::Rational.one();
        let b = FieldMode::prime(5).unwrap().one();
        assert_eq!(a.try_add(&b), Err(CoeffError::MixedFieldModes));
        assert_eq!(a.try_eq(&b), Err(CoeffError::MixedFieldModes));
        assert_ne!(a, b);
    }

    #[test]
    fn prime_mode_validation() {
        assert!(FieldMode::prime(7).is_ok());
        assert_eq!(FieldMode::prime(6), Err(CoeffError::NotPrime(6)));
    }

    #[test]
    fn rational_embedding_into_gf() {
        let mode = FieldMode::prime(7).unwrap();
        // 1/2 = 4 in GF(7).
        let e = mode.embed_rat(&BigRat::new(1.into(), 2.into())).unwrap();
        assert!(e.try_eq(&mode.from_i64(4)).unwrap());
        // 1/7 does not embed.
        assert!(mode.embed_rat(&BigRat::new(1.into(), 7.into())).is_err());
    }

    #[test]
    fn symbolic_arithmetic_and_eq() {
        let q = FieldElem::symbol(Param::Q);
        let one = FieldMode::Symbolic.one();
        // (q^2 - 1)/(q - 1) equals q + 1.
        let num = &q.pow(2) - &one;
        let den = &q - &one;
        let quot = num.try_div(&den).unwrap();
        assert!(quot.try_eq(&q.try_add(&one).unwrap()).unwrap());
    }

    #[test]
    fn specialization() {
        let q = FieldElem::symbol(Param::Q);
        let alpha = FieldElem::symbol(Param::Alpha);
        let expr = alpha.try_div(&(&FieldMode::Symbolic.one() - &q)).unwrap();
        let assign = Assignment::new(FieldMode::Rational)
            .set(Param::Q, rat(3, 1))
            .unwrap()
            .set(Param::Alpha, rat(4, 1))
            .unwrap();
        // alpha/(1-q) at q=3, alpha=4 gives -2.
        let v = expr.specialize(&assign).unwrap();
        assert!(v.try_eq(&rat(-2, 1)).unwrap());
        // q = 1 makes the denominator vanish.
        let bad = Assignment::new(FieldMode::Rational)
            .set(Param::Q, rat(1, 1))
            .unwrap()
            .set(Param::Alpha, rat(4, 1))
            .unwrap();
        assert_eq!(expr.specialize(&bad), Err(CoeffError::DenominatorVanishes));
        // Missing a symbol that occurs is an error.
        let partial = Assignment::new(FieldMode::Rational).set(Param::Q, rat(3, 1)).unwrap();
        assert_eq!(expr.specialize(&partial), Err(CoeffError::MissingSymbol(Param::Alpha)));
    }

    #[test]
    fn specialize_into_prime_field() {
        let q = FieldElem::symbol(Param::Q);
        let mode = FieldMode::prime(7).unwrap();
        let assign = Assignment::new(mode).set(Param::Q, mode.from_i64(2)).unwrap();
        let v = q.pow(3).specialize(&assign).unwrap();
        assert!(v.try_eq(&mode.from_i64(1)).unwrap());
    }

    #[test]
    fn display_round_values() {
        assert_eq!(rat(-3, 2).to_string(), "-3/2");
        let q = FieldElem::symbol(Param::Q);
        let e = &q.pow(2) - &FieldMode::Symbolic.one();
        assert_eq!(e.to_string(), "q^2-1");
    }
}
