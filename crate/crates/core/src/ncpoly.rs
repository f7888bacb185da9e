//! Normally ordered polynomials and the commutation engines.
//!
//! Elements are stored in the Poincare-Birkhoff-Witt basis as finite maps
//! `(a, b) -> coefficient`, meaning `sum c * x^a y^b`.  All products reduce
//! to the single question of normalizing `y^m x^n`, answered by four
//! independent routes:
//!
//! * [`commute_rewrite`] - structural induction on the defining relation;
//!   slow, obviously correct, and the oracle everything else is tested
//!   against;
//! * [`commute_formula`] - closed summation formulas, available for twelve
//!   of the sixteen parameter rows;
//! * [`commute_recurrence`] - coefficient recurrences for three rows;
//! * [`commute_pullback`] - conjugation through a verified isomorphism with
//!   the model algebra, using the model's closed formula; this serves the
//!   four rows with no known closed form.
//!
//! [`CommuteCache`] wraps these routes behind three storage strategies and
//! counts requests, mirroring the trade-off between caching every
//! intermediate normalization and recomputing from formulas.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{
    self, AlgebraRef, TableRow,
};
use crate::coeffs::{Assignment, CoeffError, FieldElem, FieldMode, Param};
use crate::qcomb::{binomial, q_binomial, q_falling, q_number};

/// Errors from normally ordered arithmetic.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum NcError {
    #[error("operands live in different algebras")]
    AlgebraMismatch,
    #[error("monomial total degree exceeds the supported bound 2^20")]
    DegreeOverflow,
    #[error("no closed commutation formula for row {0}")]
    NoClosedFormula(TableRow),
    #[error("no coefficient recurrence for row {0}")]
    NoRecurrence(TableRow),
    #[error("operation requires the fully generic algebra")]
    NotGeneric,
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// A basis monomial `x^a y^b`; total degree is capped at `2^20`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Monomial {
    a: u32,
    b: u32,
}

impl Monomial {
    /// Largest admissible total degree `a + b`.
    pub const MAX_TOTAL_DEGREE: u32 = 1 << 20;

    pub fn new(a: u32, b: u32) -> Result<Monomial, NcError> {
        if a as u64 + b as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
            return Err(NcError::DegreeOverflow);
        }
        Ok(Monomial { a, b })
    }

    /// Exponent of `x`.
    pub fn a(&self) -> u32 {
        self.a
    }

    /// Exponent of `y`.
    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn total_degree(&self) -> u32 {
        self.a + self.b
    }
}

impl Ord for Monomial {
    /// Degree first, then exponent of `x`; a total order on monomials.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.total_degree(), self.a).cmp(&(other.total_degree(), other.a))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.a, self.b) {
            (0, 0) => write!(f, "1"),
            (1, 0) => write!(f, "x"),
            (a, 0) => write!(f, "x^{}", a),
            (0, 1) => write!(f, "y"),
            (0, b) => write!(f, "y^{}", b),
            (1, 1) => write!(f, "x*y"),
            (1, b) => write!(f, "x*y^{}", b),
            (a, 1) => write!(f, "x^{}*y", a),
            (a, b) => write!(f, "x^{}*y^{}", a, b),
        }
    }
}

/// A normally ordered polynomial over one member of the algebra family.
///
/// Invariant: no stored coefficient is zero, and every coefficient lives in
/// the algebra's field mode.
#[derive(Clone, Debug)]
pub struct NcPoly {
    algebra: AlgebraRef,
    terms: BTreeMap<Monomial, FieldElem>,
}

fn same_algebra(a: &AlgebraRef, b: &AlgebraRef) -> Result<(), NcError> {
    if Arc::ptr_eq(a, b) || a.as_ref() == b.as_ref() {
        Ok(())
    } else {
        Err(NcError::AlgebraMismatch)
    }
}

impl NcPoly {
    pub fn zero(alg: &AlgebraRef) -> NcPoly {
        NcPoly { algebra: Arc::clone(alg), terms: BTreeMap::new() }
    }

    pub fn one(alg: &AlgebraRef) -> NcPoly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial { a: 0, b: 0 }, alg.mode().one());
        NcPoly { algebra: Arc::clone(alg), terms }
    }

    /// The generator `x`.
    pub fn gen_x(alg: &AlgebraRef) -> NcPoly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial { a: 1, b: 0 }, alg.mode().one());
        NcPoly { algebra: Arc::clone(alg), terms }
    }

    /// The generator `y`.
    pub fn gen_y(alg: &AlgebraRef) -> NcPoly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial { a: 0, b: 1 }, alg.mode().one());
        NcPoly { algebra: Arc::clone(alg), terms }
    }

    /// The constant polynomial; the value must live in the algebra's field
    /// mode.
    pub fn constant(alg: &AlgebraRef, value: FieldElem) -> Result<NcPoly, NcError> {
        NcPoly::monomial(alg, 0, 0, value)
    }

    /// The single-term polynomial `coeff * x^a y^b`.
    pub fn monomial(alg: &AlgebraRef, a: u32, b: u32, coeff: FieldElem) -> Result<NcPoly, NcError> {
        if coeff.mode() != alg.mode() {
            return Err(NcError::Coeff(CoeffError::MixedFieldModes));
        }
        let m = Monomial::new(a, b)?;
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(m, coeff);
        }
        Ok(NcPoly { algebra: Arc::clone(alg), terms })
    }

    /// Builds a polynomial from `(a, b, coeff)` triples, merging duplicates.
    pub fn from_terms<I>(alg: &AlgebraRef, terms: I) -> Result<NcPoly, NcError>
    where
        I: IntoIterator<Item = (u32, u32, FieldElem)>,
    {
        let mut acc = NcPoly::zero(alg);
        for (a, b, c) in terms {
            if c.mode() != alg.mode() {
                return Err(NcError::Coeff(CoeffError::MixedFieldModes));
            }
            acc.add_term(Monomial::new(a, b)?, c)?;
        }
        Ok(acc)
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter()
    }

    /// Terms in descending monomial order - the canonical printing and
    /// multiplication order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &FieldElem)> {
        self.terms.iter().rev()
    }

    /// The largest monomial, in the (degree, x-exponent) order.
    pub fn leading_monomial(&self) -> Option<Monomial> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficient of `x^a y^b` (zero if the monomial is absent).
    pub fn coeff(&self, a: u32, b: u32) -> FieldElem {
        self.terms
            .get(&Monomial { a, b })
            .cloned()
            .unwrap_or_else(|| self.algebra.mode().zero())
    }

    /// Largest total degree among the terms; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.total_degree())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: FieldElem) -> Result<(), NcError> {
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().try_add(&c)?;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, rhs: &NcPoly) -> Result<NcPoly, NcError> {
        same_algebra(&self.algebra, &rhs.algebra)?;
        let mut out = self.clone();
        for (m, c) in rhs.terms.iter() {
            out.add_term(*m, c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &NcPoly) -> Result<NcPoly, NcError> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> NcPoly {
        NcPoly {
            algebra: Arc::clone(&self.algebra),
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    /// Multiplies every coefficient by a scalar of the same field mode.
    pub fn scalar_mul(&self, c: &FieldElem) -> Result<NcPoly, NcError> {
        if c.mode() != self.algebra.mode() {
            return Err(NcError::Coeff(CoeffError::MixedFieldModes));
        }
        if c.is_zero() {
            return Ok(NcPoly::zero(&self.algebra));
        }
        let mut terms = BTreeMap::new();
        for (m, k) in self.terms.iter() {
            let prod = k.try_mul(c)?;
            if !prod.is_zero() {
                terms.insert(*m, prod);
            }
        }
        Ok(NcPoly { algebra: Arc::clone(&self.algebra), terms })
    }

    /// Product using the rewriting engine for the middle commutations.
    pub fn mul(&self, rhs: &NcPoly) -> Result<NcPoly, NcError> {
        let mut engine = RewriteEngine::new(&self.algebra);
        self.mul_with(rhs, &mut engine)
    }

    /// Product `self * rhs`.  Each monomial pair `x^a y^b * x^c y^d`
    /// contributes `x^a * (y^b x^c) * y^d`; only the middle factor is
    /// nontrivial and it is obtained from `provider` (no request is issued
    /// when `b = 0` or `c = 0`).  Term pairs are visited in descending
    /// monomial order, so the request sequence is deterministic.
    pub fn mul_with(
        &self,
        rhs: &NcPoly,
        provider: &mut dyn CommuteProvider,
    ) -> Result<NcPoly, NcError> {
        same_algebra(&self.algebra, &rhs.algebra)?;
        same_algebra(&self.algebra, provider.algebra())?;
        let mut out = NcPoly::zero(&self.algebra);
        for (ma, ca) in self.terms_desc() {
            for (mb, cb) in rhs.terms_desc() {
                let c = ca.try_mul(cb)?;
                if ma.b == 0 || mb.a == 0 {
                    let a = ma.a as u64 + mb.a as u64;
                    let b = ma.b as u64 + mb.b as u64;
                    if a + b > Monomial::MAX_TOTAL_DEGREE as u64 {
                        return Err(NcError::DegreeOverflow);
                    }
                    out.add_term(Monomial { a: a as u32, b: b as u32 }, c)?;
                } else {
                    let mid = provider.commute(ma.b, mb.a)?;
                    for (mm, cm) in mid.terms() {
                        let a = ma.a as u64 + mm.a as u64;
                        let b = mm.b as u64 + mb.b as u64;
                        if a + b > Monomial::MAX_TOTAL_DEGREE as u64 {
                            return Err(NcError::DegreeOverflow);
                        }
                        out.add_term(Monomial { a: a as u32, b: b as u32 }, c.try_mul(cm)?)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Power by iterated left-fold products through the rewriting engine.
    pub fn pow(&self, n: u32) -> Result<NcPoly, NcError> {
        let mut engine = RewriteEngine::new(&self.algebra);
        self.pow_with(n, &mut engine)
    }

    /// Power by iterated left-fold products: `((f*f)*f)*...`, so the
    /// commutation requests of repeated products are reproduced exactly.
    pub fn pow_with(&self, n: u32, provider: &mut dyn CommuteProvider) -> Result<NcPoly, NcError> {
        let mut acc = NcPoly::one(&self.algebra);
        for _ in 0..n {
            acc = acc.mul_with(self, provider)?;
        }
        Ok(acc)
    }

    /// Specializes a polynomial over the symbolic algebra to the concrete
    /// algebra `target`, substituting `target`'s parameter values into every
    /// coefficient.
    pub fn specialize(&self, target: &AlgebraRef) -> Result<NcPoly, NcError> {
        if self.algebra.mode() != FieldMode::Symbolic {
            return Err(NcError::Coeff(CoeffError::MixedFieldModes));
        }
        let assign = Assignment::new(target.mode())
            .set(Param::Q, target.q().clone())?
            .set(Param::Alpha, target.alpha().clone())?
            .set(Param::Beta, target.beta().clone())?
            .set(Param::Gamma, target.gamma().clone())?;
        let mut out = NcPoly::zero(target);
        for (m, c) in self.terms.iter() {
            out.add_term(*m, c.specialize(&assign)?)?;
        }
        Ok(out)
    }
}

impl PartialEq for NcPoly {
    fn eq(&self, other: &Self) -> bool {
        if !(Arc::ptr_eq(&self.algebra, &other.algebra)
            || self.algebra.as_ref() == other.algebra.as_ref())
        {
            return false;
        }
        if self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .zip(other.terms.iter())
            .all(|((ma, ca), (mb, cb))| ma == mb && ca == cb)
    }
}

impl Eq for NcPoly {}

impl std::fmt::Display for NcPoly {
    /// Canonical infix form, terms in descending monomial order:
    /// `x^2*y^2 + 4*x*y + 2`, `q^2*x*y^2 + (q+1)*y`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms_desc().enumerate() {
            let (neg, body, parens) = c.display_parts();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let trivial_mono = m.a == 0 && m.b == 0;
            if trivial_mono {
                if parens {
                    write!(f, "({})", body)?;
                } else {
                    write!(f, "{}", body)?;
                }
            } else if body == "1" {
                write!(f, "{}", m)?;
            } else if parens {
                write!(f, "({})*{}", body, m)?;
            } else {
                write!(f, "{}*{}", body, m)?;
            }
        }
        Ok(())
    }
}

/// The right-hand side of the defining relation:
/// `q*x*y + alpha*x + beta*y + gamma` as an element of the algebra.
pub fn relation_rhs(alg: &AlgebraRef) -> NcPoly {
    NcPoly::from_terms(
        alg,
        [
            (1u32, 1u32, alg.q().clone()),
            (1, 0, alg.alpha().clone()),
            (0, 1, alg.beta().clone()),
            (0, 0, alg.gamma().clone()),
        ],
    )
    .expect("relation terms are small and well-moded")
}

/// A source of normalized commutations `y^m x^n` for one algebra.
pub trait CommuteProvider {
    fn algebra(&self) -> &AlgebraRef;
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError>;
}

/// Stateless provider backed by [`commute_rewrite`].
pub struct RewriteEngine {
    algebra: AlgebraRef,
}

impl RewriteEngine {
    pub fn new(alg: &AlgebraRef) -> RewriteEngine {
        RewriteEngine { algebra: Arc::clone(alg) }
    }
}

impl CommuteProvider for RewriteEngine {
    fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        commute_rewrite(&self.algebra, m, n)
    }
}

/// Stateless provider backed by [`commute_formula`]; errors on the rows
/// without a closed formula.
pub struct FormulaEngine {
    algebra: AlgebraRef,
}

impl FormulaEngine {
    pub fn new(alg: &AlgebraRef) -> FormulaEngine {
        FormulaEngine { algebra: Arc::clone(alg) }
    }
}

impl CommuteProvider for FormulaEngine {
    fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        commute_formula(&self.algebra, m, n)
    }
}

/// Stateless provider backed by [`commute_recurrence`]; errors on rows
/// without a recurrence.
pub struct RecurrenceEngine {
    algebra: AlgebraRef,
}

impl RecurrenceEngine {
    pub fn new(alg: &AlgebraRef) -> RecurrenceEngine {
        RecurrenceEngine { algebra: Arc::clone(alg) }
    }
}

impl CommuteProvider for RecurrenceEngine {
    fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        commute_recurrence(&self.algebra, m, n)
    }
}

/// Stateless provider backed by [`commute_pullback`]; covers every row.
pub struct PullbackEngine {
    algebra: AlgebraRef,
}

impl PullbackEngine {
    pub fn new(alg: &AlgebraRef) -> PullbackEngine {
        PullbackEngine { algebra: Arc::clone(alg) }
    }
}

impl CommuteProvider for PullbackEngine {
    fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        commute_pullback(&self.algebra, m, n)
    }
}

/// Normalizes `y^m x^n` by structural induction on the relation.
///
/// First `y * x^k` is built for `k = 0..n` by repeated right multiplication
/// with `x` (each step uses only the relation itself); then `y^j x^n` is
/// built by repeated left multiplication with `y`, expanding
/// `y * (x^a y^b) = (y * x^a) * y^b` from the precomputed row.  No closed
/// formula, no recurrence, no isomorphism: this is the reference engine.
pub fn commute_rewrite(alg: &AlgebraRef, m: u32, n: u32) -> Result<NcPoly, NcError> {
    if m as u64 + n as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
        return Err(NcError::DegreeOverflow);
    }
    let one = alg.mode().one();
    if m == 0 || n == 0 {
        return NcPoly::monomial(alg, n, m, one);
    }
    // y_row[k] = normal form of y * x^k, for k = 0..n.  The y-degree of
    // every entry is at most 1, which the right-multiplication step uses.
    let mut y_row: Vec<NcPoly> = Vec::with_capacity(n as usize + 1);
    y_row.push(NcPoly::gen_y(alg));
    for k in 1..=n {
        let prev = &y_row[k as usize - 1];
        let mut next = NcPoly::zero(alg);
        for (mm, c) in prev.terms() {
            if mm.b == 0 {
                // x^a * x = x^(a+1).
                next.add_term(Monomial { a: mm.a + 1, b: 0 }, c.clone())?;
            } else {
                // (x^a y) * x = x^a (yx) = x^a (q xy + alpha x + beta y + gamma).
                debug_assert_eq!(mm.b, 1);
                next.add_term(Monomial { a: mm.a + 1, b: 1 }, c.try_mul(alg.q())?)?;
                next.add_term(Monomial { a: mm.a + 1, b: 0 }, c.try_mul(alg.alpha())?)?;
                next.add_term(Monomial { a: mm.a, b: 1 }, c.try_mul(alg.beta())?)?;
                next.add_term(Monomial { a: mm.a, b: 0 }, c.try_mul(alg.gamma())?)?;
            }
        }
        y_row.push(next);
    }
    // cur = y^j x^n; left-multiply by y until j = m.  Rewriting never raises
    // the x-degree, so every needed y * x^a is present in y_row.
    let mut cur = y_row[n as usize].clone();
    for _ in 1..m {
        let mut next = NcPoly::zero(alg);
        for (mm, c) in cur.terms() {
            // y * (x^a y^b) = (y * x^a) * y^b.
            for (ym, yc) in y_row[mm.a as usize].terms() {
                next.add_term(
                    Monomial { a: ym.a, b: ym.b + mm.b },
                    c.try_mul(yc)?,
                )?;
            }
        }
        cur = next;
    }
    Ok(cur)
}

/// Normalizes `y^m x^n` by the closed formula for the algebra's parameter
/// row; errors with [`NcError::NoClosedFormula`] on the four rows where
/// none is known.
pub fn commute_formula(alg: &AlgebraRef, m: u32, n: u32) -> Result<NcPoly, NcError> {
    formula_for_row(TableRow::of(alg), alg, m, n)
}

/// Evaluates the closed commutation formula of `row` with the parameter
/// values of `alg`.
///
/// Exposed separately from [`commute_formula`] so a formula can be evaluated
/// at parameter values outside its own row - for instance the quantum Weyl
/// formula degenerates termwise to the Weyl formula at `q = 1`, and the
/// degeneration test needs to evaluate it there.
pub fn formula_for_row(
    row: TableRow,
    alg: &AlgebraRef,
    m: u32,
    n: u32,
) -> Result<NcPoly, NcError> {
    if m as u64 + n as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
        return Err(NcError::DegreeOverflow);
    }
    let mode = alg.mode();
    let one = mode.one();
    if m == 0 || n == 0 {
        return NcPoly::monomial(alg, n, m, one);
    }
    let q = alg.q();
    let alpha = alg.alpha();
    let beta = alg.beta();
    let gamma = alg.gamma();
    let int = |k: u32| mode.embed_rat(&crate::coeffs::BigRat::from_integer(k.into()));
    match row {
        TableRow::L000 => NcPoly::monomial(alg, n, m, one),
        TableRow::LA00 => {
            // y^m x^n = x^n (y + n*alpha)^m = sum_k C(m,k) (n*alpha)^(m-k) x^n y^k.
            let na = alpha.try_mul(&int(n)?)?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=m {
                let c = mode.embed_rat(&binomial(m, k))?.try_mul(&na.pow(m - k))?;
                out.add_term(Monomial { a: n, b: k }, c)?;
            }
            Ok(out)
        }
        TableRow::L0B0 => {
            // y^m x^n = (x + m*beta)^n y^m = sum_k C(n,k) (m*beta)^(n-k) x^k y^m.
            let mb = beta.try_mul(&int(m)?)?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=n {
                let c = mode.embed_rat(&binomial(n, k))?.try_mul(&mb.pow(n - k))?;
                out.add_term(Monomial { a: k, b: m }, c)?;
            }
            Ok(out)
        }
        TableRow::L00G => {
            // y^m x^n = sum_k C(m,k) n^(k falling) gamma^k x^(n-k) y^(m-k).
            let mut out = NcPoly::zero(alg);
            for k in 0..=m.min(n) {
                let mut fall = crate::coeffs::BigRat::from_integer(1.into());
                for j in (n - k + 1)..=n {
                    fall *= crate::coeffs::BigRat::from_integer(j.into());
                }
                let c = mode
                    .embed_rat(&(binomial(m, k) * fall))?
                    .try_mul(&gamma.pow(k))?;
                out.add_term(Monomial { a: n - k, b: m - k }, c)?;
            }
            Ok(out)
        }
        TableRow::LA0G => {
            // y^m x^n = alpha^(-n) sum_i C(n,i) (-gamma)^(n-i)
            //           (alpha*x + gamma)^i (y + i*alpha)^m.
            let inv_an = alpha.pow(n).try_inv()?;
            let mut out = NcPoly::zero(alg);
            for i in 0..=n {
                let pref = mode
                    .embed_rat(&binomial(n, i))?
                    .try_mul(&gamma.neg().pow(n - i))?
                    .try_mul(&inv_an)?;
                // (alpha*x + gamma)^i = sum_a C(i,a) alpha^a gamma^(i-a) x^a.
                // (y + i*alpha)^m = sum_b C(m,b) (i*alpha)^(m-b) y^b.
                let ia = alpha.try_mul(&int(i)?)?;
                for a in 0..=i {
                    let cx = mode
                        .embed_rat(&binomial(i, a))?
                        .try_mul(&alpha.pow(a))?
                        .try_mul(&gamma.pow(i - a))?;
                    for b in 0..=m {
                        let cy = mode.embed_rat(&binomial(m, b))?.try_mul(&ia.pow(m - b))?;
                        out.add_term(
                            Monomial { a, b },
                            pref.try_mul(&cx)?.try_mul(&cy)?,
                        )?;
                    }
                }
            }
            Ok(out)
        }
        TableRow::L0BG => {
            // y^m x^n = beta^(-m) sum_i C(m,i) (-gamma)^(m-i)
            //           (x + i*beta)^n (beta*y + gamma)^i.
            let inv_bm = beta.pow(m).try_inv()?;
            let mut out = NcPoly::zero(alg);
            for i in 0..=m {
                let pref = mode
                    .embed_rat(&binomial(m, i))?
                    .try_mul(&gamma.neg().pow(m - i))?
                    .try_mul(&inv_bm)?;
                let ib = beta.try_mul(&int(i)?)?;
                for a in 0..=n {
                    let cx = mode.embed_rat(&binomial(n, a))?.try_mul(&ib.pow(n - a))?;
                    for b in 0..=i {
                        let cy = mode
                            .embed_rat(&binomial(i, b))?
                            .try_mul(&beta.pow(b))?
                            .try_mul(&gamma.pow(i - b))?;
                        out.add_term(
                            Monomial { a, b },
                            pref.try_mul(&cx)?.try_mul(&cy)?,
                        )?;
                    }
                }
            }
            Ok(out)
        }
        TableRow::Q000 => {
            // y^m x^n = q^(mn) x^n y^m.
            let c = q.pow(m.checked_mul(n).ok_or(NcError::DegreeOverflow)?);
            NcPoly::monomial(alg, n, m, c)
        }
        TableRow::QA00 => {
            // y^m x^n = x^n (q^n y + [n] alpha)^m.
            let qn = q.pow(n);
            let na = alpha.try_mul(&q_number(n, q))?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=m {
                let c = mode
                    .embed_rat(&binomial(m, k))?
                    .try_mul(&qn.pow(k))?
                    .try_mul(&na.pow(m - k))?;
                out.add_term(Monomial { a: n, b: k }, c)?;
            }
            Ok(out)
        }
        TableRow::Q0B0 => {
            // y^m x^n = (q^m x + [m] beta)^n y^m.
            let qm = q.pow(m);
            let mb = beta.try_mul(&q_number(m, q))?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=n {
                let c = mode
                    .embed_rat(&binomial(n, k))?
                    .try_mul(&qm.pow(k))?
                    .try_mul(&mb.pow(n - k))?;
                out.add_term(Monomial { a: k, b: m }, c)?;
            }
            Ok(out)
        }
        TableRow::Q00G => {
            // y^m x^n = sum_k [m k] [n]^(k falling) q^((n-k)(m-k)) gamma^k
            //           x^(n-k) y^(m-k).
            let mut out = NcPoly::zero(alg);
            for k in 0..=m.min(n) {
                let c = q_binomial(m, k, q)
                    .try_mul(&q_falling(n, k, q))?
                    .try_mul(&q.pow((n - k) * (m - k)))?
                    .try_mul(&gamma.pow(k))?;
                out.add_term(Monomial { a: n - k, b: m - k }, c)?;
            }
            Ok(out)
        }
        TableRow::QA0G => {
            // y^m x^n = sum_{k=0..n} sum_{j=0..m-k} [n k] gamma^k
            //           (alpha/(1-q))^(m-j-k) c_{j,k} x^(n-k) y^j,
            // c_{j,k} = sum_i (-1)^i C(m,i+j+k) C(i+j,j) [i+j+k]^(k falling)
            //           q^((i+j)(n-k)).
            let ratio = alpha.try_div(&(&one - q))?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=n.min(m) {
                let qb = q_binomial(n, k, q);
                let gk = gamma.pow(k);
                for j in 0..=(m - k) {
                    let mut cjk = mode.zero();
                    for i in 0..=(m - j - k) {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        let mut t = mode.embed_rat(
                            &(binomial(m, i + j + k)
                                * binomial(i + j, j)
                                * crate::coeffs::BigRat::from_integer(sign.into())),
                        )?;
                        t = t.try_mul(&q_falling(i + j + k, k, q))?;
                        t = t.try_mul(&q.pow((i + j) * (n - k)))?;
                        cjk = cjk.try_add(&t)?;
                    }
                    let c = qb
                        .try_mul(&gk)?
                        .try_mul(&ratio.pow(m - j - k))?
                        .try_mul(&cjk)?;
                    out.add_term(Monomial { a: n - k, b: j }, c)?;
                }
            }
            Ok(out)
        }
        TableRow::Q0BG => {
            // Mirror of the previous row:
            // y^m x^n = sum_{k=0..n} sum_{j=0..n-k} [m k] gamma^k
            //           (beta/(1-q))^(n-j-k) c_{j,k} x^j y^(m-k),
            // c_{j,k} = sum_i (-1)^i C(n,i+j+k) C(i+j,j) [i+j+k]^(k falling)
            //           q^((i+j)(m-k)).
            let ratio = beta.try_div(&(&one - q))?;
            let mut out = NcPoly::zero(alg);
            for k in 0..=n.min(m) {
                let qb = q_binomial(m, k, q);
                let gk = gamma.pow(k);
                for j in 0..=(n - k) {
                    let mut cjk = mode.zero();
                    for i in 0..=(n - j - k) {
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        let mut t = mode.embed_rat(
                            &(binomial(n, i + j + k)
                                * binomial(i + j, j)
                                * crate::coeffs::BigRat::from_integer(sign.into())),
                        )?;
                        t = t.try_mul(&q_falling(i + j + k, k, q))?;
                        t = t.try_mul(&q.pow((i + j) * (m - k)))?;
                        cjk = cjk.try_add(&t)?;
                    }
                    let c = qb
                        .try_mul(&gk)?
                        .try_mul(&ratio.pow(n - j - k))?
                        .try_mul(&cjk)?;
                    out.add_term(Monomial { a: j, b: m - k }, c)?;
                }
            }
            Ok(out)
        }
        TableRow::LAB0 | TableRow::LABG | TableRow::QAB0 | TableRow::QABG => {
            Err(NcError::NoClosedFormula(row))
        }
    }
}

/// Normalizes `y^m x^n` by the coefficient recurrence of the algebra's row;
/// only three rows carry one.
///
/// Each recurrence starts from the extremal coefficient 1 and produces the
/// remaining coefficients by exact division; the integer divisors can
/// vanish in small positive characteristic, in which case the error is
/// propagated rather than masked.
pub fn commute_recurrence(alg: &AlgebraRef, m: u32, n: u32) -> Result<NcPoly, NcError> {
    if m as u64 + n as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
        return Err(NcError::DegreeOverflow);
    }
    let mode = alg.mode();
    let one = mode.one();
    if m == 0 || n == 0 {
        return NcPoly::monomial(alg, n, m, one);
    }
    let int = |k: u32| mode.embed_rat(&crate::coeffs::BigRat::from_integer(k.into()));
    let row = TableRow::of(alg);
    match row {
        TableRow::LA00 => {
            // Terms x^n y^k with C_m = 1 and
            // C_k = (k+1) n alpha / (m-k) * C_{k+1}.
            let mut out = NcPoly::zero(alg);
            let mut c = one;
            out.add_term(Monomial { a: n, b: m }, c.clone())?;
            for k in (0..m).rev() {
                let num = int(k + 1)?.try_mul(&int(n)?)?.try_mul(alg.alpha())?;
                c = c.try_mul(&num)?.try_div(&int(m - k)?)?;
                out.add_term(Monomial { a: n, b: k }, c.clone())?;
            }
            Ok(out)
        }
        TableRow::L0B0 => {
            // Terms x^k y^m with C_n = 1 and
            // C_k = (k+1) m beta / (n-k) * C_{k+1}.
            let mut out = NcPoly::zero(alg);
            let mut c = one;
            out.add_term(Monomial { a: n, b: m }, c.clone())?;
            for k in (0..n).rev() {
                let num = int(k + 1)?.try_mul(&int(m)?)?.try_mul(alg.beta())?;
                c = c.try_mul(&num)?.try_div(&int(n - k)?)?;
                out.add_term(Monomial { a: k, b: m }, c.clone())?;
            }
            Ok(out)
        }
        TableRow::L00G => {
            // Terms x^(n-k) y^(m-k) with C_0 = 1 and
            // C_k = (m-k+1)(n-k+1) gamma / k * C_{k-1}.
            let mut out = NcPoly::zero(alg);
            let mut c = one;
            out.add_term(Monomial { a: n, b: m }, c.clone())?;
            for k in 1..=m.min(n) {
                let num = int(m - k + 1)?
                    .try_mul(&int(n - k + 1)?)?
                    .try_mul(alg.gamma())?;
                c = c.try_mul(&num)?.try_div(&int(k)?)?;
                out.add_term(Monomial { a: n - k, b: m - k }, c.clone())?;
            }
            Ok(out)
        }
        other => Err(NcError::NoRecurrence(other)),
    }
}

/// Normalizes `y^m x^n` by pullback through the model algebra: the inverse
/// of the verified isomorphism carries `y` and `x` into the model, the
/// product is computed there by the model's closed formula, and the result
/// is pushed forward again.
///
/// This route covers every row, in particular the four with no known
/// closed formula.
pub fn commute_pullback(alg: &AlgebraRef, m: u32, n: u32) -> Result<NcPoly, NcError> {
    if m as u64 + n as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
        return Err(NcError::DegreeOverflow);
    }
    if m == 0 || n == 0 {
        return NcPoly::monomial(alg, n, m, alg.mode().one());
    }
    let iso = algebra::iso_from_model(alg);
    let back = algebra::invert_affine(&iso).map_err(|_| NcError::AlgebraMismatch)?;
    let model = Arc::clone(iso.source());
    let mut engine = FormulaEngine::new(&model);
    // psi(y)^m * psi(x)^n computed in the model by its closed formula.
    let yy = back.image_y().pow_with(m, &mut engine)?;
    let xx = back.image_x().pow_with(n, &mut engine)?;
    let prod = yy.mul_with(&xx, &mut engine)?;
    // Push forward; products of affine images only ever commute degree-1
    // factors, so the rewriting engine does no real work here.
    algebra::apply_map(&iso, &prod)
}

/// Storage strategy of a [`CommuteCache`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CacheStrategy {
    /// Normalize by rewriting from cached lower-degree entries; store every
    /// entry that is computed, including intermediates.
    CacheOnly,
    /// Normalize by closed formula (pullback where none exists); store
    /// nothing.
    FormulasOnly,
    /// Normalize by closed formula (pullback where none exists); store the
    /// requested entries only.
    CacheAndFormulas,
}

impl CacheStrategy {
    pub const ALL: [CacheStrategy; 3] = [
        CacheStrategy::CacheOnly,
        CacheStrategy::FormulasOnly,
        CacheStrategy::CacheAndFormulas,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CacheStrategy::CacheOnly => "cache-only",
            CacheStrategy::FormulasOnly => "formulas-only",
            CacheStrategy::CacheAndFormulas => "cache-and-formulas",
        }
    }
}

impl std::fmt::Display for CacheStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CacheStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cache-only" | "cache" => Ok(CacheStrategy::CacheOnly),
            "formulas-only" | "formulas" => Ok(CacheStrategy::FormulasOnly),
            "cache-and-formulas" | "mixed" => Ok(CacheStrategy::CacheAndFormulas),
            other => Err(format!("unknown cache strategy '{}'", other)),
        }
    }
}

/// A commutation matrix cache for one algebra.
///
/// Stores normal forms of `y^m x^n` under one of three strategies and
/// counts every public request per `(m, n)` pair.  Requests for trivial
/// pairs (`m = 0` or `n = 0`) are answered directly and neither stored nor
/// counted; internal recursion of the [`CacheStrategy::CacheOnly`] strategy
/// is not counted either, so request matrices are comparable across
/// strategies.
pub struct CommuteCache {
    algebra: AlgebraRef,
    strategy: CacheStrategy,
    matrix: BTreeMap<(u32, u32), NcPoly>,
    counters: BTreeMap<(u32, u32), u64>,
    peak_entries: usize,
}

impl CommuteCache {
    pub fn new(alg: &AlgebraRef, strategy: CacheStrategy) -> CommuteCache {
        CommuteCache {
            algebra: Arc::clone(alg),
            strategy,
            matrix: BTreeMap::new(),
            counters: BTreeMap::new(),
            peak_entries: 0,
        }
    }

    pub fn strategy(&self) -> CacheStrategy {
        self.strategy
    }

    /// Number of entries currently stored.
    pub fn stored_entries(&self) -> usize {
        self.matrix.len()
    }

    /// Largest number of entries ever stored at once.
    pub fn peak_entries(&self) -> usize {
        self.peak_entries
    }

    /// Per-`(m, n)` request counts, in ascending `(m, n)` order.
    pub fn counters(&self) -> &BTreeMap<(u32, u32), u64> {
        &self.counters
    }

    /// Stored `(m, n)` keys, ascending.
    pub fn stored_keys(&self) -> Vec<(u32, u32)> {
        self.matrix.keys().copied().collect()
    }

    /// Drops all cached entries of total degree `m + n` above the bound.
    /// Off by default in every workload; exposed for memory-capped runs.
    pub fn clear_above(&mut self, max_total_degree: u32) {
        self.matrix
            .retain(|&(m, n), _| m as u64 + n as u64 <= max_total_degree as u64);
    }

    /// Requests the normal form of `y^m x^n`, counting the request and
    /// consulting or filling the store according to the strategy.
    pub fn request(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        if m == 0 || n == 0 {
            return NcPoly::monomial(&self.algebra, n, m, self.algebra.mode().one());
        }
        *self.counters.entry((m, n)).or_insert(0) += 1;
        match self.strategy {
            CacheStrategy::CacheOnly => self.fetch_rewriting(m, n),
            CacheStrategy::FormulasOnly => formulas_or_pullback(&self.algebra, m, n),
            CacheStrategy::CacheAndFormulas => {
                if let Some(hit) = self.matrix.get(&(m, n)) {
                    return Ok(hit.clone());
                }
                let value = formulas_or_pullback(&self.algebra, m, n)?;
                self.store((m, n), value.clone());
                Ok(value)
            }
        }
    }

    fn store(&mut self, key: (u32, u32), value: NcPoly) {
        self.matrix.insert(key, value);
        self.peak_entries = self.peak_entries.max(self.matrix.len());
    }

    /// The rewriting strategy: fill the row `(1, 1..n)` and then the column
    /// `(2..m, n)` from already-stored lower entries, storing every
    /// intermediate.
    fn fetch_rewriting(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        if m as u64 + n as u64 > Monomial::MAX_TOTAL_DEGREE as u64 {
            return Err(NcError::DegreeOverflow);
        }
        for k in 1..=n {
            if self.matrix.contains_key(&(1, k)) {
                continue;
            }
            let prev = if k == 1 {
                NcPoly::gen_y(&self.algebra)
            } else {
                self.matrix[&(1, k - 1)].clone()
            };
            let next = self.right_mul_x(&prev)?;
            self.store((1, k), next);
        }
        for j in 2..=m {
            if self.matrix.contains_key(&(j, n)) {
                continue;
            }
            let prev = self.matrix[&(j - 1, n)].clone();
            let next = self.left_mul_y(&prev)?;
            self.store((j, n), next);
        }
        Ok(self.matrix[&(m, n)].clone())
    }

    /// `p * x` for `p` of y-degree at most 1, using only the relation.
    fn right_mul_x(&self, p: &NcPoly) -> Result<NcPoly, NcError> {
        let alg = &self.algebra;
        let mut out = NcPoly::zero(alg);
        for (mm, c) in p.terms() {
            if mm.b == 0 {
                out.add_term(Monomial { a: mm.a + 1, b: 0 }, c.clone())?;
            } else {
                debug_assert_eq!(mm.b, 1);
                out.add_term(Monomial { a: mm.a + 1, b: 1 }, c.try_mul(alg.q())?)?;
                out.add_term(Monomial { a: mm.a + 1, b: 0 }, c.try_mul(alg.alpha())?)?;
                out.add_term(Monomial { a: mm.a, b: 1 }, c.try_mul(alg.beta())?)?;
                out.add_term(Monomial { a: mm.a, b: 0 }, c.try_mul(alg.gamma())?)?;
            }
        }
        Ok(out)
    }

    /// `y * p`, expanding `y * (x^a y^b) = (y x^a) * y^b` from stored row
    /// entries.
    fn left_mul_y(&self, p: &NcPoly) -> Result<NcPoly, NcError> {
        let alg = &self.algebra;
        let mut out = NcPoly::zero(alg);
        for (mm, c) in p.terms() {
            if mm.a == 0 {
                out.add_term(Monomial { a: 0, b: mm.b + 1 }, c.clone())?;
            } else {
                let row = &self.matrix[&(1, mm.a)];
                for (ym, yc) in row.terms() {
                    out.add_term(
                        Monomial { a: ym.a, b: ym.b + mm.b },
                        c.try_mul(yc)?,
                    )?;
                }
            }
        }
        Ok(out)
    }
}

impl CommuteProvider for CommuteCache {
    fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }
    fn commute(&mut self, m: u32, n: u32) -> Result<NcPoly, NcError> {
        self.request(m, n)
    }
}

/// Closed formula where the row has one, pullback otherwise.
fn formulas_or_pullback(alg: &AlgebraRef, m: u32, n: u32) -> Result<NcPoly, NcError> {
    if TableRow::of(alg).has_closed_formula() {
        commute_formula(alg, m, n)
    } else {
        commute_pullback(alg, m, n)
    }
}

/// Term counts of `y^i x` and `y x^i` in the fully generic algebra.
///
/// Both normal forms have exactly `2(i + 1)` terms, which makes the generic
/// commutation quadratic in size; the pair is returned for symmetric
/// checking.
pub fn term_counts(alg: &AlgebraRef, i: u32) -> Result<(usize, usize), NcError> {
    if !alg.is_generic() {
        return Err(NcError::NotGeneric);
    }
    let ymx = commute_rewrite(alg, i, 1)?;
    let yxn = commute_rewrite(alg, 1, i)?;
    Ok((ymx.num_terms(), yxn.num_terms()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraParams;

    fn sym(p: Param) -> FieldElem {
        FieldElem::symbol(p)
    }

    fn generic() -> AlgebraRef {
        Arc::new(AlgebraParams::generic())
    }

    fn rat_alg(q: i64, a: i64, b: i64, g: i64) -> AlgebraRef {
        let m = FieldMode::Rational;
        Arc::new(
            AlgebraParams::new(m.from_i64(q), m.from_i64(a), m.from_i64(b), m.from_i64(g))
                .unwrap(),
        )
    }

    #[test]
    fn monomial_order() {
        let m = |a, b| Monomial::new(a, b).unwrap();
        assert!(m(0, 0) < m(1, 0));
        assert!(m(0, 1) < m(1, 0)); // same degree: larger x-exponent wins
        assert!(m(1, 1) < m(3, 0));
        assert!(m(0, 3) < m(1, 1).max(m(2, 1)));
        assert_eq!(m(2, 3).total_degree(), 5);
        assert!(Monomial::new(Monomial::MAX_TOTAL_DEGREE, 1).is_err());
        assert!(Monomial::new(Monomial::MAX_TOTAL_DEGREE, 0).is_ok());
    }

    #[test]
    fn commute_one_one_is_relation() {
        for alg in [
            generic(),
            rat_alg(1, 0, 0, 1),
            rat_alg(2, 3, 4, 5),
            rat_alg(1, 0, 1, 0),
        ] {
            let got = commute_rewrite(&alg, 1, 1).unwrap();
            assert_eq!(got, relation_rhs(&alg));
        }
    }

    #[test]
    fn generic_low_degree_normal_forms() {
        // y x^2 and y^2 x in the generic algebra, against hand computation.
        let alg = generic();
        let q = sym(Param::Q);
        let al = sym(Param::Alpha);
        let be = sym(Param::Beta);
        let ga = sym(Param::Gamma);
        let one = FieldMode::Symbolic.one();
        let two = FieldMode::Symbolic.from_i64(2);
        let q1 = &q + &one;

        let yxx = commute_rewrite(&alg, 1, 2).unwrap();
        let expect = NcPoly::from_terms(
            &alg,
            [
                (2, 1, q.pow(2)),
                (2, 0, al.try_mul(&q1).unwrap()),
                (1, 1, (&(&two * &q) * &be)),
                (1, 0, &(&ga * &q1) + &(&al * &be)),
                (0, 1, be.pow(2)),
                (0, 0, &be * &ga),
            ],
        )
        .unwrap();
        assert_eq!(yxx, expect);

        let yyx = commute_rewrite(&alg, 2, 1).unwrap();
        let expect = NcPoly::from_terms(
            &alg,
            [
                (1, 2, q.pow(2)),
                (0, 2, be.try_mul(&q1).unwrap()),
                (1, 1, (&(&two * &q) * &al)),
                (0, 1, &(&ga * &q1) + &(&al * &be)),
                (1, 0, al.pow(2)),
                (0, 0, &al * &ga),
            ],
        )
        .unwrap();
        assert_eq!(yyx, expect);
    }

    #[test]
    fn generic_term_counts() {
        let alg = generic();
        for i in 1..=6 {
            let (c1, c2) = term_counts(&alg, i).unwrap();
            assert_eq!(c1, 2 * (i as usize + 1));
            assert_eq!(c2, 2 * (i as usize + 1));
        }
        assert!(matches!(
            term_counts(&rat_alg(2, 1, 1, 1), 3),
            Err(NcError::NotGeneric)
        ));
    }

    #[test]
    fn formulas_agree_with_rewriting_on_symbolic_rows() {
        for row in TableRow::ALL {
            if !row.has_closed_formula() {
                continue;
            }
            let alg = row.symbolic_algebra();
            for m in 0..=4u32 {
                for n in 0..=4u32 {
                    let by_formula = formula_for_row(row, &alg, m, n).unwrap();
                    let by_rewrite = commute_rewrite(&alg, m, n).unwrap();
                    assert_eq!(by_formula, by_rewrite, "row {} m={} n={}", row, m, n);
                }
            }
        }
    }

    #[test]
    fn formula_missing_rows_error() {
        for row in [TableRow::LAB0, TableRow::LABG, TableRow::QAB0, TableRow::QABG] {
            let alg = row.symbolic_algebra();
            assert!(matches!(
                commute_formula(&alg, 2, 2),
                Err(NcError::NoClosedFormula(r)) if r == row
            ));
        }
    }

    #[test]
    fn recurrences_agree_with_rewriting() {
        for row in [TableRow::LA00, TableRow::L0B0, TableRow::L00G] {
            let alg = row.symbolic_algebra();
            for m in 0..=5u32 {
                for n in 0..=5u32 {
                    let by_rec = commute_recurrence(&alg, m, n).unwrap();
                    let by_rewrite = commute_rewrite(&alg, m, n).unwrap();
                    assert_eq!(by_rec, by_rewrite, "row {} m={} n={}", row, m, n);
                }
            }
        }
        assert!(matches!(
            commute_recurrence(&generic(), 2, 2),
            Err(NcError::NoRecurrence(_))
        ));
    }

    #[test]
    fn recurrence_example_coefficients() {
        // (1, alpha, 0, 0), m=2, n=1: C_2 = 1, C_1 = 2 alpha, C_0 = alpha^2.
        let alg = TableRow::LA00.symbolic_algebra();
        let p = commute_recurrence(&alg, 2, 1).unwrap();
        let al = sym(Param::Alpha);
        assert_eq!(p.coeff(1, 2), FieldMode::Symbolic.one());
        assert_eq!(p.coeff(1, 1), &FieldMode::Symbolic.from_i64(2) * &al);
        assert_eq!(p.coeff(1, 0), al.pow(2));
    }

    #[test]
    fn pullback_agrees_with_rewriting_on_formula_free_rows() {
        for row in [TableRow::LAB0, TableRow::LABG, TableRow::QAB0, TableRow::QABG] {
            let alg = row.symbolic_algebra();
            for m in 0..=3u32 {
                for n in 0..=3u32 {
                    let by_pull = commute_pullback(&alg, m, n).unwrap();
                    let by_rewrite = commute_rewrite(&alg, m, n).unwrap();
                    assert_eq!(by_pull, by_rewrite, "row {} m={} n={}", row, m, n);
                }
            }
        }
    }

    /// Partial closed forms printed for the two-parameter rows; retained as
    /// extra oracles for the pullback route.
    #[test]
    fn partial_forms_for_two_parameter_rows() {
        // (1, alpha, beta, 0):
        //   y^m x = (1/alpha) ((alpha x + beta y)(y + alpha)^m - beta y^(m+1)).
        let alg = TableRow::LAB0.symbolic_algebra();
        let al = sym(Param::Alpha);
        let be = sym(Param::Beta);
        let u = NcPoly::from_terms(&alg, [(1, 0, al.clone()), (0, 1, be.clone())]).unwrap();
        for m in 1..=5u32 {
            let ypa = NcPoly::from_terms(
                &alg,
                [(0, 1, FieldMode::Symbolic.one()), (0, 0, al.clone())],
            )
            .unwrap();
            let lhs = u
                .mul(&ypa.pow(m).unwrap())
                .unwrap()
                .sub(
                    &NcPoly::monomial(&alg, 0, m + 1, be.clone()).unwrap(),
                )
                .unwrap()
                .scalar_mul(&al.try_inv().unwrap())
                .unwrap();
            assert_eq!(lhs, commute_rewrite(&alg, m, 1).unwrap(), "m={}", m);
        }
        // (q, alpha, beta, 0):
        //   y^m x = x (q y + alpha)^m
        //         + beta sum_{k=1..m} y^k alpha^(m-k)
        //           sum_{i=0..k-1} C(m-k+i, i) q^i.
        let alg = TableRow::QAB0.symbolic_algebra();
        let q = sym(Param::Q);
        let al = sym(Param::Alpha);
        let be = sym(Param::Beta);
        for m in 1..=5u32 {
            let qya = NcPoly::from_terms(&alg, [(0, 1, q.clone()), (0, 0, al.clone())]).unwrap();
            let mut acc = NcPoly::gen_x(&alg).mul(&qya.pow(m).unwrap()).unwrap();
            for k in 1..=m {
                let mut inner = FieldMode::Symbolic.zero();
                for i in 0..k {
                    let c = FieldMode::Symbolic
                        .embed_rat(&binomial(m - k + i, i))
                        .unwrap();
                    inner = inner.try_add(&c.try_mul(&q.pow(i)).unwrap()).unwrap();
                }
                let coeff = be
                    .try_mul(&al.pow(m - k))
                    .unwrap()
                    .try_mul(&inner)
                    .unwrap();
                acc = acc
                    .add(&NcPoly::monomial(&alg, 0, k, coeff).unwrap())
                    .unwrap();
            }
            assert_eq!(acc, commute_rewrite(&alg, m, 1).unwrap(), "m={}", m);
        }
    }

    #[test]
    fn specialization_coherence_samples() {
        let gen = generic();
        let samples = [(2i64, 3, 4, 5), (1, 2, 0, 7), (5, 0, 0, 0), (1, 0, 0, 0)];
        for (q, a, b, g) in samples {
            let conc = rat_alg(q, a, b, g);
            for (m, n) in [(1u32, 1u32), (2, 3), (3, 2), (4, 4)] {
                let sym_result = commute_rewrite(&gen, m, n).unwrap();
                let specialized = sym_result.specialize(&conc).unwrap();
                let direct = commute_rewrite(&conc, m, n).unwrap();
                assert_eq!(specialized, direct, "({},{},{},{}) m={} n={}", q, a, b, g, m, n);
            }
        }
    }

    #[test]
    fn mul_and_pow_basics() {
        // Commutative sanity: (x+y)^2 = x^2 + 2xy + y^2.
        let alg = rat_alg(1, 0, 0, 0);
        let xy = NcPoly::gen_x(&alg).add(&NcPoly::gen_y(&alg)).unwrap();
        let sq = xy.pow(2).unwrap();
        assert_eq!(sq.to_string(), "x^2 + 2*x*y + y^2");
        // Weyl algebra: yx = xy + 1, so (xy)(yx) differs from (xy)(xy).
        let weyl = rat_alg(1, 0, 0, 1);
        let x = NcPoly::gen_x(&weyl);
        let y = NcPoly::gen_y(&weyl);
        let yx = y.mul(&x).unwrap();
        assert_eq!(yx.to_string(), "x*y + 1");
        // Associativity spot check in the generic algebra.
        let g = generic();
        let f1 = NcPoly::from_terms(&g, [(1, 1, sym(Param::Q)), (0, 1, sym(Param::Beta))]).unwrap();
        let f2 = NcPoly::gen_y(&g).add(&NcPoly::one(&g)).unwrap();
        let f3 = NcPoly::gen_x(&g).mul(&NcPoly::gen_y(&g)).unwrap();
        let left = f1.mul(&f2).unwrap().mul(&f3).unwrap();
        let right = f1.mul(&f2.mul(&f3).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn mismatched_algebras_rejected() {
        let a = rat_alg(1, 0, 0, 1);
        let b = rat_alg(2, 0, 0, 1);
        let x = NcPoly::gen_x(&a);
        let y = NcPoly::gen_y(&b);
        assert!(matches!(x.add(&y), Err(NcError::AlgebraMismatch)));
        assert!(matches!(x.mul(&y), Err(NcError::AlgebraMismatch)));
    }

    #[test]
    fn degree_cap_enforced() {
        let alg = rat_alg(1, 0, 0, 1);
        let cap = Monomial::MAX_TOTAL_DEGREE;
        let big = NcPoly::monomial(&alg, cap, 0, FieldMode::Rational.one()).unwrap();
        let x = NcPoly::gen_x(&alg);
        assert!(matches!(big.mul(&x), Err(NcError::DegreeOverflow)));
        assert!(NcPoly::monomial(&alg, cap, 1, FieldMode::Rational.one()).is_err());
    }

    #[test]
    fn display_forms() {
        let alg = rat_alg(1, 0, 0, 1);
        let p = NcPoly::from_terms(
            &alg,
            [
                (2, 2, FieldMode::Rational.one()),
                (1, 1, FieldMode::Rational.from_i64(4)),
                (0, 0, FieldMode::Rational.from_i64(2)),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "x^2*y^2 + 4*x*y + 2");
        let g = generic();
        let p = NcPoly::from_terms(
            &g,
            [
                (1, 2, sym(Param::Q).pow(2)),
                (0, 1, &sym(Param::Q) + &FieldMode::Symbolic.one()),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "q^2*x*y^2 + (q+1)*y");
        let neg = NcPoly::from_terms(
            &alg,
            [(1, 0, FieldMode::Rational.from_i64(-1)), (0, 0, FieldMode::Rational.from_i64(-3))],
        )
        .unwrap();
        assert_eq!(neg.to_string(), "-x - 3");
        assert_eq!(NcPoly::zero(&alg).to_string(), "0");
    }

    #[test]
    fn cache_strategies_equivalent_and_counted() {
        let alg = generic();
        let f = NcPoly::from_terms(
            &alg,
            [(1, 1, FieldMode::Symbolic.one()), (0, 1, sym(Param::Beta))],
        )
        .unwrap();
        let g = NcPoly::from_terms(
            &alg,
            [(2, 1, sym(Param::Q)), (1, 0, FieldMode::Symbolic.one())],
        )
        .unwrap();
        let mut results = Vec::new();
        let mut counter_sets = Vec::new();
        for strategy in CacheStrategy::ALL {
            let mut cache = CommuteCache::new(&alg, strategy);
            let prod = f.mul_with(&g, &mut cache).unwrap();
            let sq = prod.pow_with(2, &mut cache).unwrap();
            results.push(sq);
            counter_sets.push(cache.counters().clone());
            match strategy {
                CacheStrategy::FormulasOnly => assert_eq!(cache.stored_entries(), 0),
                _ => assert!(cache.stored_entries() > 0),
            }
        }
        assert_eq!(results[0], results[1]);
        assert_eq!(results[1], results[2]);
        // Same requests regardless of storage strategy.
        assert_eq!(counter_sets[0], counter_sets[1]);
        assert_eq!(counter_sets[1], counter_sets[2]);
    }

    #[test]
    fn cache_only_stores_intermediates() {
        let alg = rat_alg(1, 0, 0, 1);
        let mut cache = CommuteCache::new(&alg, CacheStrategy::CacheOnly);
        let p = cache.request(2, 2).unwrap();
        assert_eq!(p, commute_rewrite(&alg, 2, 2).unwrap());
        // Intermediates (1,1), (1,2) were stored along with (2,2).
        let keys = cache.stored_keys();
        assert!(keys.contains(&(1, 1)));
        assert!(keys.contains(&(1, 2)));
        assert!(keys.contains(&(2, 2)));
        // The requested-only strategy stores just the request.
        let mut lean = CommuteCache::new(&alg, CacheStrategy::CacheAndFormulas);
        lean.request(2, 2).unwrap();
        assert_eq!(lean.stored_keys(), vec![(2, 2)]);
        // Trivial requests are neither counted nor stored.
        cache.request(0, 5).unwrap();
        assert!(!cache.counters().contains_key(&(0, 5)));
    }

    #[test]
    fn cache_clear_above_degree() {
        let alg = rat_alg(1, 0, 0, 1);
        let mut cache = CommuteCache::new(&alg, CacheStrategy::CacheOnly);
        cache.request(3, 3).unwrap();
        let peak = cache.peak_entries();
        assert!(peak >= 4);
        cache.clear_above(3);
        assert!(cache.stored_keys().iter().all(|&(m, n)| m + n <= 3));
        // Peak is historical and survives clearing.
        assert_eq!(cache.peak_entries(), peak);
        // The cache refills correctly afterwards.
        let p = cache.request(3, 3).unwrap();
        assert_eq!(p, commute_rewrite(&alg, 3, 3).unwrap());
    }

    #[test]
    fn cache_results_match_oracle_for_all_strategies() {
        for alg in [rat_alg(2, 1, 1, 0), rat_alg(1, 2, 3, 4)] {
            for strategy in CacheStrategy::ALL {
                let mut cache = CommuteCache::new(&alg, strategy);
                for (m, n) in [(1, 1), (2, 1), (1, 2), (3, 2), (2, 3), (3, 3)] {
                    let got = cache.request(m, n).unwrap();
                    let want = commute_rewrite(&alg, m, n).unwrap();
                    assert_eq!(got, want, "{} ({},{})", strategy, m, n);
                }
            }
        }
    }
}
