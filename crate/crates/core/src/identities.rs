//! Binomial-type theorems and the misordering index of words.
//!
//! The bracket powers `[u+v]^n` and `[u+v]_q^n` collect the ordered
//! products `u^i v^(n-i)` with (q-)binomial weights; in the commutative and
//! q-commutative cases they coincide with the true power `(u+v)^n`.  In the
//! Weyl and shift models the discrepancy has a closed combinatorial form -
//! even double factorials for Weyl, Stirling numbers for shift - and both
//! are implemented here next to the generic power so they can be compared
//! exactly.

use thiserror::Error;

use crate::algebra::{AlgebraRef, ModelClass};
use crate::coeffs::BigRat;
use crate::ncpoly::{NcError, NcPoly};
use crate::qcomb::{binomial, double_fact_even, q_binomial, stirling2};

/// Errors from the identity evaluators.
#[derive(Clone, PartialEq, Debug, Error)]
pub enum IdentityError {
    #[error("expected the {expected} model algebra, got parameters {got}")]
    WrongAlgebra { expected: ModelClass, got: String },
    #[error("word may contain only the letters 'a' and 'b', found {0:?}")]
    BadLetter(char),
    #[error(transparent)]
    Nc(#[from] NcError),
    #[error(transparent)]
    Coeff(#[from] crate::coeffs::CoeffError),
}

/// One letter of the two-letter alphabet; `a` plays `x` and `b` plays `y`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Letter {
    A,
    B,
}

/// A word over `{a, b}` - an unordered product waiting to be normalized.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Word {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Counts of `a`'s and `b`'s.
    pub fn letter_counts(&self) -> (u32, u32) {
        let a = self.0.iter().filter(|&&l| l == Letter::A).count() as u32;
        (a, self.0.len() as u32 - a)
    }

    /// True iff every `a` precedes every `b`.
    pub fn is_standard(&self) -> bool {
        self.0.windows(2).all(|w| !(w[0] == Letter::B && w[1] == Letter::A))
    }
}

impl std::str::FromStr for Word {
    type Err = IdentityError;
    fn from_str(s: &str) -> Result<Word, IdentityError> {
        s.chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                other => Err(IdentityError::BadLetter(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "(empty)");
        }
        for l in &self.0 {
            f.write_str(match l {
                Letter::A => "a",
                Letter::B => "b",
            })?;
        }
        Ok(())
    }
}

/// The misordering index: the number of adjacent unequal-letter swaps
/// needed to move every `a` to the left, computed as the inversion count -
/// the number of pairs `i < j` with `w[i] = b` and `w[j] = a`.
pub fn misordering_index(w: &Word) -> u64 {
    let mut bs_seen = 0u64;
    let mut inversions = 0u64;
    for l in w.letters() {
        match l {
            Letter::B => bs_seen += 1,
            Letter::A => inversions += bs_seen,
        }
    }
    inversions
}

/// The same index by literally simulating the sort: repeatedly swap the
/// rightmost adjacent `ba` pair until the word is standard, counting swaps.
/// Quadratic; kept as an independent reference for [`misordering_index`].
pub fn misordering_index_by_swaps(w: &Word) -> u64 {
    let mut letters = w.letters().to_vec();
    let mut swaps = 0u64;
    loop {
        let pos = letters
            .windows(2)
            .rposition(|p| p[0] == Letter::B && p[1] == Letter::A);
        match pos {
            None => return swaps,
            Some(i) => {
                letters.swap(i, i + 1);
                swaps += 1;
            }
        }
    }
}

/// The standard monomial a word converges to, with its misordering index:
/// `bbbab` converges to `abbbb`, so the result is `((1, 4), 3)`.
pub fn converge(w: &Word) -> ((u32, u32), u64) {
    (w.letter_counts(), misordering_index(w))
}

/// The bracket power `[u+v]^n = sum_i C(n,i) u^i v^(n-i)` - or, with
/// `q_weighted`, the q-bracket `[u+v]_q^n` with q-binomial weights taken at
/// the algebra's `q`.  The summands are the ordered products as displayed;
/// for generators `u = x`, `v = y` no commutation ever happens.
pub fn bracket_pow(
    u: &NcPoly,
    v: &NcPoly,
    n: u32,
    q_weighted: bool,
) -> Result<NcPoly, NcError> {
    let alg = u.algebra();
    let mode = alg.mode();
    let mut acc = NcPoly::zero(alg);
    // Power ladders of both factors.
    let mut us = Vec::with_capacity(n as usize + 1);
    us.push(NcPoly::one(alg));
    for i in 1..=n as usize {
        us.push(us[i - 1].mul(u)?);
    }
    let mut vs = Vec::with_capacity(n as usize + 1);
    vs.push(NcPoly::one(alg));
    for i in 1..=n as usize {
        vs.push(vs[i - 1].mul(v)?);
    }
    for i in 0..=n {
        let w = if q_weighted {
            q_binomial(n, i, alg.q())
        } else {
            mode.embed_rat(&binomial(n, i))?
        };
        let term = us[i as usize]
            .mul(&vs[(n - i) as usize])?
            .scalar_mul(&w)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

fn require_model(alg: &AlgebraRef, model: ModelClass) -> Result<(), IdentityError> {
    // The quantum classes keep the algebra's own q; the classical classes
    // ignore it.
    let expected = model.params(alg.mode(), alg.q());
    if expected
        .as_ref()
        .map(|e| e == alg.as_ref())
        .unwrap_or(false)
    {
        Ok(())
    } else {
        Err(IdentityError::WrongAlgebra { expected: model, got: alg.to_string() })
    }
}

/// The Weyl binomial defect `(x+d)^n - [x+d]^n` as the closed double sum
/// `sum_{k<=n-2} sum_{j<=n-k-2} C(n,j) C(n-j,k) g(n-j-k) x^k d^j`, where
/// `g(2t) = (2t-1)!!` and `g(odd) = 0`.  The algebra must be the Weyl model.
pub fn weyl_binomial_defect(alg: &AlgebraRef, n: u32) -> Result<NcPoly, IdentityError> {
    require_model(alg, ModelClass::Weyl)?;
    let mode = alg.mode();
    let mut acc = NcPoly::zero(alg);
    if n < 2 {
        return Ok(acc);
    }
    for k in 0..=(n - 2) {
        for j in 0..=(n - k - 2) {
            let c = binomial(n, j) * binomial(n - j, k) * double_fact_even(n - j - k);
            let coeff = mode.embed_rat(&c)?;
            acc = acc.add(&NcPoly::monomial(alg, k, j, coeff)?)?;
        }
    }
    Ok(acc)
}

/// The same defect through the equivalent half-power form
/// `sum n!/(j! k! ((n-j-k)/2)!) (1/2)^((n-j-k)/2) x^k d^j` over the pairs
/// with `n - j - k` even; evaluated independently of
/// [`weyl_binomial_defect`] so the two printed variants cross-check.
pub fn weyl_binomial_defect_half_powers(
    alg: &AlgebraRef,
    n: u32,
) -> Result<NcPoly, IdentityError> {
    require_model(alg, ModelClass::Weyl)?;
    let mode = alg.mode();
    let mut acc = NcPoly::zero(alg);
    if n < 2 {
        return Ok(acc);
    }
    let fact = |m: u32| -> BigRat {
        let mut f = BigRat::from_integer(1.into());
        for i in 2..=m {
            f *= BigRat::from_integer(i.into());
        }
        f
    };
    let half = BigRat::new(1.into(), 2.into());
    for k in 0..=(n - 2) {
        for j in 0..=(n - k - 2) {
            let rest = n - j - k;
            if rest % 2 != 0 {
                continue;
            }
            let mut c = fact(n) / (fact(j) * fact(k) * fact(rest / 2));
            for _ in 0..(rest / 2) {
                c *= half.clone();
            }
            let coeff = mode.embed_rat(&c)?;
            acc = acc.add(&NcPoly::monomial(alg, k, j, coeff)?)?;
        }
    }
    Ok(acc)
}

/// The shift binomial theorem: evaluates
/// `[x+s]^n + sum_{k<=n-1} sum_{j<=n-k-1} C(n,k) S(n-k,j) x^k s^j`
/// with Stirling numbers of the second kind; equals `(x+s)^n` in the shift
/// model, which must be the supplied algebra.
pub fn shift_binomial(alg: &AlgebraRef, n: u32) -> Result<NcPoly, IdentityError> {
    require_model(alg, ModelClass::Shift)?;
    let mode = alg.mode();
    let x = NcPoly::gen_x(alg);
    let s = NcPoly::gen_y(alg);
    let mut acc = bracket_pow(&x, &s, n, false)?;
    if n == 0 {
        return Ok(acc);
    }
    for k in 0..=(n - 1) {
        for j in 0..=(n - k - 1) {
            let c = binomial(n, k) * stirling2(n - k, j);
            let coeff = mode.embed_rat(&c)?;
            acc = acc.add(&NcPoly::monomial(alg, k, j, coeff)?)?;
        }
    }
    Ok(acc)
}

/// All `2^n` words of length `n`, in lexicographic order with `a < b`.
/// Small lengths only; the enumeration backs the free-expansion check
/// `(a+b)^n = sum over words`.
pub fn words_of_length(n: u32) -> Vec<Word> {
    assert!(n <= 20, "word enumeration is meant for small lengths");
    let count = 1usize << n;
    let mut out = Vec::with_capacity(count);
    for bits in 0..count {
        let letters = (0..n)
            .map(|i| {
                if bits >> (n - 1 - i) & 1 == 0 {
                    Letter::A
                } else {
                    Letter::B
                }
            })
            .collect();
        out.push(Word(letters));
    }
    out
}
