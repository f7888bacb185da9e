//! q-combinatorics and classical counting helpers.
//!
//! All q-analogues take the deformation parameter as a [`FieldElem`] and
//! compute in its field mode, so the same code serves generic `q`, rational
//! `q` and `q` in a prime field.  Everything here is division-free: the
//! q-binomial uses the q-Pascal recurrence rather than the quotient of
//! q-factorials, so specializing `q` to a root of unity stays well defined.
//!
//! Integer-valued helpers (`binomial`, `stirling2`, `double_fact_even`)
//! return exact rationals and memoize their recurrence rows per thread.

use std::cell::RefCell;
use std::collections::HashMap;

use num::{One, Zero};

use crate::coeffs::{BigRat, FieldElem, Param, ParamRat};

/// The q-integer `[n] = 1 + q + ... + q^(n-1)`; `[0] = 0`.
pub fn q_number(n: u32, q: &FieldElem) -> FieldElem {
    let mode = q.mode();
    let mut acc = mode.zero();
    let mut power = mode.one();
    for _ in 0..n {
        acc = &acc + &power;
        power = &power * q;
    }
    acc
}

/// The q-factorial `[n]! = [1][2]...[n]`; `[0]! = 1`.
pub fn q_factorial(n: u32, q: &FieldElem) -> FieldElem {
    let mut acc = q.mode().one();
    for k in 1..=n {
        acc = &acc * &q_number(k, q);
    }
    acc
}

/// The Gaussian binomial coefficient, via the q-Pascal recurrence
/// `[n k] = [n-1 k-1] + q^k * [n-1 k]`; zero for `k > n`.
///
/// For the symbolic indeterminate `q` the results are memoized per thread.
pub fn q_binomial(n: u32, k: u32, q: &FieldElem) -> FieldElem {
    if k > n {
        return q.mode().zero();
    }
    if *q == FieldElem::symbol(Param::Q) {
        thread_local! {
            static MEMO: RefCell<HashMap<(u32, u32), ParamRat>> = RefCell::new(HashMap::new());
        }
        if let Some(hit) = MEMO.with(|m| m.borrow().get(&(n, k)).cloned()) {
            return FieldElem::Sym(hit);
        }
        let value = q_binomial_row(n, k, q);
        if let FieldElem::Sym(r) = &value {
            MEMO.with(|m| m.borrow_mut().insert((n, k), r.clone()));
        }
        return value;
    }
    q_binomial_row(n, k, q)
}

/// Row-by-row q-Pascal evaluation without memoization.
fn q_binomial_row(n: u32, k: u32, q: &FieldElem) -> FieldElem {
    let mode = q.mode();
    // row[j] = [i j] while sweeping i = 0..n.
    let kk = k.min(n) as usize;
    let mut row: Vec<FieldElem> = vec![mode.one()];
    for _i in 1..=n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(mode.one());
        let mut qj = q.clone(); // q^j for j = 1..
        for j in 1..row.len() + 1 {
            let left = row.get(j - 1).cloned().unwrap_or_else(|| mode.zero());
            let right = row.get(j).cloned().unwrap_or_else(|| mode.zero());
            if j > kk {
                break;
            }
            next.push(&left + &(&qj * &right));
            qj = &qj * q;
        }
        row = next;
    }
    row.get(k as usize).cloned().unwrap_or_else(|| mode.zero())
}

/// The q-Pochhammer symbol `(a; q)_n = (1-a)(1-aq)...(1-aq^(n-1))`.
pub fn q_pochhammer(a: &FieldElem, n: u32, q: &FieldElem) -> FieldElem {
    let mode = q.mode();
    let one = mode.one();
    let mut acc = mode.one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = &acc * &(&one - &aq);
        aq = &aq * q;
    }
    acc
}

/// The falling q-factorial `[n][n-1]...[n-k+1]` (a product of `k`
/// q-integers); `k = 0` gives 1.
///
/// Requires `k <= n`; this is always satisfied where the closed commutation
/// formulas use it.
pub fn q_falling(n: u32, k: u32, q: &FieldElem) -> FieldElem {
    assert!(k <= n, "q_falling requires k <= n (got n={}, k={})", n, k);
    let mut acc = q.mode().one();
    for j in (n - k + 1)..=n {
        acc = &acc * &q_number(j, q);
    }
    acc
}

/// The ordinary binomial coefficient `C(n, k)`; zero for `k > n`.
/// Rows of Pascal's triangle are memoized per thread.
pub fn binomial(n: u32, k: u32) -> BigRat {
    if k > n {
        return BigRat::zero();
    }
    thread_local! {
        static ROWS: RefCell<Vec<Vec<BigRat>>> = RefCell::new(vec![vec![BigRat::one()]]);
    }
    ROWS.with(|rows| {
        let mut rows = rows.borrow_mut();
        while rows.len() <= n as usize {
            let prev = rows.last().unwrap();
            let mut next = Vec::with_capacity(prev.len() + 1);
            next.push(BigRat::one());
            for j in 1..prev.len() {
                next.push(&prev[j - 1] + &prev[j]);
            }
            next.push(BigRat::one());
            rows.push(next);
        }
        rows[n as usize][k as usize].clone()
    })
}

/// `g(n)`: 1 for `n = 0`, the double factorial `(n-1)!! = (n-1)(n-3)...1`
/// for even `n > 0`, and 0 for odd `n`.
pub fn double_fact_even(n: u32) -> BigRat {
    if n == 0 {
        return BigRat::one();
    }
    if n % 2 == 1 {
        return BigRat::zero();
    }
    let mut acc = BigRat::one();
    let mut k = n - 1;
    loop {
        acc *= BigRat::from_integer(k.into());
        if k <= 2 {
            break;
        }
        k -= 2;
    }
    acc
}

/// Stirling numbers of the second kind `S(n, k)`, by the recurrence
/// `S(n, k) = k*S(n-1, k) + S(n-1, k-1)`; rows memoized per thread.
pub fn stirling2(n: u32, k: u32) -> BigRat {
    if k > n {
        return BigRat::zero();
    }
    thread_local! {
        static ROWS: RefCell<Vec<Vec<BigRat>>> = RefCell::new(vec![vec![BigRat::one()]]);
    }
    ROWS.with(|rows| {
        let mut rows = rows.borrow_mut();
        while rows.len() <= n as usize {
            let m = rows.len(); // building row m
            let prev = rows.last().unwrap();
            let mut next = Vec::with_capacity(m + 1);
            next.push(BigRat::zero()); // S(m, 0) = 0 for m > 0
            for j in 1..=m {
                let keep = prev.get(j).cloned().unwrap_or_else(BigRat::zero);
                let promote = prev[j - 1].clone();
                next.push(BigRat::from_integer(j.into()) * keep + promote);
            }
            rows.push(next);
        }
        rows[n as usize][k as usize].clone()
    })
}
