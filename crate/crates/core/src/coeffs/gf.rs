//! Arithmetic in the prime field GF(p) for machine-word primes.
//!
//! Elements are stored as canonical representatives `0..p-1` together with
//! the modulus, so mixing residues from different primes is detected rather
//! than silently computed.  Products go through `u128`, hence any prime
//! below `2^63` is safe.

use num::bigint::BigInt;
use num::Integer;
use num::ToPrimitive;

use super::CoeffError;

/// An element of GF(p), as a canonical residue `0 <= value < prime`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct GfElem {
    value: u64,
    prime: u64,
}

impl GfElem {
    /// Reduces a signed integer into GF(p).
    pub fn new(value: i64, prime: u64) -> Self {
        let p = prime as i128;
        let v = (value as i128).rem_euclid(p) as u64;
        GfElem { value: v, prime }
    }

    /// Reduces an arbitrary-precision integer into GF(p).
    pub fn from_bigint(value: &BigInt, prime: u64) -> Self {
        let v = value
            .mod_floor(&BigInt::from(prime))
            .to_u64()
            .expect("residue fits in u64");
        GfElem { value: v, prime }
    }

    /// The canonical representative in `0..p-1`.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// The modulus.
    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check_same_prime(&self, other: &GfElem) -> Result<(), CoeffError> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(CoeffError::MixedFieldModes)
        }
    }

    pub fn add(&self, other: &GfElem) -> Result<GfElem, CoeffError> {
        self.check_same_prime(other)?;
        let v = ((self.value as u128 + other.value as u128) % self.prime as u128) as u64;
        Ok(GfElem { value: v, prime: self.prime })
    }

    pub fn sub(&self, other: &GfElem) -> Result<GfElem, CoeffError> {
        self.check_same_prime(other)?;
        let p = self.prime as u128;
        let v = ((self.value as u128 + p - other.value as u128) % p) as u64;
        Ok(GfElem { value: v, prime: self.prime })
    }

    pub fn mul(&self, other: &GfElem) -> Result<GfElem, CoeffError> {
        self.check_same_prime(other)?;
        let v = ((self.value as u128 * other.value as u128) % self.prime as u128) as u64;
        Ok(GfElem { value: v, prime: self.prime })
    }

    pub fn neg(&self) -> GfElem {
        let v = if self.value == 0 { 0 } else { self.prime - self.value };
        GfElem { value: v, prime: self.prime }
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self) -> Result<GfElem, CoeffError> {
        if self.value == 0 {
            return Err(CoeffError::DivisionByZero);
        }
        // Fermat: a^(p-2) mod p.
        Ok(self.pow_u64(self.prime - 2))
    }

    pub fn pow(&self, exp: u32) -> GfElem {
        self.pow_u64(exp as u64)
    }

    fn pow_u64(&self, mut exp: u64) -> GfElem {
        let p = self.prime as u128;
        let mut base = self.value as u128;
        let mut acc: u128 = 1;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        GfElem { value: acc as u64, prime: self.prime }
    }

    /// Multiplicative order of this element, or `None` for zero.
    ///
    /// Used to decide whether a residue is a root of unity of a given order;
    /// the order always divides `p - 1`.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.value == 0 {
            return None;
        }
        let mut order = self.prime - 1;
        // Strip every prime factor of p-1 that the element does not need.
        let mut m = self.prime - 1;
        let mut factors = Vec::new();
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                factors.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        for f in factors {
            while order % f == 0 && self.pow_u64(order / f).value == 1 {
                order /= f;
            }
        }
        Some(order)
    }
}

impl std::fmt::Display for GfElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Deterministic Miller-Rabin primality test for `u64`.
///
/// The witness set 2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37 is known to be
/// exact for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(7));
        assert!(is_prime_u64(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(9));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(6_700_417 * 97));
    }

    #[test]
    fn field_axioms_small() {
        let p = 7u64;
        for a in 0..p {
            let ea = GfElem::new(a as i64, p);
            assert_eq!(ea.add(&ea.neg()).unwrap().value(), 0);
            if a != 0 {
                let inv = ea.inv().unwrap();
                assert_eq!(ea.mul(&inv).unwrap().value(), 1);
            }
            for b in 0..p {
                let eb = GfElem::new(b as i64, p);
                assert_eq!(ea.add(&eb).unwrap().value(), (a + b) % p);
                assert_eq!(ea.mul(&eb).unwrap().value(), a * b % p);
            }
        }
    }

    #[test]
    fn negative_and_bigint_reduction() {
        assert_eq!(GfElem::new(-1, 5).value(), 4);
        assert_eq!(GfElem::new(-10, 5).value(), 0);
        let big = BigInt::from(-3) * BigInt::from(1_000_000_007u64) + BigInt::from(11);
        assert_eq!(GfElem::from_bigint(&big, 1_000_000_007).value(), 11);
    }

    #[test]
    fn mixed_primes_rejected() {
        let a = GfElem::new(1, 5);
        let b = GfElem::new(1, 7);
        assert!(matches!(a.add(&b), Err(CoeffError::MixedFieldModes)));
    }

    #[test]
    fn multiplicative_order() {
        // 2 generates GF(11)*, which has order 10.
        assert_eq!(GfElem::new(2, 11).multiplicative_order(), Some(10));
        // 3 has order 5 in GF(11)*: 3,9,5,4,1.
        assert_eq!(GfElem::new(3, 11).multiplicative_order(), Some(5));
        assert_eq!(GfElem::new(1, 11).multiplicative_order(), Some(1));
        assert_eq!(GfElem::new(0, 11).multiplicative_order(), None);
        // 2 is a primitive cube root of unity mod 7.
        assert_eq!(GfElem::new(2, 7).multiplicative_order(), Some(3));
    }
}
