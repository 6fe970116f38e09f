//! Word-sized modular arithmetic and elementary number theory.
//!
//! Every modular product goes through a 128-bit intermediate, so any modulus
//! below 2^64 is safe. Prime ranges are capped at 2^63.

mod cornacchia;
mod factor;
mod rational;
mod sieve;

pub use cornacchia::{cornacchia, cornacchia_with_root};
pub use factor::{factorize, is_prime, squarefree_part};
pub use rational::{field_discriminant, Rational};
pub use sieve::{sieve_range, PrimeSieve};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest admissible upper bound of a [`PrimeRange`].
pub const RANGE_CAP: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("empty or inverted range [{lo}, {hi})")]
    EmptyRange { lo: u64, hi: u64 },
    #[error("range bound {0} exceeds 2^63")]
    RangeTooLarge(u64),
    #[error("{a} is not a quadratic residue modulo {p}")]
    NotAResidue { a: u64, p: u64 },
    #[error("zero is not an admissible rational here")]
    ZeroRational,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("discriminant of {0} does not fit in 64 bits")]
    FactorizationOverflow(Rational),
}

/// Half-open interval `[lo, hi)` of candidate primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeRange {
    lo: u64,
    hi: u64,
}

impl PrimeRange {
    pub fn new(lo: u64, hi: u64) -> Result<Self, ArithError> {
        if lo >= hi {
            return Err(ArithError::EmptyRange { lo, hi });
        }
        if hi > RANGE_CAP {
            return Err(ArithError::RangeTooLarge(hi));
        }
        Ok(PrimeRange { lo, hi })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n < self.hi
    }

    /// Splits into consecutive blocks of at most `block` integers.
    pub fn blocks(&self, block: u64) -> Vec<PrimeRange> {
        assert!(block > 0);
        let mut out = Vec::new();
        let mut lo = self.lo;
        while lo < self.hi {
            let hi = lo.saturating_add(block).min(self.hi);
            out.push(PrimeRange { lo, hi });
            lo = hi;
        }
        out
    }
}

impl std::fmt::Display for PrimeRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {})", self.lo, self.hi)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `base^exp mod modulus` by square-and-multiply.
pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    assert!(modulus >= 2, "modulus must be at least 2");
    let mut b = base % modulus;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, modulus);
        }
        b = mul_mod(b, b, modulus);
        exp >>= 1;
    }
    acc
}

/// Canonical representative of `a` in `[0, m)`.
#[inline]
pub fn residue(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(residue(s0, m))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus, got {n}");
    let mut a = residue(a as i128, n);
    let mut n = n;
    let mut sign = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol of an arbitrary integer modulo an odd prime.
pub fn legendre_i128(a: i128, p: u64) -> i8 {
    jacobi(residue(a, p) as i64, p)
}

/// Square root of `a` modulo the odd prime `p`, returned as the smaller of
/// the two roots. Tonelli-Shanks seeded with the least non-residue.
pub fn sqrt_mod(a: u64, p: u64) -> Result<u64, ArithError> {
    let a = a % p;
    if p == 2 {
        return Ok(a);
    }
    if jacobi(a as i64, p) != 1 {
        return Err(ArithError::NotAResidue { a, p });
    }
    let mut q = p - 1;
    let s = q.trailing_zeros();
    q >>= s;
    let mut z = 2u64;
    while jacobi(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = mod_pow(c, 1u64 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Ok(r.min(p - r))
}

/// `a * b mod m` for moduli up to 2^127.
pub fn mul_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    let (mut a, mut b) = (a % m, b % m);
    if a < 1 << 64 && b < 1 << 64 {
        return (a * b) % m;
    }
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod_u128(acc, a, m);
        }
        a = add_mod_u128(a, a, m);
        b >>= 1;
    }
    acc
}

#[inline]
fn add_mod_u128(a: u128, b: u128, m: u128) -> u128 {
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

/// Lifts a root `t` of `x^2 + d` modulo the odd prime `p` (with `p ∤ d`) to
/// a root modulo `p^k`.
pub fn hensel_lift_sqrt(t: u64, d: u64, p: u64, k: u32) -> Option<u128> {
    let inv2t = inv_mod(mul_mod(2, t, p), p)?;
    let mut root = t as u128;
    let mut pj = p as u128;
    for _ in 1..k {
        let next = pj.checked_mul(p as u128)?;
        let f = (mul_mod_u128(root, root, next) + d as u128 % next) % next;
        debug_assert_eq!(f % pj, 0);
        let c = ((f / pj) % p as u128) as u64;
        let step = mul_mod(p - c % p, inv2t, p) % p;
        root = (root + step as u128 * pj) % next;
        pj = next;
    }
    Some(root)
}

pub fn checked_pow_u128(base: u64, exp: u32) -> Option<u128> {
    (base as u128).checked_pow(exp)
}
