//! Imaginary quadratic fields of odd class number, their integers, split
//! primes, and the normalized generators `psi(p)` of `p^h`.
//!
//! Elements are stored in half-coordinates: `(x, y)` stands for
//! `(x + y*sqrt(-d)) / 2`. For `d = 1, 2` both coordinates are even; for
//! `d ≡ 3 (mod 4)` they have equal parity.

mod classno;
mod hecke;

pub use classno::class_number;
pub use hecke::hecke_psi;

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{factorize, is_prime, jacobi, mul_mod, residue, sqrt_mod};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadError {
    #[error("d = {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("d = {0} is unsupported: need d in {{1, 2}} or d ≡ 3 (mod 4)")]
    UnsupportedD(u64),
    #[error("class number of Q(sqrt(-{d})) is {h}, which is even")]
    EvenClassNumber { d: u64, h: u64 },
    #[error("{p} does not split in Q(sqrt(-{d}))")]
    NotSplit { d: u64, p: u64 },
    #[error("{t} is not a square root of -{d} modulo {p}")]
    BadRoot { d: u64, p: u64, t: u64 },
    #[error("the prime 2 is not handled for Q(sqrt(-{0}))")]
    EvenPrime(u64),
    #[error("no element of norm {p}^h found in Q(sqrt(-{d}))")]
    NoRepresentation { d: u64, p: u64 },
    #[error("no associate of the generator over {p} passes the normalization (d = {d})")]
    NormalizationEmpty { d: u64, p: u64 },
    #[error("{count} associates of the generator over {p} pass the normalization (d = {d})")]
    NormalizationAmbiguous { d: u64, p: u64, count: usize },
    #[error("quadratic integer arithmetic overflowed 128 bits")]
    Overflow,
}

/// `K = Q(sqrt(-d))` with odd class number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadField {
    d: u64,
    disc: i64,
    w: u32,
    h: u64,
    eps: i8,
}

impl QuadField {
    pub fn new(d: u64) -> Result<Self, QuadError> {
        make_field(d)
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Field discriminant.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Number of roots of unity.
    pub fn w(&self) -> u32 {
        self.w
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// The twisting constant: 2 for `d = 1`, -1 for `d ≡ 3 (mod 8)`, else 1.
    pub fn eps(&self) -> i8 {
        self.eps
    }

    pub fn contains(&self, z: QuadInt) -> bool {
        if self.d % 4 == 3 {
            (z.x - z.y) % 2 == 0
        } else {
            z.x % 2 == 0 && z.y % 2 == 0
        }
    }

    pub fn one(&self) -> QuadInt {
        QuadInt::new(2, 0)
    }

    /// `sqrt(-d)` itself.
    pub fn sqrt_neg_d(&self) -> QuadInt {
        QuadInt::new(0, 2)
    }

    pub fn from_int(&self, n: i128) -> Result<QuadInt, QuadError> {
        Ok(QuadInt::new(
            n.checked_mul(2).ok_or(QuadError::Overflow)?,
            0,
        ))
    }

    /// The `w` roots of unity, starting with 1 and -1.
    pub fn units(&self) -> Vec<QuadInt> {
        let mut out = vec![QuadInt::new(2, 0), QuadInt::new(-2, 0)];
        match self.d {
            1 => out.extend([QuadInt::new(0, 2), QuadInt::new(0, -2)]),
            3 => out.extend([
                QuadInt::new(-1, 1),
                QuadInt::new(1, -1),
                QuadInt::new(-1, -1),
                QuadInt::new(1, 1),
            ]),
            _ => {}
        }
        out
    }

    pub fn mul(&self, a: QuadInt, b: QuadInt) -> Result<QuadInt, QuadError> {
        let d = self.d as i128;
        let of = || QuadError::Overflow;
        let xx = a.x.checked_mul(b.x).ok_or_else(of)?;
        let yy =
            a.y.checked_mul(b.y)
                .ok_or_else(of)?
                .checked_mul(d)
                .ok_or_else(of)?;
        let xy = a.x.checked_mul(b.y).ok_or_else(of)?;
        let yx = a.y.checked_mul(b.x).ok_or_else(of)?;
        let x = xx.checked_sub(yy).ok_or_else(of)?;
        let y = xy.checked_add(yx).ok_or_else(of)?;
        Ok(QuadInt::new(x / 2, y / 2))
    }

    pub fn pow(&self, z: QuadInt, mut n: u64) -> Result<QuadInt, QuadError> {
        let mut acc = self.one();
        let mut base = z;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            n >>= 1;
            if n > 0 {
                base = self.mul(base, base)?;
            }
        }
        Ok(acc)
    }

    /// `(x^2 + d*y^2) / 4`.
    pub fn norm(&self, z: QuadInt) -> Result<u128, QuadError> {
        let x2 = z.x.unsigned_abs().checked_mul(z.x.unsigned_abs());
        let y2 = z.y.unsigned_abs().checked_mul(z.y.unsigned_abs());
        x2.zip(y2)
            .and_then(|(x2, y2)| {
                y2.checked_mul(self.d as u128)
                    .and_then(|dy2| x2.checked_add(dy2))
            })
            .map(|n| n / 4)
            .ok_or(QuadError::Overflow)
    }

    /// Whether `delta` divides `z` in the ring of integers.
    pub fn divides(&self, delta: QuadInt, z: QuadInt) -> Result<bool, QuadError> {
        let n = self.norm(delta)?;
        let n = i128::try_from(n).map_err(|_| QuadError::Overflow)?;
        let q = self.mul(z, delta.conj())?;
        if q.x % n != 0 || q.y % n != 0 {
            return Ok(false);
        }
        Ok(self.contains(QuadInt::new(q.x / n, q.y / n)))
    }

    pub fn split_type(&self, p: u64) -> SplitType {
        split_type(*self, p)
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt(-{}))", self.d)
    }
}

/// Element `(x + y*sqrt(-d)) / 2` of the ring of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub x: i128,
    pub y: i128,
}

impl QuadInt {
    pub const fn new(x: i128, y: i128) -> Self {
        QuadInt { x, y }
    }

    pub fn conj(self) -> Self {
        QuadInt::new(self.x, -self.y)
    }

    /// `z + conj(z)`, an ordinary integer.
    pub fn trace(self) -> i128 {
        self.x
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, o: QuadInt) -> QuadInt {
        QuadInt::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        QuadInt::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt::new(-self.x, -self.y)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x % 2 == 0 && self.y % 2 == 0 {
            write!(f, "{} + {}*w", self.x / 2, self.y / 2)
        } else {
            write!(f, "({} + {}*w)/2", self.x, self.y)
        }
    }
}

/// Odd prime `p` split in `K`, together with a root `t` of `-d` modulo `p`.
/// The root singles out `P = (p, sqrt(-d) - t)`; the other prime `P̄`
/// corresponds to `p - t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplitPrime {
    field: QuadField,
    p: u64,
    t: u64,
}

impl SplitPrime {
    /// Split prime attached to an explicitly chosen root.
    pub fn new(field: QuadField, p: u64, t: u64) -> Result<Self, QuadError> {
        let d = field.d;
        if p == 2 {
            return Err(QuadError::EvenPrime(d));
        }
        if !is_prime(p) || field.disc.unsigned_abs().is_multiple_of(p) {
            return Err(QuadError::NotSplit { d, p });
        }
        if t == 0 || t >= p || !(mul_mod(t, t, p) + d % p).is_multiple_of(p) {
            return Err(QuadError::BadRoot { d, p, t });
        }
        Ok(SplitPrime { field, p, t })
    }

    pub fn field(&self) -> QuadField {
        self.field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// The same rational prime with the roles of `P` and `P̄` exchanged.
    pub fn conjugate(&self) -> SplitPrime {
        SplitPrime {
            t: self.p - self.t,
            ..*self
        }
    }

    /// Image of `z` in `O/P = F_p`, sending `sqrt(-d)` to `t`.
    pub fn reduce_at_p(&self, z: QuadInt) -> u64 {
        self.reduce(z, self.t)
    }

    /// Image of `z` in `O/P̄ = F_p`, sending `sqrt(-d)` to `-t`.
    pub fn reduce_at_pbar(&self, z: QuadInt) -> u64 {
        self.reduce(z, self.p - self.t)
    }

    fn reduce(&self, z: QuadInt, root: u64) -> u64 {
        let p = self.p;
        let inv2 = p.div_ceil(2);
        let v = (residue(z.x, p) as u128 + residue(z.y, p) as u128 * root as u128) % p as u128;
        mul_mod(v as u64, inv2, p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitType {
    Split(SplitPrime),
    /// `p = 2` splitting in `K`; the two primes above 2 are not told apart by a root mod 2.
    SplitTwo,
    Inert,
    Ramified,
}

pub fn make_field(d: u64) -> Result<QuadField, QuadError> {
    if d == 0 {
        return Err(QuadError::UnsupportedD(d));
    }
    if factorize(d).iter().any(|&(_, e)| e > 1) {
        return Err(QuadError::NotSquarefree(d));
    }
    if !(d == 1 || d == 2 || d % 4 == 3) {
        return Err(QuadError::UnsupportedD(d));
    }
    let disc = if d % 4 == 3 {
        -(d as i64)
    } else {
        -4 * d as i64
    };
    let h = class_number(disc);
    if h.is_multiple_of(2) {
        return Err(QuadError::EvenClassNumber { d, h });
    }
    let w = match d {
        1 => 4,
        3 => 6,
        _ => 2,
    };
    let eps = match d {
        1 => 2,
        _ if d % 8 == 3 => -1,
        _ => 1,
    };
    Ok(QuadField { d, disc, w, h, eps })
}

/// Splitting of the prime `p` in `field`; split primes carry the smaller root.
pub fn split_type(field: QuadField, p: u64) -> SplitType {
    if field.disc.unsigned_abs().is_multiple_of(p) {
        return SplitType::Ramified;
    }
    if p == 2 {
        // D ≡ 1 (mod 8) exactly when d ≡ 7 (mod 8)
        return if field.d % 8 == 7 {
            SplitType::SplitTwo
        } else {
            SplitType::Inert
        };
    }
    let neg_d = residue(-(field.d as i128), p);
    if jacobi(neg_d as i64, p) != 1 {
        return SplitType::Inert;
    }
    let t = sqrt_mod(neg_d, p).expect("residue checked by Jacobi symbol");
    SplitType::Split(SplitPrime { field, p, t })
}
