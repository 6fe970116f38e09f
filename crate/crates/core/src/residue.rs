//! Power residue symbols realized inside `F_p`.
//!
//! The `m`-th power residue symbol of `a` modulo `p` is represented by
//! `a^((p-1)/m) mod p`, an element of the order-`m` subgroup of `F_p^×`.
//! Symbols of quadratic integers are taken modulo the prime `P̄`, i.e. after
//! the reduction that sends `sqrt(-d)` to `-t`.

use std::fmt;

use thiserror::Error;

use crate::arith::{
    euler_phi, field_discriminant, jacobi, mod_pow, residue as canonical, ArithError, Rational,
};
use crate::quadfield::{hecke_psi, QuadError, QuadInt, SplitPrime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("{p} divides {a}")]
    DividesModulus { a: i128, p: u64 },
    #[error("{p} is not 1 modulo {m}")]
    BadCongruence { p: u64, m: u64 },
    #[error("the element reduces to 0 modulo the prime above {p}")]
    NotCoprime { p: u64 },
    #[error("quartic symbol value {value} mod {p} is not ±1")]
    NotASign { value: u64, p: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Element of `mu_m`, realized in `F_p^×`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymbolValue {
    value: u64,
    m: u64,
    p: u64,
}

impl SymbolValue {
    /// Symbol of the nonzero residue `r` modulo `p`.
    pub fn of_residue(r: u64, p: u64, m: u64) -> Result<Self, ResidueError> {
        check_congruence(p, m)?;
        let r = r % p;
        if r == 0 {
            return Err(ResidueError::DividesModulus { a: 0, p });
        }
        Ok(SymbolValue {
            value: mod_pow(r, (p - 1) / m, p),
            m,
            p,
        })
    }

    pub fn one(p: u64, m: u64) -> Self {
        SymbolValue { value: 1, m, p }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_one(&self) -> bool {
        self.value == 1
    }

    /// `+1` or `-1` when the value has order at most 2.
    pub fn sign(&self) -> Option<i8> {
        match self.value {
            1 => Some(1),
            v if v == self.p - 1 => Some(-1),
            _ => None,
        }
    }

    pub fn mul(&self, other: &SymbolValue) -> SymbolValue {
        assert_eq!(
            (self.p, self.m),
            (other.p, other.m),
            "symbols from different groups"
        );
        SymbolValue {
            value: crate::arith::mul_mod(self.value, other.value, self.p),
            ..*self
        }
    }

    pub fn pow(&self, e: u64) -> SymbolValue {
        SymbolValue {
            value: mod_pow(self.value, e % self.m, self.p),
            ..*self
        }
    }
}

impl fmt::Display for SymbolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "{} (mod {})", self.value, self.p),
        }
    }
}

fn check_congruence(p: u64, m: u64) -> Result<(), ResidueError> {
    if m == 0 || p < 2 || !(p - 1).is_multiple_of(m) {
        return Err(ResidueError::BadCongruence { p, m });
    }
    Ok(())
}

pub fn symbol_fp(a: i128, p: u64, m: u64) -> Result<SymbolValue, ResidueError> {
    check_congruence(p, m)?;
    let r = canonical(a, p);
    if r == 0 {
        return Err(ResidueError::DividesModulus { a, p });
    }
    SymbolValue::of_residue(r, p, m)
}

/// Whether `a` is a nonzero `m`-th power modulo `p`.
pub fn is_mth_power(a: i128, p: u64, m: u64) -> Result<bool, ResidueError> {
    symbol_fp(a, p, m).map(|s| s.is_one())
}

/// `m`-th power symbol of `z` modulo `P̄`.
pub fn symbol_at_pbar(sp: &SplitPrime, z: QuadInt, m: u64) -> Result<SymbolValue, ResidueError> {
    check_congruence(sp.p(), m)?;
    let r = sp.reduce_at_pbar(z);
    if r == 0 {
        return Err(ResidueError::NotCoprime { p: sp.p() });
    }
    SymbolValue::of_residue(r, sp.p(), m)
}

/// Quadratic symbol of the normalized generator `psi(P)` modulo `P̄`, computed
/// directly and by the closed form. Returns `(direct, formula)`.
pub fn pipibar_two_ways(sp: &SplitPrime) -> Result<(i8, i8), ResidueError> {
    let pi = hecke_psi(sp)?;
    pipibar_for_generator(sp, pi)
}

/// As [`pipibar_two_ways`] for an arbitrary generator `pi` of `P^h`
/// (for `d = 1` it must be congruent to 1 modulo `2 + 2i`).
pub fn pipibar_for_generator(sp: &SplitPrime, pi: QuadInt) -> Result<(i8, i8), ResidueError> {
    let field = sp.field();
    let (d, p) = (field.d(), sp.p());
    let direct = symbol_at_pbar(sp, pi, 2)?.sign().expect("quadratic symbol");
    let formula = if p % 4 == 1 {
        quartic_sign(-(d as i128), p)?
    } else if d != 2 {
        let inv2 = d.div_ceil(2);
        let r = canonical(canonical(pi.x, d) as i128 * inv2 as i128, d);
        field.eps() * jacobi(r as i64, d)
    } else if in_d2_classes(pi) {
        1
    } else {
        -1
    };
    Ok((direct, formula))
}

/// `(a/p)_4` as `±1`, for `a` a quadratic residue modulo `p ≡ 1 (mod 4)`.
pub fn quartic_sign(a: i128, p: u64) -> Result<i8, ResidueError> {
    let s = symbol_fp(a, p, 4)?;
    s.sign().ok_or(ResidueError::NotASign {
        value: s.value(),
        p,
    })
}

// Membership of z = (x + y*sqrt(-2))/2 in the eight classes modulo 4*sqrt(-2).
// With a = x/2, b = y/2 the ideal (4*sqrt(-2)) is {u + v*sqrt(-2) : 8 | u, 4 | v},
// so a class is fixed by (a mod 8, b mod 4).
fn in_d2_classes(z: QuadInt) -> bool {
    let a = (z.x / 2).rem_euclid(8);
    let b = (z.y / 2).rem_euclid(4);
    matches!((a, b), (1, 0) | (3, 0) | (5, 1..=3) | (7, 1..=3))
}

/// Degree of `Q(sqrt(alpha), sqrt(beta), mu_n)` over `Q`.
///
/// A discriminant "divides" `n` when its absolute value, the conductor,
/// divides `n`; that is exactly when the square root lies in `Q(mu_n)`.
pub fn compositum_degree(alpha: Rational, beta: Rational, n: u64) -> Result<u64, ResidueError> {
    assert!(n >= 1);
    let divides = |disc: i64| n.is_multiple_of(disc.unsigned_abs());
    let da = divides(field_discriminant(alpha)?);
    let db = divides(field_discriminant(beta)?);
    let dab = divides(field_discriminant(alpha.checked_mul(&beta)?)?);
    let phi = euler_phi(n);
    Ok(if da && db {
        phi
    } else if [da, db, dab].iter().filter(|&&b| b).count() == 1 {
        2 * phi
    } else {
        4 * phi
    })
}

/// Conductor divisibility used by the density theorems: `|D| ∣ n`.
pub fn disc_divides(disc: i64, n: u64) -> bool {
    n.is_multiple_of(disc.unsigned_abs())
}
