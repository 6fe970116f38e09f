use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{factorize, gcd, inv_mod, mul_mod, residue, ArithError};

/// Nonzero rational number in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Rational {
    num: i64,
    den: u64,
}

impl Rational {
    pub fn new(num: i64, den: u64) -> Result<Self, ArithError> {
        if num == 0 || den == 0 {
            return Err(ArithError::ZeroRational);
        }
        let g = gcd(num.unsigned_abs(), den);
        Ok(Rational {
            num: num / g as i64,
            den: den / g,
        })
    }

    pub fn integer(n: i64) -> Result<Self, ArithError> {
        Self::new(n, 1)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn checked_mul(&self, other: &Rational) -> Result<Rational, ArithError> {
        let num = self.num as i128 * other.num as i128;
        let den = self.den as u128 * other.den as u128;
        let g = super::gcd_u128(num.unsigned_abs(), den) as i128;
        let num = i64::try_from(num / g).map_err(|_| ArithError::Overflow)?;
        let den = u64::try_from(den / g as u128).map_err(|_| ArithError::Overflow)?;
        Rational::new(num, den)
    }

    pub fn scale(&self, k: i64) -> Result<Rational, ArithError> {
        self.checked_mul(&Rational::integer(k)?)
    }

    /// True when `p` divides the numerator or the denominator.
    pub fn divisible_by(&self, p: u64) -> bool {
        self.num.unsigned_abs().is_multiple_of(p) || self.den.is_multiple_of(p)
    }

    /// Reduction modulo `p`, or `None` if `p` divides numerator or denominator.
    pub fn residue_mod(&self, p: u64) -> Option<u64> {
        if self.divisible_by(p) {
            return None;
        }
        let inv = inv_mod(self.den % p, p)?;
        Some(mul_mod(residue(self.num as i128, p), inv, p))
    }

    /// Whether the number is a `k`-th power in `Q^×`.
    pub fn is_perfect_power(&self, k: u32) -> bool {
        if k.is_multiple_of(2) && self.num < 0 {
            return false;
        }
        factorize(self.num.unsigned_abs())
            .iter()
            .chain(factorize(self.den).iter())
            .all(|&(_, e)| e % k == 0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::ParseRational(s.to_string());
        let s_trim = s.trim();
        let (n, d) = match s_trim.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s_trim, "1"),
        };
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
        Rational::new(n, d as u64)
    }
}

impl TryFrom<String> for Rational {
    type Error = ArithError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}

/// Discriminant of `Q(sqrt(alpha))`; equals 1 exactly when `alpha` is a
/// rational square.
pub fn field_discriminant(alpha: Rational) -> Result<i64, ArithError> {
    let mut exps: Vec<(u64, u32)> = factorize(alpha.num.unsigned_abs());
    for (p, e) in factorize(alpha.den) {
        match exps.iter_mut().find(|(q, _)| *q == p) {
            Some((_, f)) => *f += e,
            None => exps.push((p, e)),
        }
    }
    let overflow = || ArithError::FactorizationOverflow(alpha);
    let mut s: i64 = if alpha.num < 0 { -1 } else { 1 };
    for (p, e) in exps {
        if e % 2 == 1 {
            s = s
                .checked_mul(i64::try_from(p).map_err(|_| overflow())?)
                .ok_or_else(overflow)?;
        }
    }
    if s.rem_euclid(4) == 1 {
        Ok(s)
    } else {
        s.checked_mul(4).ok_or_else(overflow)
    }
}
