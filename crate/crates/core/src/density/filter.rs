use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::DensityError;
use crate::arith::{gcd, inv_mod, mul_mod, residue, sub_mod};

/// A set of primes cut out by a Frobenius condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CebotarevFilter {
    All,
    /// `p mod modulus` lies in `residues`.
    Congruence {
        modulus: u64,
        residues: BTreeSet<u64>,
    },
    /// The cubic `c3 x^3 + c2 x^2 + c1 x + c0` has a number of roots mod `p`
    /// lying in `counts`.
    CubicSplit {
        coeffs: [i64; 4],
        counts: BTreeSet<u8>,
    },
    Conjunction(Vec<CebotarevFilter>),
}

impl CebotarevFilter {
    pub fn congruence(
        modulus: u64,
        residues: impl IntoIterator<Item = u64>,
    ) -> Result<Self, DensityError> {
        let residues: BTreeSet<u64> = residues.into_iter().collect();
        if modulus < 2 || residues.is_empty() || residues.iter().any(|&r| r >= modulus) {
            return Err(DensityError::InvalidFilter(format!(
                "congruence needs modulus >= 2 and residues in [0, {modulus})"
            )));
        }
        Ok(CebotarevFilter::Congruence { modulus, residues })
    }

    pub fn cubic(
        coeffs: [i64; 4],
        counts: impl IntoIterator<Item = u8>,
    ) -> Result<Self, DensityError> {
        let counts: BTreeSet<u8> = counts.into_iter().collect();
        if counts.is_empty() || counts.iter().any(|c| ![0, 1, 3].contains(c)) {
            return Err(DensityError::InvalidFilter(
                "root counts must be drawn from {0, 1, 3}".into(),
            ));
        }
        if coeffs[0] == 0 || cubic_discriminant(coeffs).is_none_or(|d| d == 0) {
            return Err(DensityError::InvalidFilter(format!(
                "cubic {coeffs:?} is not separable of degree 3"
            )));
        }
        Ok(CebotarevFilter::CubicSplit { coeffs, counts })
    }

    /// Conjunction of `parts`, flattening `All`.
    pub fn and(parts: Vec<CebotarevFilter>) -> Self {
        let mut parts: Vec<_> = parts
            .into_iter()
            .filter(|f| *f != CebotarevFilter::All)
            .collect();
        match parts.len() {
            0 => CebotarevFilter::All,
            1 => parts.pop().expect("one part"),
            _ => CebotarevFilter::Conjunction(parts),
        }
    }

    pub fn is_all(&self) -> bool {
        *self == CebotarevFilter::All
    }
}

impl fmt::Display for CebotarevFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(",");
        match self {
            CebotarevFilter::All => write!(f, "all"),
            CebotarevFilter::Congruence { modulus, residues } => {
                write!(
                    f,
                    "cong:{modulus}:{}",
                    join(&mut residues.iter().map(u64::to_string))
                )
            }
            CebotarevFilter::CubicSplit { coeffs, counts } => write!(
                f,
                "cubic:{}:{}",
                join(&mut coeffs.iter().map(i64::to_string)),
                join(&mut counts.iter().map(u8::to_string))
            ),
            CebotarevFilter::Conjunction(parts) => {
                write!(
                    f,
                    "{}",
                    parts
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join("&")
                )
            }
        }
    }
}

/// `b^2 c^2 - 4ac^3 - 4b^3 d - 27a^2 d^2 + 18abcd` for `a x^3 + b x^2 + c x + d`.
pub fn cubic_discriminant([a, b, c, d]: [i64; 4]) -> Option<i128> {
    let [a, b, c, d] = [a, b, c, d].map(i128::from);
    let t1 = b.checked_mul(b)?.checked_mul(c)?.checked_mul(c)?;
    let t2 = a.checked_mul(c.checked_pow(3)?)?.checked_mul(4)?;
    let t3 = b.checked_pow(3)?.checked_mul(d)?.checked_mul(4)?;
    let t4 = a
        .checked_mul(a)?
        .checked_mul(d)?
        .checked_mul(d)?
        .checked_mul(27)?;
    let t5 = a
        .checked_mul(b)?
        .checked_mul(c)?
        .checked_mul(d)?
        .checked_mul(18)?;
    t1.checked_sub(t2)?
        .checked_sub(t3)?
        .checked_sub(t4)?
        .checked_add(t5)
}

/// Whether `p` belongs to the filtered set. Primes dividing a modulus, the
/// leading coefficient, or the discriminant are excluded.
pub fn filter_pass(filter: &CebotarevFilter, p: u64) -> bool {
    match filter {
        CebotarevFilter::All => true,
        CebotarevFilter::Congruence { modulus, residues } => {
            gcd(p, *modulus) == 1 && residues.contains(&(p % modulus))
        }
        CebotarevFilter::CubicSplit { coeffs, counts } => {
            let disc = cubic_discriminant(*coeffs).expect("validated at construction");
            if residue(coeffs[0] as i128, p) == 0 || residue(disc, p) == 0 {
                return false;
            }
            counts.contains(&cubic_root_count(*coeffs, p))
        }
        CebotarevFilter::Conjunction(parts) => parts.iter().all(|f| filter_pass(f, p)),
    }
}

/// Number of roots mod `p` of a cubic that is separable mod `p`, as the
/// degree of `gcd(f, x^p - x)`.
pub fn cubic_root_count(coeffs: [i64; 4], p: u64) -> u8 {
    let lead_inv =
        inv_mod(residue(coeffs[0] as i128, p), p).expect("leading coefficient is a unit");
    // monic f = x^3 + b x^2 + c x + d
    let [b, c, d] = [1, 2, 3].map(|i| mul_mod(residue(coeffs[i] as i128, p), lead_inv, p));
    let mulmod = |u: [u64; 3], v: [u64; 3]| -> [u64; 3] {
        let mut prod = [0u64; 5];
        for i in 0..3 {
            for j in 0..3 {
                prod[i + j] = (prod[i + j] + mul_mod(u[i], v[j], p)) % p;
            }
        }
        // x^3 = -(b x^2 + c x + d)
        for k in (3..5).rev() {
            let top = prod[k];
            prod[k] = 0;
            prod[k - 1] = sub_mod(prod[k - 1], mul_mod(top, b, p), p);
            prod[k - 2] = sub_mod(prod[k - 2], mul_mod(top, c, p), p);
            prod[k - 3] = sub_mod(prod[k - 3], mul_mod(top, d, p), p);
        }
        [prod[0], prod[1], prod[2]]
    };
    let mut acc = [1 % p, 0, 0];
    let mut base = [0, 1 % p, 0];
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base);
        }
        base = mulmod(base, base);
        e >>= 1;
    }
    let g = vec![acc[0], sub_mod(acc[1], 1 % p, p), acc[2]];
    poly_gcd_degree(vec![d, c, b, 1], g, p) as u8
}

fn trim(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

// degree of gcd over F_p; coefficients in ascending order
fn poly_gcd_degree(a: Vec<u64>, b: Vec<u64>, p: u64) -> usize {
    let (mut a, mut b) = (trim(a), trim(b));
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonzero"), p).expect("unit");
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let q = mul_mod(*a.last().expect("nonzero"), inv, p);
            for (i, &bi) in b.iter().enumerate() {
                a[i + shift] = sub_mod(a[i + shift], mul_mod(q, bi, p), p);
            }
            a = trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}
