//! Splitting of `p` in the ray class fields `K_p^m` read off from the `m`-th
//! power character of `a_p(E)`, and exact point counts over `F_{p^n}` to
//! check it against.

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ap_sources::{
    ap_elliptic_bruteforce, ap_elliptic_bsgs, ap_elliptic_naive, EllipticCurve, SourceError,
};
use crate::arith::{gcd, is_prime, jacobi, mod_pow, residue, PrimeRange};
use crate::quadfield::{QuadField, SplitType};
use crate::residue::{is_mth_power, ResidueError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassfieldError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("bad reduction at {p}")]
    BadReduction { p: u64 },
    #[error("{p}^{n} exceeds {bits} bits")]
    WidthExceeded { p: u64, n: u64, bits: u64 },
    #[error("{p}^{n} exceeds the enumeration limit {limit}")]
    TooLarge { p: u64, n: u32, limit: u64 },
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// Ramification index, inertial degree and number of primes above `p` in a
/// degree-`2m^2` extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InertiaProfile {
    pub e: u64,
    pub f: u64,
    pub g: u64,
    pub m: u64,
    pub p: u64,
}

/// `f = 1` exactly when `a_p` is an `m`-th power mod `p`; `e = m` always.
pub fn classify_inertia(
    field: QuadField,
    m: u64,
    p: u64,
    a_p: i128,
) -> Result<InertiaProfile, ClassfieldError> {
    let fail = |why: String| Err(ClassfieldError::HypothesisViolated(why));
    if field.h() != 1 {
        return fail(format!("class number {} is not 1", field.h()));
    }
    if !is_prime(m) {
        return fail(format!("m = {m} is not prime"));
    }
    if gcd(m, field.w() as u64) != 1 {
        return fail(format!("m = {m} shares a factor with w = {}", field.w()));
    }
    if p <= 3 || p % m != 1 {
        return fail(format!("p = {p} must exceed 3 and be 1 mod {m}"));
    }
    if !matches!(field.split_type(p), SplitType::Split(_)) {
        return fail(format!("p = {p} does not split in K"));
    }
    if residue(a_p, p) == 0 {
        return fail(format!("p = {p} divides a_p"));
    }
    let f = if is_mth_power(a_p, p, m)? { 1 } else { m };
    let e = m;
    Ok(InertiaProfile {
        e,
        f,
        g: 2 * m * m / (e * f),
        m,
        p,
    })
}

/// `#E(F_{p^n}) mod p` for ordinary `p`, i.e. `1 - a_p^n`.
pub fn extension_count_mod_p(a_p: i128, p: u64, n: u64) -> u64 {
    (1 + p - mod_pow(residue(a_p, p), n, p)) % p
}

/// Default integer width for [`extension_count_exact`].
pub const EXACT_BITS: u64 = 512;

/// `#E(F_{p^n}) = p^n + 1 - s_n` with `s_{j+1} = a_p s_j - p s_{j-1}`.
pub fn extension_count_exact(
    curve: &EllipticCurve,
    p: u64,
    n: u64,
) -> Result<BigInt, ClassfieldError> {
    extension_count_exact_bits(curve, p, n, EXACT_BITS)
}

/// As [`extension_count_exact`] with `p^n` capped at `bits` bits.
pub fn extension_count_exact_bits(
    curve: &EllipticCurve,
    p: u64,
    n: u64,
    bits: u64,
) -> Result<BigInt, ClassfieldError> {
    assert!(n >= 1);
    if !curve.has_good_reduction(p) {
        return Err(ClassfieldError::BadReduction { p });
    }
    let width = || ClassfieldError::WidthExceeded { p, n, bits };
    // n * log2(p) <= bits, checked without building p^n first
    if (n as f64) * (p as f64).log2() > bits as f64 + 1.0 {
        return Err(width());
    }
    let q = BigInt::from(p).pow(n as u32);
    if q.bits() > bits {
        return Err(width());
    }
    let a = BigInt::from(curve_ap(curve, p)?);
    let pb = BigInt::from(p);
    let (mut prev, mut cur) = (BigInt::from(2), a.clone());
    for _ in 1..n {
        let next = &a * &cur - &pb * &prev;
        prev = cur;
        cur = next;
    }
    debug_assert!(&cur * &cur <= BigInt::from(4) * &q, "Hasse bound");
    Ok(q + 1 - cur)
}

fn curve_ap(curve: &EllipticCurve, p: u64) -> Result<i64, SourceError> {
    if p <= 3 {
        ap_elliptic_bruteforce(curve, p)
    } else if p < 1000 {
        ap_elliptic_naive(curve, p)
    } else {
        ap_elliptic_bsgs(curve, p)
    }
}

/// The criterion at one prime against the exact count over `F_{p^n}`,
/// `n = (p - 1)/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaCheck {
    pub profile: InertiaProfile,
    pub a_p: i64,
    /// `p | #E(F_{p^n})`.
    pub divides: bool,
    /// `f = 1` exactly when `divides`.
    pub agrees: bool,
}

/// Runs [`classify_inertia`] on the `a_p` of `curve`, a curve with CM by
/// `field`, and tests it against [`extension_count_exact_bits`] with a width
/// large enough for `p^n`.
pub fn check_inertia(
    curve: &EllipticCurve,
    field: QuadField,
    m: u64,
    p: u64,
) -> Result<InertiaCheck, ClassfieldError> {
    if !curve.has_good_reduction(p) {
        return Err(ClassfieldError::BadReduction { p });
    }
    let a_p = curve_ap(curve, p)?;
    let profile = classify_inertia(field, m, p, a_p as i128)?;
    let n = (p - 1) / m;
    let bits = n * (64 - p.leading_zeros() as u64) + 8;
    let count = extension_count_exact_bits(curve, p, n, bits)?;
    let divides = (count % BigInt::from(p)) == BigInt::ZERO;
    Ok(InertiaCheck {
        profile,
        a_p,
        divides,
        agrees: (profile.f == 1) == divides,
    })
}

/// Up to `samples` distinct primes of `range` at which the criterion's
/// hypotheses hold for `(curve, field, m)`, chosen by a seeded RNG and
/// returned in increasing order.
pub fn sample_inertia_primes(
    curve: &EllipticCurve,
    field: QuadField,
    m: u64,
    range: PrimeRange,
    samples: usize,
    seed: u64,
) -> Vec<u64> {
    let valid: Vec<u64> = (range.lo().max(5)..range.hi())
        .filter(|&p| is_prime(p) && curve.has_good_reduction(p))
        .filter(|&p| {
            curve_ap(curve, p).is_ok_and(|a| classify_inertia(field, m, p, a as i128).is_ok())
        })
        .collect();
    if valid.len() <= samples {
        return valid;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<u64> = sample(&mut rng, valid.len(), samples)
        .into_iter()
        .map(|i| valid[i])
        .collect();
    picked.sort_unstable();
    picked
}

/// Largest field size enumerated by [`extension_count_bruteforce`].
pub const BRUTEFORCE_LIMIT: u64 = 1_000_000;

/// `F_{p^n}`, `n <= 2`, as `F_p[t]/(t^2 - u t - v)`; element `a + b t`
/// is stored at index `a + b p`.
struct SmallField {
    p: u64,
    n: u32,
    u: u64,
    v: u64,
}

impl SmallField {
    fn new(p: u64, n: u32) -> Self {
        let (u, v) = if n == 1 {
            (0, 0)
        } else if p == 2 {
            (1, 1) // t^2 + t + 1
        } else {
            let r = (2..p)
                .find(|&r| jacobi(r as i64, p) == -1)
                .expect("non-residue");
            (0, r)
        };
        SmallField { p, n, u, v }
    }

    fn size(&self) -> u64 {
        self.p.pow(self.n)
    }

    fn split(&self, i: u64) -> (u64, u64) {
        (i % self.p, i / self.p)
    }

    fn index(&self, (a, b): (u64, u64)) -> u64 {
        a + b * self.p
    }

    fn constant(&self, c: i64) -> (u64, u64) {
        (residue(c as i128, self.p), 0)
    }

    fn add(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        ((x.0 + y.0) % self.p, (x.1 + y.1) % self.p)
    }

    fn mul(&self, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
        // p <= 10^6, so products fit in u64
        let p = self.p;
        let bb = x.1 * y.1 % p;
        let a = (x.0 * y.0 + bb * self.v) % p;
        let b = (x.0 * y.1 + x.1 * y.0 + bb * self.u) % p;
        (a, b)
    }
}

/// `#E(F_{p^n})` for `n` in `{1, 2}` by enumerating points of the long model.
pub fn extension_count_bruteforce(
    curve: &EllipticCurve,
    p: u64,
    n: u32,
) -> Result<u64, ClassfieldError> {
    assert!(n == 1 || n == 2, "n must be 1 or 2");
    if !curve.has_good_reduction(p) {
        return Err(ClassfieldError::BadReduction { p });
    }
    if p.checked_pow(n).is_none_or(|q| q > BRUTEFORCE_LIMIT) {
        return Err(ClassfieldError::TooLarge {
            p,
            n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let k = SmallField::new(p, n);
    let q = k.size();
    let [a1, a2, a3, a4, a6] = curve.coefficients().map(|c| k.constant(c));
    // number of y with y^2 = z, tabulated by z
    let mut roots = vec![0u32; q as usize];
    for y in 0..q {
        let y = k.split(y);
        roots[k.index(k.mul(y, y)) as usize] += 1;
    }
    let mut count = 1u64;
    for xi in 0..q {
        let x = k.split(xi);
        let x2 = k.mul(x, x);
        // rhs = x^3 + a2 x^2 + a4 x + a6, lin = a1 x + a3
        let rhs = k.add(k.add(k.mul(x2, x), k.mul(a2, x2)), k.add(k.mul(a4, x), a6));
        let lin = k.add(k.mul(a1, x), a3);
        if p == 2 {
            for yi in 0..q {
                let y = k.split(yi);
                if k.add(k.mul(y, y), k.mul(lin, y)) == rhs {
                    count += 1;
                }
            }
        } else {
            // (2y + lin)^2 = lin^2 + 4 rhs
            let four = k.constant(4);
            let disc = k.add(k.mul(lin, lin), k.mul(four, rhs));
            count += roots[k.index(disc) as usize] as u64;
        }
    }
    Ok(count)
}
