use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SourceError;
use crate::arith::{factorize, gcd, inv_mod, jacobi, mul_mod, residue, sqrt_mod, Rational};
use crate::cmforms::CMFormSpec;
use crate::quadfield::make_field;

/// Curve `y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6` over `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 5]", into = "[i64; 5]")]
pub struct EllipticCurve {
    a: [i64; 5],
    c4: i128,
    c6: i128,
    disc: i128,
}

impl EllipticCurve {
    pub fn new(a: [i64; 5]) -> Result<Self, SourceError> {
        let [a1, a2, a3, a4, a6] = a.map(|v| v as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        let of = || SourceError::CurveOverflow(a);
        let c4 = b2
            .checked_mul(b2)
            .and_then(|v| v.checked_sub(24 * b4))
            .ok_or_else(of)?;
        let c6 = (|| {
            let t1 = b2.checked_pow(3)?;
            let t2 = b2.checked_mul(b4)?.checked_mul(36)?;
            let t3 = b6.checked_mul(216)?;
            t2.checked_sub(t1)?.checked_sub(t3)
        })()
        .ok_or_else(of)?;
        let disc = (|| {
            let t1 = b2.checked_mul(b2)?.checked_mul(b8)?;
            let t2 = b4.checked_pow(3)?.checked_mul(8)?;
            let t3 = b6.checked_mul(b6)?.checked_mul(27)?;
            let t4 = b2.checked_mul(b4)?.checked_mul(b6)?.checked_mul(9)?;
            t4.checked_sub(t1)?.checked_sub(t2)?.checked_sub(t3)
        })()
        .ok_or_else(of)?;
        if disc == 0 {
            return Err(SourceError::Singular(a));
        }
        Ok(EllipticCurve { a, c4, c6, disc })
    }

    pub fn coefficients(&self) -> [i64; 5] {
        self.a
    }

    pub fn discriminant(&self) -> i128 {
        self.disc
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        self.disc % p as i128 != 0
    }

    /// `(A, B)` of the short model `Y^2 = X^3 + A*X + B` over `F_p`, `p > 3`,
    /// namely `A = -27*c4`, `B = -54*c6`.
    pub fn short_model(&self, p: u64) -> (u64, u64) {
        let c4 = residue(self.c4, p);
        let c6 = residue(self.c6, p);
        (mul_mod(p - 27 % p, c4, p), mul_mod(p - 54 % p, c6, p))
    }

    fn check(&self, p: u64) -> Result<(), SourceError> {
        if !self.has_good_reduction(p) {
            return Err(SourceError::BadReduction { p });
        }
        if p <= 3 {
            return Err(SourceError::SmallPrime { p });
        }
        Ok(())
    }

    fn seed(&self, p: u64) -> u64 {
        self.a.iter().fold(p ^ 0x5851_f42d_4c95_7f2d, |s, &c| {
            (s ^ c as u64)
                .wrapping_mul(0x9e37_79b9_7f4a_7c15)
                .rotate_left(29)
        })
    }
}

impl fmt::Display for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.a;
        write!(f, "{a1},{a2},{a3},{a4},{a6}")
    }
}

impl FromStr for EllipticCurve {
    type Err = SourceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SourceError::ParseCurve(s.to_string());
        let parts: Vec<i64> = s
            .split(',')
            .map(|t| t.trim().replace('\u{2212}', "-").parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let a: [i64; 5] = parts.try_into().map_err(|_| bad())?;
        EllipticCurve::new(a)
    }
}

impl TryFrom<[i64; 5]> for EllipticCurve {
    type Error = SourceError;
    fn try_from(a: [i64; 5]) -> Result<Self, Self::Error> {
        EllipticCurve::new(a)
    }
}

impl From<EllipticCurve> for [i64; 5] {
    fn from(e: EllipticCurve) -> [i64; 5] {
        e.a
    }
}

/// A curve over `Q` with CM by the maximal order of `Q(sqrt(-d))`, one for
/// each class-number-one field.
///
/// Its `a_p` are the traces of the Hecke character `psi` of the field, which
/// is the weight-2 form `f^2_alpha` with `alpha = 1/eps`; see [`cm_curve_form`].
pub fn cm_curve(d: u64) -> Option<EllipticCurve> {
    let a = match d {
        1 => [0, 0, 0, -1, 0],
        2 => [0, 4, 0, 2, 0],
        3 => [0, 0, 1, 0, -7],
        7 => [1, -1, 0, -2, -1],
        11 => [0, -1, 1, -7, 10],
        19 => [0, 0, 1, -38, 90],
        43 => [0, 0, 1, -860, 9707],
        67 => [0, 0, 1, -7370, 243528],
        163 => [0, 0, 1, -2174420, 1234136692],
        _ => return None,
    };
    Some(EllipticCurve::new(a).expect("nonsingular"))
}

/// The curve of [`cm_curve`] paired with the weight-2 CM form sharing its `a_p`.
pub fn cm_curve_form(d: u64) -> Option<(EllipticCurve, CMFormSpec)> {
    let curve = cm_curve(d)?;
    let field = make_field(d).ok()?;
    let alpha = Rational::new(
        field.eps().signum() as i64,
        field.eps().unsigned_abs() as u64,
    )
    .ok()?;
    Some((curve, CMFormSpec::new(field, 2, alpha).ok()?))
}

/// Quadratic-residue table of `F_p`.
fn square_table(p: u64) -> Vec<bool> {
    let mut sq = vec![false; p as usize];
    for y in 1..=(p / 2) {
        sq[mul_mod(y, y, p) as usize] = true;
    }
    sq
}

/// `-sum_x chi(x^3 + A x + B)` over `F_p`.
fn character_sum(a: u64, b: u64, p: u64, sq: &[bool]) -> i64 {
    // finite differences of f(x) = x^3 + a x + b
    let mut f = b;
    let mut d1 = (1 + a) % p;
    let mut d2 = 6 % p;
    let six = 6 % p;
    let mut s = 0i64;
    for _ in 0..p {
        if f != 0 {
            s += if sq[f as usize] { 1 } else { -1 };
        }
        f = (f + d1) % p;
        d1 = (d1 + d2) % p;
        d2 = (d2 + six) % p;
    }
    -s
}

/// `a_p = p + 1 - #E(F_p)` by an `O(p)` character sum on the short model.
pub fn ap_elliptic_naive(curve: &EllipticCurve, p: u64) -> Result<i64, SourceError> {
    curve.check(p)?;
    let (a, b) = curve.short_model(p);
    Ok(character_sum(a, b, p, &square_table(p)))
}

/// `a_p` by counting all `(x, y)` on the long model. `O(p^2)`; any good `p`.
pub fn ap_elliptic_bruteforce(curve: &EllipticCurve, p: u64) -> Result<i64, SourceError> {
    if !curve.has_good_reduction(p) {
        return Err(SourceError::BadReduction { p });
    }
    let [a1, a2, a3, a4, a6] = curve.a.map(|v| residue(v as i128, p));
    let mut count = 1u64;
    for x in 0..p {
        let rhs = (mul_mod(mul_mod(x, x, p), (x + a2) % p, p) + mul_mod(a4, x, p) + a6) % p;
        let lin = (mul_mod(a1, x, p) + a3) % p;
        for y in 0..p {
            if (mul_mod(y, (y + lin) % p, p) + p - rhs).is_multiple_of(p) {
                count += 1;
            }
        }
    }
    Ok(p as i64 + 1 - count as i64)
}

type Point = Option<(u64, u64)>;

/// Short Weierstrass curve over `F_p` in affine coordinates.
#[derive(Clone, Copy)]
struct Group {
    a: u64,
    b: u64,
    p: u64,
}

impl Group {
    fn neg(&self, pt: Point) -> Point {
        pt.map(|(x, y)| (x, (self.p - y) % self.p))
    }

    fn add(&self, u: Point, v: Point) -> Point {
        let p = self.p;
        let ((x1, y1), (x2, y2)) = match (u, v) {
            (None, _) => return v,
            (_, None) => return u,
            (Some(a), Some(b)) => (a, b),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (mul_mod(3, mul_mod(x1, x1, p), p) + self.a) % p;
            mul_mod(num, inv_mod(2 * y1 % p, p).expect("nonzero"), p)
        } else {
            let num = (y2 + p - y1) % p;
            mul_mod(num, inv_mod((x2 + p - x1) % p, p).expect("nonzero"), p)
        };
        let x3 = (mul_mod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mul_mod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        Some((x3, y3))
    }

    fn mul(&self, pt: Point, mut n: u64) -> Point {
        let mut acc = None;
        let mut base = pt;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            n >>= 1;
            if n > 0 {
                base = self.add(base, base);
            }
        }
        acc
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Point {
        let p = self.p;
        loop {
            let x = rng.random_range(0..p);
            let f = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(self.a, x, p) + self.b) % p;
            if f == 0 {
                return Some((x, 0));
            }
            if jacobi(f as i64, p) == 1 {
                let y = sqrt_mod(f, p).expect("residue");
                let y = if rng.random_range(0..2u8) == 0 {
                    y
                } else {
                    p - y
                };
                return Some((x, y));
            }
        }
    }

    /// Some `N` in `[lo, hi]` with `[N] pt = O`, by baby-step giant-step.
    fn multiple_in(&self, pt: Point, lo: u64, hi: u64) -> Option<u64> {
        let m = (hi - lo).isqrt() + 1;
        let mut baby: Vec<(u64, u64)> = Vec::with_capacity(m as usize);
        let mut cur = pt;
        for j in 1..=m {
            match cur {
                None => {
                    // order j divides some N in the interval
                    let n = lo.div_ceil(j) * j;
                    return (n <= hi).then_some(n);
                }
                Some((x, _)) => baby.push((x, j)),
            }
            cur = self.add(cur, pt);
        }
        baby.sort_unstable();
        let step = 2 * m + 1;
        let giant = self.neg(self.mul(pt, step));
        let mut base = lo + m;
        let mut r = self.mul(pt, base);
        loop {
            if base > hi + m {
                return None;
            }
            match r {
                None if (lo..=hi).contains(&base) => return Some(base),
                None => {}
                Some((x, y)) => {
                    let idx = baby.partition_point(|&(bx, _)| bx < x);
                    for &(bx, j) in &baby[idx..] {
                        if bx != x {
                            break;
                        }
                        let jp = self.mul(pt, j).expect("j below the order");
                        // r = -s*pt, so s = -j when r = j*pt and s = j when r = -j*pt
                        let n = if jp.1 == y { base - j } else { base + j };
                        if (lo..=hi).contains(&n) && self.mul(pt, n).is_none() {
                            return Some(n);
                        }
                    }
                }
            }
            r = self.add(r, self.neg(giant));
            base += step;
        }
    }

    /// Exact order of `pt`, given a multiple `n` of it.
    fn order_from_multiple(&self, pt: Point, mut n: u64) -> u64 {
        for (q, e) in factorize(n) {
            for _ in 0..e {
                if self.mul(pt, n / q).is_none() {
                    n /= q;
                } else {
                    break;
                }
            }
        }
        n
    }
}

/// Random points tried per curve before giving up.
const BSGS_BUDGET: usize = 64;

/// `a_p` by Shanks-Mestre: orders of random points on `E` and on its
/// quadratic twist until one group order in the Hasse interval remains.
pub fn ap_elliptic_bsgs(curve: &EllipticCurve, p: u64) -> Result<i64, SourceError> {
    curve.check(p)?;
    let (a, b) = curve.short_model(p);
    let g = (2..p)
        .find(|&g| jacobi(g as i64, p) == -1)
        .expect("odd prime has a non-residue");
    let g2 = mul_mod(g, g, p);
    let e = Group { a, b, p };
    let twist = Group {
        a: mul_mod(a, g2, p),
        b: mul_mod(b, mul_mod(g2, g, p), p),
        p,
    };
    let amax = (4 * p as u128).isqrt() as u64;
    let (lo, hi) = (p + 1 - amax, p + 1 + amax);
    let mut rng = ChaCha8Rng::seed_from_u64(curve.seed(p));
    let (mut l, mut lt) = (1u64, 1u64);
    for attempt in 0..BSGS_BUDGET {
        let on_twist = attempt % 2 == 1;
        let grp = if on_twist { twist } else { e };
        let pt = grp.random_point(&mut rng);
        let Some(n) = grp.multiple_in(pt, lo, hi) else {
            return Err(SourceError::Ambiguous { p });
        };
        let ord = grp.order_from_multiple(pt, n);
        if on_twist {
            lt = lt / gcd(lt, ord) * ord;
        } else {
            l = l / gcd(l, ord) * ord;
        }
        let mut found = None;
        let mut count = 0;
        let mut n = lo.div_ceil(l) * l;
        while n <= hi {
            if (2 * p + 2 - n).is_multiple_of(lt) {
                count += 1;
                found = Some(n);
            }
            n += l;
        }
        if count == 1 {
            let n = found.expect("one candidate");
            return Ok(p as i64 + 1 - n as i64);
        }
    }
    Err(SourceError::Ambiguous { p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{sieve_range, PrimeRange};

    fn curve(s: &str) -> EllipticCurve {
        s.parse().unwrap()
    }

    #[test]
    fn discriminants() {
        assert_eq!(curve("0,0,0,-1,0").discriminant(), 64);
        assert_eq!(curve("0,-1,1,-10,-20").discriminant(), -161051); // -11^5
        assert_eq!(curve("0,0,1,0,-7").discriminant(), -19683); // -3^9
        assert!(EllipticCurve::new([0, 0, 0, 0, 0]).is_err());
        assert!("1,2,3".parse::<EllipticCurve>().is_err());
        assert_eq!(curve("0,−1,1,−10,−20").to_string(), "0,-1,1,-10,-20");
    }

    #[test]
    fn naive_counts() {
        assert_eq!(ap_elliptic_naive(&curve("0,0,0,-1,0"), 5), Ok(-2));
        assert_eq!(ap_elliptic_naive(&curve("0,-1,1,-10,-20"), 5), Ok(1));
        assert_eq!(
            ap_elliptic_naive(&curve("0,0,0,-1,0"), 2),
            Err(SourceError::BadReduction { p: 2 })
        );
        assert_eq!(
            ap_elliptic_naive(&curve("0,-1,1,-10,-20"), 3),
            Err(SourceError::SmallPrime { p: 3 })
        );
        assert_eq!(ap_elliptic_bruteforce(&curve("0,-1,1,-10,-20"), 3), Ok(-1));
        assert_eq!(ap_elliptic_bruteforce(&curve("0,-1,1,-10,-20"), 2), Ok(-2));
    }

    #[test]
    fn short_model_matches_long_model_count() {
        for c in [
            "0,-1,1,-10,-20",
            "1,-1,0,-2,-1",
            "0,0,1,-1,0",
            "1,0,1,4,-6",
            "0,0,1,0,-7",
        ] {
            let e = curve(c);
            for p in sieve_range(PrimeRange::new(5, 400).unwrap()) {
                if e.has_good_reduction(p) {
                    assert_eq!(
                        ap_elliptic_naive(&e, p),
                        ap_elliptic_bruteforce(&e, p),
                        "{c} p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn bsgs_matches_naive() {
        let e = curve("0,-1,1,-10,-20");
        assert_eq!(ap_elliptic_bsgs(&e, 1009), ap_elliptic_naive(&e, 1009));
        for c in ["0,-1,1,-10,-20", "0,0,0,-1,0", "0,0,1,-1,0"] {
            let e = curve(c);
            for p in sieve_range(PrimeRange::new(1000, 8000).unwrap()) {
                if e.has_good_reduction(p) {
                    assert_eq!(
                        ap_elliptic_bsgs(&e, p),
                        ap_elliptic_naive(&e, p),
                        "{c} p={p}"
                    );
                }
            }
        }
        assert_eq!(
            ap_elliptic_bsgs(&e, 11),
            Err(SourceError::BadReduction { p: 11 })
        );
    }

    #[test]
    fn cm_curves_match_their_forms() {
        use crate::cmforms::{ap_cm, CmValue};
        for d in [1, 2, 3, 7, 11, 19, 43, 67, 163] {
            let (e, spec) = cm_curve_form(d).unwrap();
            for p in sieve_range(PrimeRange::new(5, 3000).unwrap()) {
                if !e.has_good_reduction(p) {
                    continue;
                }
                let a = ap_elliptic_naive(&e, p).unwrap() as i128;
                match ap_cm(&spec, p).unwrap() {
                    CmValue::Value(v) => assert_eq!(v, a, "d={d} p={p}"),
                    CmValue::Zero => assert_eq!(a, 0, "d={d} p={p}"),
                    CmValue::Skip => {}
                }
            }
        }
        assert_eq!(cm_curve_form(1).unwrap().1.alpha().to_string(), "1/2");
        assert_eq!(cm_curve_form(3).unwrap().1.alpha().to_string(), "-1");
        assert!(cm_curve(5).is_none());
    }

    #[test]
    fn bsgs_agrees_with_cm_formula_near_a_million() {
        use crate::cmforms::{ap_cm, CmValue};
        let (e, spec) = cm_curve_form(1).unwrap();
        // 10^6 + 3 and 1000099 are inert (a_p = 0); the others split
        for p in [
            1_000_003u64,
            1_000_033,
            1_000_037,
            1_000_081,
            1_000_099,
            1_000_117,
        ] {
            let want = match ap_cm(&spec, p).unwrap() {
                CmValue::Value(v) => v,
                CmValue::Zero => 0,
                CmValue::Skip => unreachable!(),
            };
            assert_eq!(ap_elliptic_bsgs(&e, p).unwrap() as i128, want, "p={p}");
        }
    }

    #[test]
    fn bsgs_at_large_primes_stays_in_the_hasse_interval() {
        let e = curve("0,-1,1,-10,-20");
        for p in sieve_range(PrimeRange::new(1_000_000_000_000, 1_000_000_000_200).unwrap()) {
            let a = ap_elliptic_bsgs(&e, p).unwrap();
            assert!((a as i128).pow(2) <= 4 * p as i128);
        }
    }
}
