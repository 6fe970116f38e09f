//! Representations `x^2 + d*y^2 = m` by Cornacchia's algorithm.

use super::{factorize, inv_mod, mul_mod, sqrt_mod};

/// Euclidean descent of Cornacchia's algorithm.
///
/// Given `root` with `root^2 ≡ -d (mod modulus)` and the target `target`
/// (equal to `modulus`, or `2*modulus` for the `x^2 + d*y^2 = 4p` variant
/// where `modulus` is then `2p`), runs Euclid on `(modulus, root)` until the
/// remainder drops to `sqrt(target)` and checks the candidate. Returns the
/// primitive solution attached to `±root`, if there is one.
pub fn cornacchia_with_root(
    d: u128,
    modulus: u128,
    target: u128,
    root: u128,
) -> Option<(u128, u128)> {
    let bound = target.isqrt();
    let mut a = modulus;
    let mut b = root % modulus;
    if 2 * b < modulus {
        b = modulus - b;
    }
    while b > bound {
        (a, b) = (b, a % b);
    }
    let rem = target.checked_sub(b * b)?;
    if rem % d != 0 {
        return None;
    }
    let c = rem / d;
    let y = c.isqrt();
    (y * y == c).then_some((b, y))
}

/// Nonnegative solution of `x^2 + d*y^2 = m` with the smallest `y`, or `None`.
///
/// Every solution is `g` times a primitive solution of `m / g^2`, and every
/// primitive solution is found by the Euclidean descent from one square root
/// of `-d` modulo `m / g^2`.
pub fn cornacchia(d: u64, m: u64) -> Option<(u64, u64)> {
    assert!(d >= 1 && m >= 1);
    let fac = factorize(m);
    let mut best: Option<(u64, u64)> = None;
    for g in square_divisors(&fac) {
        let mp = m / (g * g);
        let reduced: Vec<(u64, u32)> = fac
            .iter()
            .map(|&(q, e)| (q, e - 2 * valuation(g, q)))
            .filter(|&(_, e)| e > 0)
            .collect();
        for r in sqrt_neg_d_mod(d, &reduced) {
            let Some((x, y)) = cornacchia_with_root(d as u128, mp as u128, mp as u128, r as u128)
            else {
                continue;
            };
            let (x, y) = (x as u64 * g, y as u64 * g);
            if best.is_none_or(|(_, by)| y < by) {
                best = Some((x, y));
            }
        }
    }
    if let Some((x, y)) = best {
        assert_eq!(
            x as u128 * x as u128 + d as u128 * y as u128 * y as u128,
            m as u128,
            "cornacchia produced a non-solution"
        );
    }
    best
}

fn valuation(mut n: u64, q: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(q) && n > 0 {
        n /= q;
        v += 1;
    }
    v
}

fn square_divisors(fac: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(q, e) in fac {
        let mut next = Vec::new();
        for &g in &out {
            let mut qq = 1u64;
            for _ in 0..=e / 2 {
                next.push(g * qq);
                qq *= q;
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

/// All roots of `x^2 ≡ -d` modulo `prod q^e`.
fn sqrt_neg_d_mod(d: u64, fac: &[(u64, u32)]) -> Vec<u64> {
    let mut roots = vec![0u64];
    let mut modulus = 1u64;
    for &(q, e) in fac {
        let qe = q.pow(e);
        let local = roots_mod_prime_power(d, q, e);
        if local.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(roots.len() * local.len());
        for &r in &roots {
            for &s in &local {
                next.push(crt(r, modulus, s, qe));
            }
        }
        roots = next;
        modulus *= qe;
    }
    if fac.is_empty() {
        // modulus 1: the single residue 0
        return vec![0];
    }
    roots
}

fn crt(r: u64, m: u64, s: u64, n: u64) -> u64 {
    if m == 1 {
        return s;
    }
    // x = r + m * k, with k ≡ (s - r) / m (mod n)
    let inv = inv_mod(m % n, n).expect("coprime moduli");
    let diff = (s as i128 - r as i128).rem_euclid(n as i128) as u64;
    let k = mul_mod(diff, inv, n);
    r + m * k
}

fn roots_mod_prime_power(d: u64, q: u64, e: u32) -> Vec<u64> {
    let neg = |m: u64| (m - d % m) % m;
    let mut roots: Vec<u64> = if q > 2 && !d.is_multiple_of(q) {
        match sqrt_mod(neg(q), q) {
            Ok(0) => vec![0],
            Ok(t) => vec![t, q - t],
            Err(_) => return Vec::new(),
        }
    } else {
        (0..q).filter(|&x| mul_mod(x, x, q) == neg(q)).collect()
    };
    let mut qj = q;
    for _ in 1..e {
        let next_mod = qj * q;
        let target = neg(next_mod);
        let mut lifted = Vec::new();
        for &r in &roots {
            for i in 0..q {
                let x = r + i * qj;
                if mul_mod(x, x, next_mod) == target {
                    lifted.push(x);
                }
            }
        }
        roots = lifted;
        qj = next_mod;
        if roots.is_empty() {
            break;
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(d: u64, m: u64) -> Option<(u64, u64)> {
        (0..).take_while(|y| d * y * y <= m).find_map(|y| {
            let r = m - d * y * y;
            let x = r.isqrt();
            (x * x == r).then_some((x, y))
        })
    }

    #[test]
    fn examples() {
        assert_eq!(cornacchia(7, 44), Some((4, 2)));
        assert_eq!(cornacchia(7, 52), None);
        // Minimal-y convention: 5 = 2^2 + 1*1^2 beats 1^2 + 1*2^2.
        assert_eq!(cornacchia(1, 5), Some((2, 1)));
        assert_eq!(cornacchia(7, 7), Some((0, 1)));
        assert_eq!(cornacchia(3, 1), Some((1, 0)));
    }

    #[test]
    fn exhaustive_small() {
        for d in 1..40u64 {
            for m in 1..3_000u64 {
                assert_eq!(cornacchia(d, m), brute(d, m), "d={d} m={m}");
            }
        }
    }

    #[test]
    fn four_p_variant() {
        // x^2 + 7y^2 = 4*11 via a root of -7 mod 44 that is odd.
        let root = (1..44u128)
            .find(|r| (r * r + 7) % 44 == 0 && r % 2 == 1)
            .unwrap();
        let (x, y) = cornacchia_with_root(7, 22, 44, root).unwrap();
        assert_eq!(x * x + 7 * y * y, 44);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(d in 1u64..500, m in 1u64..2_000_000) {
            prop_assert_eq!(cornacchia(d, m), brute(d, m));
        }
    }
}
