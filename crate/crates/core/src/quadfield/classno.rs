use crate::arith::gcd;

/// Class number of the negative discriminant `disc`, counted as the number
/// of reduced primitive forms `(a, b, c)` with `b^2 - 4ac = disc`.
///
/// Reduced means `|b| <= a <= c`, with `b >= 0` whenever `|b| = a` or `a = c`.
pub fn class_number(disc: i64) -> u64 {
    assert!(
        disc < 0 && disc.rem_euclid(4) <= 1,
        "not a negative discriminant: {disc}"
    );
    let n = disc.unsigned_abs();
    let mut h = 0u64;
    let mut a = 1u64;
    // a <= sqrt(|D| / 3)
    while 3 * a * a <= n {
        let mut b = (n % 2) as i64;
        while b <= a as i64 {
            let b2 = (b * b) as u64;
            let num = b2 + n;
            if num.is_multiple_of(4 * a) {
                let c = num / (4 * a);
                if c >= a && gcd(gcd(a, b as u64), c) == 1 {
                    h += 1;
                    if b != 0 && b as u64 != a && a != c {
                        h += 1;
                    }
                }
            }
            b += 2;
        }
        a += 1;
    }
    h
}
