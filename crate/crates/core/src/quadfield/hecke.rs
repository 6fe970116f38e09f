use super::{QuadError, QuadField, QuadInt, SplitPrime};
use crate::arith::{
    checked_pow_u128, cornacchia_with_root, factorize, hensel_lift_sqrt, jacobi, residue,
};

/// Residues modulo `4*sqrt(-2)` of the normalized generators for `d = 2`:
/// 1, 3, 5+s, 7+s, 5+2s, 7+2s, 5+3s, 7+3s with `s = sqrt(-2)`.
const D2_CLASSES: [QuadInt; 8] = [
    QuadInt::new(2, 0),
    QuadInt::new(6, 0),
    QuadInt::new(10, 2),
    QuadInt::new(14, 2),
    QuadInt::new(10, 4),
    QuadInt::new(14, 4),
    QuadInt::new(10, 6),
    QuadInt::new(14, 6),
];

/// `psi(P)`: the generator of `P^h` singled out by the unit normalization.
///
/// * `d > 3`: the generator whose image in `O/(sqrt(-d)) = Z/d` is a nonzero
///   square modulo every prime factor of `d`;
/// * `d = 1`: the generator congruent to 1 modulo `2 + 2i`;
/// * `d = 3`: the generator congruent to 1 modulo 3;
/// * `d = 2`: the generator congruent to one of [`D2_CLASSES`] modulo `4*sqrt(-2)`.
///
/// Exactly one associate must pass; anything else is reported as an error.
pub fn hecke_psi(sp: &SplitPrime) -> Result<QuadInt, QuadError> {
    let field = sp.field();
    let (d, p) = (field.d(), sp.p());
    let base = generator_up_to_units(sp)?;
    let mut passing = Vec::with_capacity(1);
    for cand in [base, base.conj()] {
        for u in field.units() {
            let z = field.mul(u, cand)?;
            if sp.reduce_at_p(z) != 0 || sp.reduce_at_pbar(z) == 0 {
                continue;
            }
            if is_normalized(field, z)? {
                passing.push(z);
            }
        }
    }
    match passing.len() {
        0 => Err(QuadError::NormalizationEmpty { d, p }),
        1 => Ok(passing[0]),
        count => Err(QuadError::NormalizationAmbiguous { d, p, count }),
    }
}

/// Some generator of `P^h` or of `P̄^h`, found by Cornacchia's descent.
fn generator_up_to_units(sp: &SplitPrime) -> Result<QuadInt, QuadError> {
    let field = sp.field();
    let (d, p) = (field.d(), sp.p());
    let none = || QuadError::NoRepresentation { d, p };
    let h = u32::try_from(field.h()).map_err(|_| QuadError::Overflow)?;
    let ph = checked_pow_u128(p, h).ok_or(QuadError::Overflow)?;
    let root = hensel_lift_sqrt(sp.t(), d, p, h).ok_or(QuadError::Overflow)?;
    let (x, y) = if d % 4 == 3 {
        // x^2 + d y^2 = 4 p^h, with an odd root of -d modulo 4 p^h
        let target = ph
            .checked_mul(4)
            .filter(|&t| t < 1 << 126)
            .ok_or(QuadError::Overflow)?;
        let odd_root = if root % 2 == 1 { root } else { root + ph };
        cornacchia_with_root(d as u128, 2 * ph, target, odd_root).ok_or_else(none)?
    } else {
        let (a, b) = cornacchia_with_root(d as u128, ph, ph, root).ok_or_else(none)?;
        (2 * a, 2 * b)
    };
    let x = i128::try_from(x).map_err(|_| QuadError::Overflow)?;
    let y = i128::try_from(y).map_err(|_| QuadError::Overflow)?;
    Ok(QuadInt::new(x, y))
}

fn is_normalized(field: QuadField, z: QuadInt) -> Result<bool, QuadError> {
    match field.d() {
        1 => field.divides(QuadInt::new(4, 4), z - field.one()),
        3 => field.divides(QuadInt::new(6, 0), z - field.one()),
        2 => {
            for c in D2_CLASSES {
                if field.divides(QuadInt::new(0, 8), z - c)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        d => {
            // z ≡ x/2 modulo sqrt(-d)
            let inv2 = d.div_ceil(2);
            let r = residue(residue(z.x, d) as i128 * inv2 as i128, d);
            Ok(factorize(d).iter().all(|&(q, _)| {
                let rq = r % q;
                rq != 0 && jacobi(rq as i64, q) == 1
            }))
        }
    }
}
