//! String forms accepted on the command line.

use powres::arith::{PrimeRange, Rational};
use powres::cmforms::CMFormSpec;
use powres::density::CebotarevFilter;
use powres::quadfield::make_field;

use crate::CliError;

/// Integer with optional scientific shorthand: `100000`, `1e5`, `2.5e6`.
pub fn integer(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let bad = || CliError::Usage(format!("not an integer: {s:?}"));
    let (mant, exp) = s.split_once(['e', 'E']).ok_or_else(bad)?;
    let exp: u32 = exp.parse().map_err(|_| bad())?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let frac = frac.trim_end_matches('0');
    let shift = exp.checked_sub(frac.len() as u32).ok_or_else(bad)?;
    let digits: u64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    10u64
        .checked_pow(shift)
        .and_then(|t| digits.checked_mul(t))
        .ok_or_else(bad)
}

/// `A:B`, the half-open interval `[A, B)`.
pub fn range(s: &str) -> Result<PrimeRange, CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("range must look like A:B, got {s:?}")))?;
    PrimeRange::new(integer(a)?, integer(b)?).map_err(|e| CliError::Usage(e.to_string()))
}

/// `2..10` (inclusive), `2,3,5`, or a single order.
pub fn orders(s: &str) -> Result<Vec<u64>, CliError> {
    let ms: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (integer(a)?, integer(b.trim_start_matches('='))?);
        (a..=b).collect()
    } else {
        s.split(',').map(integer).collect::<Result<_, _>>()?
    };
    if ms.is_empty() || ms.iter().any(|&m| m < 2) {
        return Err(CliError::Usage(format!("orders must be >= 2, got {s:?}")));
    }
    Ok(ms)
}

pub fn rational(s: &str) -> Result<Rational, CliError> {
    s.parse()
        .map_err(|e| CliError::Usage(format!("bad rational {s:?}: {e}")))
}

/// `d=7,k=2,alpha=1`.
pub fn cm_spec(s: &str) -> Result<CMFormSpec, CliError> {
    let (mut d, mut k, mut alpha) = (None, None, None);
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected key=value in {s:?}")))?;
        match key.trim() {
            "d" => d = Some(integer(value)?),
            "k" => k = Some(integer(value)?),
            "alpha" | "a" => alpha = Some(rational(value)?),
            other => return Err(CliError::Usage(format!("unknown key {other:?} in {s:?}"))),
        }
    }
    let d = d.ok_or_else(|| CliError::Usage("missing d=".into()))?;
    cm_from_parts(
        d,
        k.unwrap_or(2),
        alpha.unwrap_or(Rational::integer(1).expect("nonzero")),
    )
}

pub fn cm_from_parts(d: u64, k: u64, alpha: Rational) -> Result<CMFormSpec, CliError> {
    let field = make_field(d).map_err(|e| CliError::Domain(e.to_string()))?;
    CMFormSpec::new(field, k, alpha).map_err(|e| CliError::Domain(e.to_string()))
}

/// `cong:M:r1,r2` or `cubic:c3,c2,c1,c0:n1,n2`.
pub fn filter(s: &str) -> Result<CebotarevFilter, CliError> {
    let usage = |e: String| CliError::Usage(format!("bad filter {s:?}: {e}"));
    let mut parts = s.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let (a, b) = match (parts.next(), parts.next()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(usage("expected kind:arg:set".into())),
    };
    let list = |t: &str| -> Result<Vec<i64>, CliError> {
        t.split(',')
            .map(|x| {
                x.trim()
                    .replace('\u{2212}', "-")
                    .parse::<i64>()
                    .map_err(|e| usage(e.to_string()))
            })
            .collect()
    };
    let f = match kind {
        "cong" => {
            let modulus = integer(a)?;
            let residues = list(b)?
                .into_iter()
                .map(|r| r.rem_euclid(modulus as i64) as u64);
            CebotarevFilter::congruence(modulus, residues)
        }
        "cubic" => {
            let coeffs: [i64; 4] = list(a)?
                .try_into()
                .map_err(|_| usage("need four coefficients".into()))?;
            let counts = list(b)?
                .into_iter()
                .map(|c| u8::try_from(c).unwrap_or(u8::MAX));
            CebotarevFilter::cubic(coeffs, counts)
        }
        other => return Err(usage(format!("unknown kind {other:?}"))),
    };
    f.map_err(|e| usage(e.to_string()))
}
