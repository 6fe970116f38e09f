use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_delta, CebotarevFilter, DensityError, DensityReport, SHARD};
use crate::ap_sources::ApProvider;
use crate::arith::{field_discriminant, jacobi, PrimeRange, PrimeSieve, Rational};
use crate::cmforms::{ap_cm_mod_p, CMFormSpec, CmValue};
use crate::quadfield::SplitType;
use crate::residue::{disc_divides, quartic_sign, symbol_fp, SymbolValue};

/// Which density theorem produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredictionSource {
    /// Quadratic residues, any field.
    Squares,
    /// Cubic residues over `Q(sqrt(-3))`.
    Cubes,
    /// `m | k - 1`, `d > 3`.
    HighPowers,
}

impl fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PredictionSource::Squares => "squares",
            PredictionSource::Cubes => "cubes",
            PredictionSource::HighPowers => "high-powers",
        })
    }
}

/// A proved value of `delta_m` together with the case that fired.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaPrediction {
    pub value: Ratio<u64>,
    pub source: PredictionSource,
    pub case: String,
}

impl DeltaPrediction {
    fn new(num: u64, den: u64, source: PredictionSource, case: impl Into<String>) -> Self {
        DeltaPrediction {
            value: Ratio::new(num, den),
            source,
            case: case.into(),
        }
    }

    pub fn value_f64(&self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

impl fmt::Display for DeltaPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}: {})", self.value, self.source, self.case)
    }
}

/// `(alpha/p)` for `p` coprime to `alpha`.
fn legendre_rational(alpha: Rational, p: u64) -> i8 {
    jacobi(alpha.num(), p) * jacobi((alpha.den() % p) as i64, p)
}

fn require_split(spec: &CMFormSpec, p: u64) -> Result<(), DensityError> {
    let ok = matches!(spec.field().split_type(p), SplitType::Split(_)) && !spec.is_bad(p);
    if ok {
        Ok(())
    } else {
        Err(DensityError::NotApplicable(format!(
            "{p} is not a split prime coprime to alpha*D"
        )))
    }
}

/// `(a_p/p)` predicted from `p` modulo 8, `k`, and `alpha` alone.
pub fn predict_symbol_sqr(spec: &CMFormSpec, p: u64) -> Result<i8, DensityError> {
    require_split(spec, p)?;
    let d = spec.field().d();
    Ok(if d == 1 {
        match p % 8 {
            1 => 1,
            _ => legendre_rational(spec.alpha(), p),
        }
    } else if p % 4 == 3 {
        legendre_rational(spec.alpha(), p)
    } else if spec.k() % 2 == 1 {
        1
    } else {
        quartic_sign(-(d as i128), p)?
    })
}

/// `(a_p/p)_3` for the forms over `Q(sqrt(-3))`, as an element of `F_p`.
///
/// With `c = alpha^((p-1)/3) mod p` the value is `1`, `c`, `c^2` for
/// `p = 1, 4, 7 (mod 9)`. It does not depend on `k`.
pub fn predict_symbol_cube(k: u64, alpha: Rational, p: u64) -> Result<SymbolValue, DensityError> {
    if k < 2 || p % 3 != 1 || alpha.divisible_by(p) {
        return Err(DensityError::NotApplicable(format!(
            "cube symbol needs k >= 2, p = 1 mod 3 and p coprime to alpha (k={k}, p={p})"
        )));
    }
    let c =
        symbol_fp(alpha.num() as i128, p, 3)?.mul(&symbol_fp(alpha.den() as i128, p, 3)?.pow(2));
    Ok(match p % 9 {
        1 => SymbolValue::one(p, 3),
        4 => c,
        _ => c.pow(2),
    })
}

/// The proved value of `delta_m(f^k_alpha)`, if one of the three density
/// theorems applies.
pub fn predict_delta(spec: &CMFormSpec, m: u64) -> Result<DeltaPrediction, DensityError> {
    use PredictionSource::*;
    let field = spec.field();
    let d = field.d();
    let disc = field.disc();
    let da = field_discriminant(spec.alpha())?;
    if m == 2 {
        let (full, quarter) = if d == 1 {
            (da == 1 || da == -4, da == 8 || da == -8)
        } else {
            (da == 1 || da == disc, da == -4 || da == 4 * d as i64)
        };
        let case = if full {
            "D(alpha) trivial or D"
        } else if quarter {
            "D(alpha) in the exceptional pair"
        } else {
            "generic alpha"
        };
        let (num, den) = match (d == 1, spec.k().is_multiple_of(2), full, quarter) {
            (true, _, true, _) => (1, 1),
            (true, _, _, true) => (1, 2),
            (true, _, _, _) => (3, 4),
            (false, true, true, _) => (3, 4),
            (false, true, _, true) => (1, 4),
            (false, true, _, _) => (1, 2),
            (false, false, true, _) => (1, 1),
            (false, false, _, true) => (1, 2),
            (false, false, _, _) => (3, 4),
        };
        return Ok(DeltaPrediction::new(num, den, Squares, case));
    }
    if d == 3 && m == 3 {
        return Ok(if spec.alpha().is_perfect_power(3) {
            DeltaPrediction::new(1, 1, Cubes, "alpha a cube")
        } else {
            DeltaPrediction::new(5, 9, Cubes, "alpha not a cube")
        });
    }
    if d > 3 && m >= 2 && (spec.k() - 1).is_multiple_of(m) {
        let dmin = field_discriminant(spec.alpha().scale(-(d as i64))?)?;
        let divides = |n: u64| disc_divides(da, n) || disc_divides(dmin, n);
        return Ok(if m % 2 == 1 {
            DeltaPrediction::new(1, 1, HighPowers, "m odd")
        } else if divides(m) {
            DeltaPrediction::new(1, 1, HighPowers, "D(alpha) or D(-d alpha) divides m")
        } else if divides(2 * m) {
            DeltaPrediction::new(1, 2, HighPowers, "D(alpha) or D(-d alpha) divides 2m only")
        } else {
            DeltaPrediction::new(3, 4, HighPowers, "generic alpha")
        });
    }
    Err(DensityError::Unsupported {
        m,
        spec: spec.to_string(),
    })
}

/// Per-prime comparison of computed and predicted symbols, with the
/// empirical density alongside the theorem's value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<u64>,
    pub empirical: DensityReport,
    pub predicted: Option<DeltaPrediction>,
}

/// Compares `(a_p/p)_m` against [`predict_symbol_sqr`] (`m = 2`) or
/// [`predict_symbol_cube`] (`m = 3`, `d = 3`) at every split prime of `range`
/// coprime to `alpha * D`.
pub fn crosscheck_cm(
    spec: &CMFormSpec,
    m: u64,
    range: PrimeRange,
) -> Result<CrossCheck, DensityError> {
    let d = spec.field().d();
    if !(m == 2 || (m == 3 && d == 3)) {
        return Err(DensityError::NotApplicable(format!(
            "no per-prime formula for m = {m}, d = {d}"
        )));
    }
    let sieve = PrimeSieve::new(range.hi());
    let parts: Vec<(u64, u64, Option<u64>)> = range
        .blocks(SHARD)
        .into_par_iter()
        .map(|block| -> Result<_, DensityError> {
            let mut primes = Vec::new();
            sieve.for_each(block, |p| primes.push(p));
            let (mut checked, mut bad, mut first) = (0, 0, None);
            for p in primes {
                if p % m != 1 || require_split(spec, p).is_err() {
                    continue;
                }
                let CmValue::Value(a) = ap_cm_mod_p(spec, p)? else {
                    continue;
                };
                let agree = if m == 2 {
                    jacobi(a as i64, p) == predict_symbol_sqr(spec, p)?
                } else {
                    symbol_fp(a as i128, p, 3)? == predict_symbol_cube(spec.k(), spec.alpha(), p)?
                };
                checked += 1;
                if !agree {
                    bad += 1;
                    first.get_or_insert(p);
                }
            }
            Ok((checked, bad, first))
        })
        .collect::<Result<_, _>>()?;
    let empirical = estimate_delta(&ApProvider::Cm(*spec), m, range, &CebotarevFilter::All)?;
    Ok(CrossCheck {
        checked: parts.iter().map(|t| t.0).sum(),
        mismatches: parts.iter().map(|t| t.1).sum(),
        first_mismatch: parts.iter().find_map(|t| t.2),
        empirical,
        predicted: predict_delta(spec, m).ok(),
    })
}
