//! Uniform access to `a_p` from CM formulas, elliptic curves, the discriminant
//! form `Delta`, and user-supplied tables.

mod elliptic;
mod table;
mod tau;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cmforms::{ap_cm_mod_p, CMFormSpec, CmError, CmValue};

pub use elliptic::{
    ap_elliptic_bruteforce, ap_elliptic_bsgs, ap_elliptic_naive, cm_curve, cm_curve_form,
    EllipticCurve,
};
pub use table::{load_ap_table, parse_ap_table, ApTable};
pub use tau::{tau_series, tau_series_bounded, TauTable, DEFAULT_TAU_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SourceError {
    #[error("curve [{0:?}] is singular")]
    Singular([i64; 5]),
    #[error("curve [{0:?}] has invariants beyond 128 bits")]
    CurveOverflow([i64; 5]),
    #[error("cannot parse curve {0:?}: expected a1,a2,a3,a4,a6")]
    ParseCurve(String),
    #[error("bad reduction at {p}")]
    BadReduction { p: u64 },
    #[error("short model needs p > 3, got {p}")]
    SmallPrime { p: u64 },
    #[error("group order at {p} not determined within the retry budget")]
    Ambiguous { p: u64 },
    #[error("series length {n} exceeds the bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("line {line}: cannot parse {content:?}")]
    Parse { line: usize, content: String },
    #[error("line {line}: duplicate prime {p}")]
    DuplicatePrime { line: usize, p: u64 },
    #[error("line {line}: {p} is not prime")]
    NotPrime { line: usize, p: u64 },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Cm(#[from] CmError),
}

/// Below this, elliptic `a_p` is counted naively.
pub const BSGS_THRESHOLD: u64 = 1000;

/// A source of Fourier coefficients at primes.
#[derive(Debug, Clone, PartialEq)]
pub enum ApProvider {
    Cm(CMFormSpec),
    Elliptic(EllipticCurve),
    Delta(Arc<TauTable>),
    File(Arc<ApTable>),
}

impl ApProvider {
    pub fn delta(bound: usize) -> Result<Self, SourceError> {
        Ok(ApProvider::Delta(Arc::new(tau_series(bound)?)))
    }
}

impl fmt::Display for ApProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ApProvider::Cm(spec) => write!(f, "cm:{spec}"),
            ApProvider::Elliptic(e) => write!(f, "elliptic:[{e}]"),
            ApProvider::Delta(t) => write!(f, "delta:N={}", t.len()),
            ApProvider::File(t) => write!(f, "file:{} primes", t.len()),
        }
    }
}

/// What a provider knows about `a_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Answer {
    Value(i128),
    /// `a_p mod p`, in `[0, p)`.
    ValueModP(u64),
    Zero,
    /// `p` is excluded, e.g. bad reduction.
    Skip,
    /// The provider has no data at `p`.
    Missing,
}

impl Answer {
    /// `a_p mod p`, when known.
    pub fn mod_p(&self, p: u64) -> Option<u64> {
        match *self {
            Answer::Value(a) => Some(crate::arith::residue(a, p)),
            Answer::ValueModP(r) => Some(r),
            Answer::Zero => Some(0),
            Answer::Skip | Answer::Missing => None,
        }
    }
}

pub fn provider_ap(provider: &ApProvider, p: u64) -> Result<Answer, SourceError> {
    match provider {
        ApProvider::Cm(spec) => Ok(match ap_cm_mod_p(spec, p)? {
            CmValue::Value(r) => Answer::ValueModP(r),
            CmValue::Zero => Answer::Zero,
            CmValue::Skip => Answer::Skip,
        }),
        ApProvider::Elliptic(e) => {
            let a = if !e.has_good_reduction(p) {
                return Ok(Answer::Skip);
            } else if p <= 3 {
                ap_elliptic_bruteforce(e, p)?
            } else if p < BSGS_THRESHOLD {
                ap_elliptic_naive(e, p)?
            } else {
                ap_elliptic_bsgs(e, p)?
            };
            Ok(Answer::Value(a as i128))
        }
        ApProvider::Delta(t) => Ok(t
            .get_i128(p as usize)
            .map_or(Answer::Missing, Answer::Value)),
        ApProvider::File(t) => Ok(t.get(p).map_or(Answer::Missing, Answer::Value)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Rational;
    use crate::quadfield::make_field;

    #[test]
    fn dispatch() {
        let cm = ApProvider::Cm(
            CMFormSpec::new(make_field(7).unwrap(), 2, Rational::integer(1).unwrap()).unwrap(),
        );
        assert_eq!(provider_ap(&cm, 13), Ok(Answer::Zero));
        assert_eq!(provider_ap(&cm, 7), Ok(Answer::Skip));
        assert!(matches!(provider_ap(&cm, 11), Ok(Answer::ValueModP(_))));

        let x011 = ApProvider::Elliptic("0,-1,1,-10,-20".parse().unwrap());
        assert_eq!(provider_ap(&x011, 11), Ok(Answer::Skip));
        assert_eq!(provider_ap(&x011, 5), Ok(Answer::Value(1)));
        assert_eq!(provider_ap(&x011, 2), Ok(Answer::Value(-2)));
        assert_eq!(
            provider_ap(&x011, 1009).unwrap(),
            Answer::Value(
                ap_elliptic_naive(&"0,-1,1,-10,-20".parse().unwrap(), 1009).unwrap() as i128
            )
        );

        let file = ApProvider::File(Arc::new(parse_ap_table("11\t1\n13\t4\n").unwrap()));
        assert_eq!(provider_ap(&file, 13), Ok(Answer::Value(4)));
        assert_eq!(provider_ap(&file, 17), Ok(Answer::Missing));

        let delta = ApProvider::delta(100).unwrap();
        assert_eq!(provider_ap(&delta, 5), Ok(Answer::Value(4830)));
        assert_eq!(provider_ap(&delta, 101), Ok(Answer::Missing));
    }

    #[test]
    fn answers_mod_p() {
        assert_eq!(Answer::Value(-2).mod_p(5), Some(3));
        assert_eq!(Answer::Zero.mod_p(5), Some(0));
        assert_eq!(Answer::Missing.mod_p(5), None);
    }
}
