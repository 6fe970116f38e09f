//! Empirical densities of `m`-th power residues among `a_p`, with
//! Chebotarev-style prime filters and closed-form predictions for CM forms.

mod filter;
mod predict;

use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ap_sources::{provider_ap, ApProvider, SourceError};
use crate::arith::{mod_pow, ArithError, PrimeRange, PrimeSieve};
use crate::cmforms::CmError;
use crate::residue::ResidueError;

pub use filter::{cubic_discriminant, cubic_root_count, filter_pass, CebotarevFilter};
pub use predict::{
    crosscheck_cm, predict_delta, predict_symbol_cube, predict_symbol_sqr, CrossCheck,
    DeltaPrediction, PredictionSource,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DensityError {
    #[error("order m = {0} must be at least 2")]
    InvalidOrder(u64),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("no density theorem covers m = {m} for {spec}; conjecturally 1/{m}")]
    Unsupported { m: u64, spec: String },
    #[error("{0}")]
    NotApplicable(String),
    #[error(transparent)]
    Source(#[from] SourceError),
    #[error(transparent)]
    Cm(#[from] CmError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Integers per parallel shard.
pub const SHARD: u64 = 1 << 16;

/// Counts behind `delta_m(f; P1, P2)` for one `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub provider: String,
    pub m: u64,
    pub range: PrimeRange,
    pub filter: String,
    /// `p = 1 (mod m)` in the filtered set with `a_p` a nonzero `m`-th power.
    pub numerator: u64,
    /// `p = 1 (mod m)` in the filtered set with `a_p` nonzero mod `p`.
    pub denominator: u64,
    /// Primes where the provider had no value (bad reduction, missing data).
    pub skipped: u64,
}

impl DensityReport {
    fn empty(provider: &ApProvider, m: u64, range: PrimeRange, filter: &CebotarevFilter) -> Self {
        DensityReport {
            provider: provider.to_string(),
            m,
            range,
            filter: filter.to_string(),
            numerator: 0,
            denominator: 0,
            skipped: 0,
        }
    }

    pub fn empty_denominator(&self) -> bool {
        self.denominator == 0
    }

    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.denominator > 0).then(|| Ratio::new(self.numerator, self.denominator))
    }

    pub fn ratio_f64(&self) -> Option<f64> {
        (self.denominator > 0).then(|| self.numerator as f64 / self.denominator as f64)
    }

    /// Ratio to four places, or `-` when the denominator is empty.
    pub fn ratio_display(&self) -> String {
        self.ratio_f64()
            .map_or_else(|| "-".to_string(), |r| format!("{r:.4}"))
    }

    /// Adds the counts of a report over an adjacent range.
    pub fn merge(&mut self, other: &DensityReport) {
        assert_eq!(self.m, other.m, "merging reports for different m");
        self.numerator += other.numerator;
        self.denominator += other.denominator;
        self.skipped += other.skipped;
        self.range = PrimeRange::new(
            self.range.lo().min(other.range.lo()),
            self.range.hi().max(other.range.hi()),
        )
        .expect("union of valid ranges");
    }

    pub const CSV_HEADER: &'static str = "m,P1,P2,numerator,denominator,ratio,predicted,source";

    /// CSV row; `prediction` fills the last two columns.
    pub fn csv_row(&self, prediction: Option<&DeltaPrediction>) -> String {
        let (pred, src) = match prediction {
            Some(p) => (format!("{:.4}", p.value_f64()), p.source.to_string()),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.m,
            self.range.lo(),
            self.range.hi(),
            self.numerator,
            self.denominator,
            self.ratio_display(),
            pred,
            src
        )
    }
}

impl fmt::Display for DensityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "m={} {} {}/{} {}",
            self.m,
            self.range,
            self.numerator,
            self.denominator,
            self.ratio_display()
        )
    }
}

/// `delta_m` over `range` for a single `m`.
pub fn estimate_delta(
    provider: &ApProvider,
    m: u64,
    range: PrimeRange,
    filter: &CebotarevFilter,
) -> Result<DensityReport, DensityError> {
    Ok(estimate_many(provider, &[m], range, filter)?
        .pop()
        .expect("one report per m"))
}

/// One report per entry of `ms`, evaluating each `a_p` once.
///
/// Shards are summed in range order, so the result does not depend on how
/// rayon schedules them.
pub fn estimate_many(
    provider: &ApProvider,
    ms: &[u64],
    range: PrimeRange,
    filter: &CebotarevFilter,
) -> Result<Vec<DensityReport>, DensityError> {
    if let Some(&m) = ms.iter().find(|&&m| m < 2) {
        return Err(DensityError::InvalidOrder(m));
    }
    let sieve = PrimeSieve::new(range.hi());
    let shards: Vec<Vec<DensityReport>> = range
        .blocks(SHARD)
        .into_par_iter()
        .map(|block| shard(provider, ms, block, filter, &sieve))
        .collect::<Result<_, _>>()?;
    let mut total: Vec<DensityReport> = ms
        .iter()
        .map(|&m| DensityReport::empty(provider, m, range, filter))
        .collect();
    for part in &shards {
        for (t, s) in total.iter_mut().zip(part) {
            t.merge(s);
        }
    }
    Ok(total)
}

fn shard(
    provider: &ApProvider,
    ms: &[u64],
    block: PrimeRange,
    filter: &CebotarevFilter,
    sieve: &PrimeSieve,
) -> Result<Vec<DensityReport>, DensityError> {
    let mut out: Vec<DensityReport> = ms
        .iter()
        .map(|&m| DensityReport::empty(provider, m, block, filter))
        .collect();
    let mut err = None;
    sieve.for_each(block, |p| {
        if err.is_some() || !ms.iter().any(|&m| p % m == 1) || !filter_pass(filter, p) {
            return;
        }
        let answer = match provider_ap(provider, p) {
            Ok(a) => a,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let r = answer.mod_p(p);
        for rep in out.iter_mut().filter(|rep| p % rep.m == 1) {
            match r {
                None => rep.skipped += 1,
                Some(0) => {}
                Some(r) => {
                    rep.denominator += 1;
                    if mod_pow(r, (p - 1) / rep.m, p) == 1 {
                        rep.numerator += 1;
                    }
                }
            }
        }
    });
    match err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap_sources::EllipticCurve;
    use crate::arith::Rational;
    use crate::cmforms::CMFormSpec;
    use crate::quadfield::make_field;
    use proptest::prelude::*;

    fn cm(d: u64, k: u64, alpha: i64) -> ApProvider {
        ApProvider::Cm(
            CMFormSpec::new(make_field(d).unwrap(), k, Rational::integer(alpha).unwrap()).unwrap(),
        )
    }

    fn x011() -> ApProvider {
        ApProvider::Elliptic("0,-1,1,-10,-20".parse::<EllipticCurve>().unwrap())
    }

    #[test]
    fn empty_denominator_is_flagged() {
        let r = estimate_delta(
            &x011(),
            2,
            PrimeRange::new(24, 29).unwrap(),
            &CebotarevFilter::All,
        )
        .unwrap();
        assert!(r.empty_denominator());
        assert_eq!(r.ratio(), None);
        assert_eq!(r.ratio_display(), "-");
        assert_eq!(
            estimate_delta(
                &x011(),
                1,
                PrimeRange::new(5, 10).unwrap(),
                &CebotarevFilter::All
            ),
            Err(DensityError::InvalidOrder(1))
        );
    }

    #[test]
    fn counts_by_hand() {
        let r = estimate_delta(
            &x011(),
            2,
            PrimeRange::new(3, 32).unwrap(),
            &CebotarevFilter::All,
        )
        .unwrap();
        let mut num = 0;
        let mut den = 0;
        let e: EllipticCurve = "0,-1,1,-10,-20".parse().unwrap();
        for p in [3u64, 5, 7, 13, 17, 19, 23, 29, 31] {
            let a = crate::ap_sources::ap_elliptic_bruteforce(&e, p).unwrap();
            if a.rem_euclid(p as i64) != 0 {
                den += 1;
                if crate::arith::jacobi(a, p) == 1 {
                    num += 1;
                }
            }
        }
        assert_eq!((r.numerator, r.denominator, r.skipped), (num, den, 1));
    }

    #[test]
    fn estimate_many_matches_single_runs() {
        let range = PrimeRange::new(5, 300_000).unwrap();
        let p = cm(7, 2, 1);
        let many = estimate_many(&p, &[2, 3, 4], range, &CebotarevFilter::All).unwrap();
        for rep in many {
            assert_eq!(
                rep,
                estimate_delta(&p, rep.m, range, &CebotarevFilter::All).unwrap()
            );
        }
    }

    #[test]
    fn csv_and_json() {
        let r = estimate_delta(
            &cm(7, 2, 1),
            2,
            PrimeRange::new(5, 10_000).unwrap(),
            &CebotarevFilter::All,
        )
        .unwrap();
        let row = r.csv_row(None);
        assert!(row.starts_with("2,5,10000,"));
        assert_eq!(
            row.split(',').count(),
            DensityReport::CSV_HEADER.split(',').count()
        );
        let back: DensityReport =
            serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn shard_invariance(a in 5u64..50_000, split in 1u64..100_000, width in 1u64..150_000, m in 2u64..7) {
            let b = a + split;
            let c = b + width;
            let f = CebotarevFilter::congruence(5, [1, 4]).unwrap();
            let p = cm(7, 2, 3);
            let whole = estimate_delta(&p, m, PrimeRange::new(a, c).unwrap(), &f).unwrap();
            let mut left = estimate_delta(&p, m, PrimeRange::new(a, b).unwrap(), &f).unwrap();
            left.merge(&estimate_delta(&p, m, PrimeRange::new(b, c).unwrap(), &f).unwrap());
            prop_assert_eq!(whole, left);
        }
    }
}
