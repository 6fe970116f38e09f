use ethnum::I256;
use rayon::prelude::*;

use super::SourceError;

/// Largest table length computed unless the caller raises it explicitly.
pub const DEFAULT_TAU_BOUND: usize = 100_000;

/// Ramanujan `tau(n)` for `1 <= n <= len`, stored at index `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauTable {
    values: Vec<I256>,
}

impl TauTable {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `tau(n)`, or `None` past the table.
    pub fn get(&self, n: usize) -> Option<I256> {
        (n >= 1).then(|| self.values.get(n).copied()).flatten()
    }

    pub fn get_i128(&self, n: usize) -> Option<i128> {
        self.get(n).map(|v| v.as_i128())
    }
}

/// Exponents and signs of `prod (1 - q^n) = sum (-1)^k q^{k(3k-1)/2}`
/// up to `q^limit`, over `k = 0, 1, -1, 2, -2, ...`.
fn pentagonal_terms(limit: usize) -> Vec<(usize, bool)> {
    let mut terms = vec![(0, false)];
    for k in 1usize.. {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > limit {
            break;
        }
        let neg = k % 2 == 1;
        terms.push((g1, neg));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= limit {
            terms.push((g2, neg));
        }
    }
    terms
}

/// `tau(1..=n)` from `Delta = q * prod (1 - q^m)^24`, refusing `n` above
/// [`DEFAULT_TAU_BOUND`].
pub fn tau_series(n: usize) -> Result<TauTable, SourceError> {
    tau_series_bounded(n, DEFAULT_TAU_BOUND)
}

/// As [`tau_series`] with an explicit bound.
pub fn tau_series_bounded(n: usize, bound: usize) -> Result<TauTable, SourceError> {
    if n > bound {
        return Err(SourceError::BoundExceeded { n, bound });
    }
    // coefficient of q^j in prod(1 - q^m)^24 lands at tau(j + 1)
    let limit = n.saturating_sub(1);
    let terms = pentagonal_terms(limit);
    let mut acc = vec![I256::ZERO; limit + 1];
    acc[0] = I256::ONE;
    for _ in 0..24 {
        acc = (0..=limit)
            .into_par_iter()
            .map(|j| {
                let mut s = I256::ZERO;
                for &(g, neg) in &terms {
                    if g > j {
                        break;
                    }
                    if neg {
                        s -= acc[j - g];
                    } else {
                        s += acc[j - g];
                    }
                }
                s
            })
            .collect();
    }
    let mut values = Vec::with_capacity(n + 1);
    values.push(I256::ZERO);
    if n > 0 {
        values.extend(acc);
    }
    Ok(TauTable { values })
}
