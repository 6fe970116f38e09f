use super::{is_prime, PrimeRange};

const SEGMENT: u64 = 1 << 17;

/// Segmented sieve of Eratosthenes. Holds the base primes up to the square
/// root of the largest bound it was built for.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    limit: u64,
    base: Vec<u64>,
}

impl PrimeSieve {
    /// Sieve able to enumerate primes below `hi`.
    pub fn new(hi: u64) -> Self {
        let limit = hi.saturating_sub(1).isqrt() + 1;
        PrimeSieve {
            limit,
            base: simple_sieve(limit),
        }
    }

    /// Base primes up to `sqrt(hi)`.
    pub fn base_primes(&self) -> &[u64] {
        &self.base
    }

    /// Calls `f` on every prime in `range`, ascending.
    pub fn for_each(&self, range: PrimeRange, mut f: impl FnMut(u64)) {
        assert!(
            range.hi().saturating_sub(1).isqrt() < self.limit,
            "sieve built for a smaller bound"
        );
        let mut flags = vec![true; SEGMENT.min(range.len()) as usize];
        let mut lo = range.lo().max(2);
        while lo < range.hi() {
            let hi = (lo + SEGMENT).min(range.hi());
            let len = (hi - lo) as usize;
            flags[..len].fill(true);
            for &p in &self.base {
                if p * p >= hi {
                    break;
                }
                let mut start = lo.div_ceil(p) * p;
                if start < p * p {
                    start = p * p;
                }
                let mut m = start;
                while m < hi {
                    flags[(m - lo) as usize] = false;
                    m += p;
                }
            }
            for (i, &is_p) in flags[..len].iter().enumerate() {
                if is_p {
                    f(lo + i as u64);
                }
            }
            lo = hi;
        }
    }

    pub fn primes(&self, range: PrimeRange) -> Vec<u64> {
        let mut out = Vec::new();
        self.for_each(range, |p| out.push(p));
        out
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize + 1;
    let mut comp = vec![false; n];
    let mut out = Vec::new();
    for i in 2..n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes `p` with `lo <= p < hi`, ascending.
///
/// Narrow windows far above the base-prime table are tested one candidate at
/// a time instead of sieved.
pub fn sieve_range(range: PrimeRange) -> Vec<u64> {
    let root = range.hi().saturating_sub(1).isqrt();
    if range.len().saturating_mul(64) < root {
        return (range.lo()..range.hi()).filter(|&n| is_prime(n)).collect();
    }
    PrimeSieve::new(range.hi()).primes(range)
}
