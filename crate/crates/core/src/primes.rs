//! Deterministic nth-prime generation and the prime-gap diagnostics used by
//! the prime-series irrationality criterion.

use crate::exact::{
    ball_powr, ball_sqrt, cmp_certified, rat_int, BallCmp, BigRat, ExactError, Precision,
    RatBall,
};
use crate::verdict::{AssumedFact, Verdict};
use num_traits::Signed;
use std::sync::RwLock;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PrimesError {
    #[error("prime index must be at least 1 (1-based)")]
    IndexOutOfRange,
    #[error("sieve cap {cap} reached while materializing prime #{requested}")]
    CapExceeded { requested: u64, cap: u64 },
    #[error("bad window: [{0}, {1}]")]
    BadWindow(u64, u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

struct SieveState {
    primes: Vec<u64>,
    /// Exclusive upper bound of the fully sieved range.
    sieved_to: u64,
}

/// Extendable prime table backed by a segmented Eratosthenes sieve.
///
/// Indexing is 1-based (`p(1) = 2`), matching the series-side conventions;
/// a 0-based accessor is provided for parity with formalizations that index
/// sequences from zero. Readers share the table; extension takes the single
/// write lock.
pub struct PrimeCache {
    state: RwLock<SieveState>,
    segment_size: u64,
    value_cap: u64,
}

impl Default for PrimeCache {
    fn default() -> Self {
        Self::new()
    }
}

impl PrimeCache {
    pub fn new() -> Self {
        Self::with_segment_size(1 << 20)
    }

    pub fn with_segment_size(segment_size: u64) -> Self {
        PrimeCache {
            state: RwLock::new(SieveState { primes: Vec::new(), sieved_to: 2 }),
            segment_size: segment_size.max(64),
            value_cap: 1 << 34,
        }
    }

    pub fn with_value_cap(mut self, cap: u64) -> Self {
        self.value_cap = cap;
        self
    }

    /// Number of primes materialized so far.
    pub fn materialized(&self) -> usize {
        self.state.read().unwrap().primes.len()
    }

    /// The n-th prime, 1-based: `nth_prime(1) = 2`.
    pub fn nth_prime(&self, n: u64) -> Result<u64, PrimesError> {
        if n == 0 {
            return Err(PrimesError::IndexOutOfRange);
        }
        {
            let state = self.state.read().unwrap();
            if state.primes.len() as u64 >= n {
                return Ok(state.primes[(n - 1) as usize]);
            }
        }
        let mut state = self.state.write().unwrap();
        while (state.primes.len() as u64) < n {
            if state.sieved_to >= self.value_cap {
                return Err(PrimesError::CapExceeded { requested: n, cap: self.value_cap });
            }
            let target = upper_bound_estimate(n).max(state.sieved_to + self.segment_size);
            let target = target.min(self.value_cap);
            extend(&mut state, target, self.segment_size);
        }
        Ok(state.primes[(n - 1) as usize])
    }

    /// 0-based accessor: `nth_prime0(0) = 2`.
    pub fn nth_prime0(&self, i: u64) -> Result<u64, PrimesError> {
        self.nth_prime(i + 1)
    }

    /// The first `count` primes in order.
    pub fn prefix(&self, count: u64) -> Result<Vec<u64>, PrimesError> {
        if count == 0 {
            return Ok(Vec::new());
        }
        self.nth_prime(count)?;
        let state = self.state.read().unwrap();
        Ok(state.primes[..count as usize].to_vec())
    }

    /// Exact extrema of the consecutive-prime ratio `p(n+1)/p(n)` over
    /// `n` in `[nmin, nmax - 1]`.
    pub fn prime_ratio_window(&self, nmin: u64, nmax: u64) -> Result<RatioStats, PrimesError> {
        if nmin < 1 || nmax < nmin {
            return Err(PrimesError::BadWindow(nmin, nmax));
        }
        if nmax == nmin {
            return Ok(RatioStats { count: 0, max: None, min: None });
        }
        self.nth_prime(nmax)?;
        let state = self.state.read().unwrap();
        let mut max: Option<(u64, BigRat)> = None;
        let mut min: Option<(u64, BigRat)> = None;
        for n in nmin..nmax {
            let r = BigRat::new(
                state.primes[n as usize].into(),
                state.primes[(n - 1) as usize].into(),
            );
            if max.as_ref().map_or(true, |(_, m)| r > *m) {
                max = Some((n, r.clone()));
            }
            if min.as_ref().map_or(true, |(_, m)| r < *m) {
                min = Some((n, r));
            }
        }
        Ok(RatioStats { count: nmax - nmin, max, min })
    }

    /// Certified comparison of `(p(2N) - p(N)) / sqrt(p(N))` against
    /// `N^(1/2 + eps)` at one specific `N`.
    pub fn double_sqrt_check(
        &self,
        n: u64,
        eps: &BigRat,
        prec: &Precision,
    ) -> Result<Verdict, PrimesError> {
        if n < 1 {
            return Err(PrimesError::IndexOutOfRange);
        }
        if !eps.is_positive() {
            return Err(PrimesError::Exact(ExactError::Domain(
                "epsilon must be positive".into(),
            )));
        }
        let pn = self.nth_prime(n)?;
        let p2n = self.nth_prime(2 * n)?;
        let gap = RatBall::point(rat_int((p2n - pn) as i64));
        let sqrt_pn = ball_sqrt(&RatBall::point(rat_int(pn as i64)), prec)?;
        let lhs = gap.div(&sqrt_pn)?;
        let exponent = BigRat::new(1.into(), 2.into()) + eps;
        let rhs = ball_powr(
            &RatBall::point(rat_int(n as i64)),
            &RatBall::point(exponent),
            prec,
        )?;
        let status = match cmp_certified(&lhs, &rhs) {
            BallCmp::Less => Verdict::certified(),
            BallCmp::Greater => Verdict::refuted_at(n as i64),
            BallCmp::Overlap => Verdict::inconclusive(format!(
                "enclosures overlap at N={n}: lhs {lhs}, rhs {rhs}"
            )),
        };
        Ok(status.with_assumed(vec![AssumedFact {
            fact: format!(
                "(p(2N)-p(N))/sqrt(p(N)) < N^(1/2+{}) for all large N",
                crate::exact::rat_str(eps)
            ),
            checked: Some((n as i64, n as i64)),
        }]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioStats {
    /// Number of consecutive pairs inspected.
    pub count: u64,
    /// `(n, p(n+1)/p(n))` attaining the maximum, if any pair exists.
    pub max: Option<(u64, BigRat)>,
    pub min: Option<(u64, BigRat)>,
}

fn upper_bound_estimate(n: u64) -> u64 {
    if n < 6 {
        return 16;
    }
    let nf = n as f64;
    (nf * (nf.ln() + nf.ln().ln()) * 1.2) as u64 + 16
}

fn extend(state: &mut SieveState, new_limit: u64, segment_size: u64) {
    while state.sieved_to < new_limit {
        // Base primes must cover sqrt of the segment end.
        let hi = new_limit
            .min(state.sieved_to + segment_size)
            .min(state.sieved_to.saturating_mul(state.sieved_to).max(4));
        let lo = state.sieved_to;
        let len = (hi - lo) as usize;
        let mut composite = vec![false; len];
        for &p in &state.primes {
            if p.saturating_mul(p) >= hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
            }
            let mut m = start;
            while m < hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            let v = lo + i as u64;
            if !c && v >= 2 {
                state.primes.push(v);
            }
        }
        state.sieved_to = hi;
    }
}

/// Deterministic Miller-Rabin for u64, used by re-check invariants.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
