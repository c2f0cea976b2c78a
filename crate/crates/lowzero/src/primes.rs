//! Prime enumeration by segmented sieve of Eratosthenes.
//!
//! All exponential and density sums in this crate are indexed by primes
//! `p <= x`, optionally restricted to a residue class a mod c. Segments are
//! cache-resident blocks (default 2^20 entries) so enumeration scales to
//! x = 1e9 without materializing bit arrays of that size; consumers stream
//! primes through a callback and never hold full lists unless they ask to.

/// Default sieve block length.
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

/// A range of primes p <= limit, enumerated in increasing order.
#[derive(Debug, Clone)]
pub struct PrimeRange {
    limit: u64,
    segment_size: usize,
}

/// Congruence condition n = residue (mod modulus).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueFilter {
    pub modulus: u64,
    pub residue: u64,
}

impl ResidueFilter {
    pub fn new(modulus: u64, residue: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        assert!(residue < modulus, "residue must lie in [0, modulus)");
        ResidueFilter { modulus, residue }
    }

    #[inline]
    pub fn accepts(&self, n: u64) -> bool {
        n % self.modulus == self.residue
    }

    /// gcd(residue, modulus) = 1; such classes contain infinitely many primes.
    pub fn is_primitive(&self) -> bool {
        gcd(self.residue, self.modulus) == 1
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl PrimeRange {
    pub fn new(limit: u64) -> Self {
        PrimeRange {
            limit,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }

    pub fn with_segment_size(limit: u64, segment_size: usize) -> Self {
        assert!(segment_size >= 64, "segment size too small");
        PrimeRange {
            limit,
            segment_size,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Segment boundaries [lo, hi) covering [2, limit]; fixed by limit and
    /// segment_size alone, so parallel consumers can treat each segment as an
    /// independent unit and merge results in segment order.
    pub fn segments(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        if self.limit < 2 {
            return out;
        }
        let mut lo = 2u64;
        while lo <= self.limit {
            let hi = lo
                .saturating_add(self.segment_size as u64)
                .min(self.limit + 1);
            out.push((lo, hi));
            lo = hi;
        }
        out
    }

    /// Stream every prime p <= limit in increasing order.
    pub fn for_each<F: FnMut(u64)>(&self, mut f: F) {
        let base = base_primes(self.limit);
        for (lo, hi) in self.segments() {
            sieve_segment(&base, lo, hi, |p| f(p));
        }
    }

    /// Stream the primes of one segment [lo, hi); `base` must come from
    /// [`base_primes`] for the full limit.
    pub fn for_each_in_segment<F: FnMut(u64)>(base: &[u64], lo: u64, hi: u64, f: F) {
        sieve_segment(base, lo, hi, f);
    }

    pub fn collect(&self) -> Vec<u64> {
        let mut v = Vec::new();
        self.for_each(|p| v.push(p));
        v
    }
}

/// Odd primes up to sqrt(limit) plus 2, by a simple sieve. These seed the
/// segmented passes.
pub fn base_primes(limit: u64) -> Vec<u64> {
    let root = (limit as f64).sqrt() as u64 + 2;
    let root = root.min(limit.max(2));
    let n = root as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn sieve_segment<F: FnMut(u64)>(base: &[u64], lo: u64, hi: u64, mut f: F) {
    debug_assert!(lo >= 2 && hi > lo);
    let len = (hi - lo) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let mut start = p.max(lo.div_ceil(p)) * p;
        if start < p * p {
            start = p * p;
        }
        let mut j = start;
        while j < hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    for i in 0..len {
        if !composite[i] {
            let n = lo + i as u64;
            // base primes below sqrt(hi) mark all composites; n >= 2 is prime
            f(n);
        }
    }
}

/// All primes p <= x, increasing. Empty for x < 2.
pub fn primes_up_to(x: u64) -> Vec<u64> {
    PrimeRange::new(x).collect()
}

/// All primes p <= x with p = a (mod c), increasing.
pub fn primes_in_class(x: u64, filter: &ResidueFilter) -> Vec<u64> {
    let mut v = Vec::new();
    PrimeRange::new(x).for_each(|p| {
        if filter.accepts(p) {
            v.push(p);
        }
    });
    v
}

/// pi(x), by enumeration.
pub fn prime_count(x: u64) -> u64 {
    let mut n = 0u64;
    PrimeRange::new(x).for_each(|_| n += 1);
    n
}
