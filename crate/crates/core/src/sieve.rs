//! Primes, exact prime products and the segmented rough-number sieve.
//!
//! A segment `(lo, hi]` is a bitset whose bit `i` stands for `n = lo + 1 + i`;
//! the bit is set iff no prime `p <= y` divides `n`. Only the sieving primes
//! are used; nobody factors `n`.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::{product_tree_u64, reduce_known_den, to_f64, ExactRational};

/// Default cap on `y` for prime tables.
pub const DEFAULT_Y_CAP: u64 = 100_000_000;

/// Default working length of one sieve segment (integers, not bytes).
pub const DEFAULT_SEGMENT_LEN: u64 = 1 << 22;

/// Largest segment [`rough_segment`] will materialize in one piece.
pub const DEFAULT_SEGMENT_BUDGET: u64 = 1 << 30;

/// Ascending list of all primes `<= y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    y: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn y(&self) -> u64 {
        self.y
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `pi(y)`.
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Primes in `(2, y]`.
    pub fn odd_primes(&self) -> &[u64] {
        match self.primes.first() {
            Some(2) => &self.primes[1..],
            _ => &self.primes,
        }
    }

    /// Primes `<= bound`, a prefix of the table.
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let k = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..k]
    }

    /// Number of primes `<= bound` (bound may exceed `y`, in which case the
    /// answer is capped at `pi(y)`).
    pub fn pi(&self, bound: u64) -> usize {
        self.primes.partition_point(|&p| p <= bound)
    }

    /// Table for a larger `y`; existing entries are kept as they are.
    pub fn extend_to(&self, y: u64) -> PrimeTable {
        if y <= self.y {
            return self.clone();
        }
        let mut primes = self.primes.clone();
        primes.extend(primes_up_to(y).primes.into_iter().filter(|&p| p > self.y));
        PrimeTable { y, primes }
    }
}

/// Odd-only sieve of Eratosthenes.
pub fn primes_up_to(y: u64) -> PrimeTable {
    if y < 2 {
        return PrimeTable { y, primes: Vec::new() };
    }
    // index i <-> 2i + 1
    let half = (y as usize - 1) / 2 + 1;
    let mut composite = vec![0u64; half.div_ceil(64)];
    let mut i = 1usize;
    while (2 * i + 1) * (2 * i + 1) <= y as usize {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let p = 2 * i + 1;
            let mut j = (p * p) / 2;
            while j < half {
                composite[j / 64] |= 1 << (j % 64);
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(y));
    primes.push(2);
    for i in 1..half {
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            primes.push(2 * i as u64 + 1);
        }
    }
    PrimeTable { y, primes }
}

/// Like [`primes_up_to`] but refuses `y` above `cap`.
pub fn checked_primes_up_to(y: u64, cap: u64) -> Result<PrimeTable> {
    if y > cap {
        return Err(Error::PrimeCapExceeded { y, cap });
    }
    Ok(primes_up_to(y))
}

fn estimate_pi(y: u64) -> usize {
    if y < 17 {
        return 8;
    }
    let l = (y as f64).ln();
    (1.26 * y as f64 / l) as usize
}

/// `q_y`, the product of all primes `<= y`.
pub fn primorial(y: u64) -> BigUint {
    product_tree_u64(primes_up_to(y).primes())
}

/// `Pi_y = prod_{p <= y} (1 - 1/p)` together with its `f64` mirror.
#[derive(Debug, Clone, PartialEq)]
pub struct MertensProduct {
    pub exact: ExactRational,
    pub float: f64,
}

pub fn mertens_product(y: u64) -> MertensProduct {
    mertens_product_of(&primes_up_to(y))
}

pub fn mertens_product_of(table: &PrimeTable) -> MertensProduct {
    let num: Vec<u64> = table.primes().iter().map(|p| p - 1).collect();
    let den: Vec<(u64, u32)> = table.primes().iter().map(|&p| (p, 1)).collect();
    let exact = reduce_known_den(BigInt::from(product_tree_u64(&num)), &den);
    let float = to_f64(&exact);
    MertensProduct { exact, float }
}

/// Membership bitset for `alpha_y` over `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoughSegment {
    lo: u64,
    hi: u64,
    words: Vec<u64>,
}

impl RoughSegment {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `alpha_y(n)` for `n` in `(lo, hi]`.
    pub fn contains(&self, n: u64) -> bool {
        assert!(n > self.lo && n <= self.hi, "{n} outside ({}, {}]", self.lo, self.hi);
        let i = (n - self.lo - 1) as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Bit at index `i`, i.e. `alpha_y(lo + 1 + i)`.
    #[inline]
    pub fn bit(&self, i: usize) -> u64 {
        self.words[i / 64] >> (i % 64) & 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The rough integers in the segment, ascending.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let lo = self.lo;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(lo + 1 + 64 * w as u64 + b)
            })
        })
    }

    /// 64 consecutive bits starting at bit index `start`; bits past the end
    /// of the segment read as zero.
    #[inline]
    pub fn window64(&self, start: usize) -> u64 {
        let w = start / 64;
        let s = start % 64;
        let lo = self.words.get(w).copied().unwrap_or(0);
        if s == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> s) | (hi << (64 - s))
        }
    }
}

/// Reusable sieve for a fixed `y`. Immutable once built, so one instance can
/// be shared by every worker.
#[derive(Debug, Clone)]
pub struct RoughSieve {
    table: PrimeTable,
    /// For each prime below 64, the word masks of bits `b` with `b = c mod p`.
    small: Vec<(u64, Vec<u64>)>,
    large_start: usize,
}

impl RoughSieve {
    pub fn new(y: u64) -> Self {
        Self::from_table(primes_up_to(y))
    }

    pub fn from_table(table: PrimeTable) -> Self {
        let large_start = table.pi(63);
        let small = table.primes()[..large_start]
            .iter()
            .map(|&p| {
                let masks = (0..p)
                    .map(|c| {
                        (0..64u64)
                            .filter(|b| b % p == c)
                            .fold(0u64, |m, b| m | 1 << b)
                    })
                    .collect();
                (p, masks)
            })
            .collect();
        RoughSieve { table, small, large_start }
    }

    pub fn table(&self) -> &PrimeTable {
        &self.table
    }

    pub fn y(&self) -> u64 {
        self.table.y()
    }

    /// Sieves `(lo, lo + len]` into `words` (resized as needed).
    pub fn fill(&self, lo: u64, len: u64, words: &mut Vec<u64>) {
        let nwords = len.div_ceil(64) as usize;
        words.clear();
        words.resize(nwords, u64::MAX);
        if len % 64 != 0 {
            words[nwords - 1] = (1u64 << (len % 64)) - 1;
        }
        if len == 0 {
            return;
        }
        let first = lo + 1;
        for (p, masks) in &self.small {
            let p = *p;
            // bit i is a multiple of p iff i = r0 (mod p)
            let r0 = (p - first % p) % p;
            let step = 64 % p;
            let mut class = r0;
            for w in words.iter_mut() {
                *w &= !masks[class as usize];
                class = (class + p - step) % p;
            }
        }
        for &p in &self.table.primes()[self.large_start..] {
            let mut i = (p - first % p) % p;
            while i < len {
                words[(i / 64) as usize] &= !(1u64 << (i % 64));
                i += p;
            }
        }
    }

    /// `alpha_y` over `(lo, hi]`, refusing segments longer than `budget`.
    pub fn segment_with_budget(&self, lo: u64, hi: u64, budget: u64) -> Result<RoughSegment> {
        if hi < lo {
            return Err(Error::InvalidInput(format!("segment ({lo}, {hi}] has hi < lo")));
        }
        let len = hi - lo;
        if len > budget {
            return Err(Error::SegmentTooLarge { lo, hi, len, budget });
        }
        let mut words = Vec::new();
        self.fill(lo, len, &mut words);
        Ok(RoughSegment { lo, hi, words })
    }

    pub fn segment(&self, lo: u64, hi: u64) -> Result<RoughSegment> {
        self.segment_with_budget(lo, hi, DEFAULT_SEGMENT_BUDGET)
    }

    /// `#{n in (lo, hi] : alpha_y(n) = 1}`, sieved in bounded chunks.
    pub fn count(&self, lo: u64, hi: u64) -> u64 {
        let mut words = Vec::new();
        let mut total = 0;
        let mut a = lo;
        while a < hi {
            let len = (hi - a).min(DEFAULT_SEGMENT_LEN);
            self.fill(a, len, &mut words);
            total += words.iter().map(|w| w.count_ones() as u64).sum::<u64>();
            a += len;
        }
        total
    }
}

/// `alpha_y` over `(lo, hi]`.
pub fn rough_segment(lo: u64, hi: u64, y: u64) -> Result<RoughSegment> {
    RoughSieve::new(y).segment(lo, hi)
}

/// Number of distinct residues of `offsets` modulo `p`.
pub fn nu_p(offsets: &[u64], p: u64) -> usize {
    let mut seen: Vec<u64> = offsets.iter().map(|h| h % p).collect();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Product of all primes in `(y1, y2]`, used to check primorial ratios.
pub fn prime_product_between(y1: u64, y2: u64) -> BigUint {
    let t = primes_up_to(y2);
    t.primes()
        .iter()
        .filter(|&&p| p > y1)
        .fold(BigUint::one(), |acc, &p| acc * p)
}
