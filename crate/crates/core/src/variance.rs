//! Brute-force ground truth: `V(X, H, y)` by sieving, `V_q(H)` over
//! `Z/qZ`, correlation sums of `alpha_y`, and the mean identity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::main_term::squarefree_factors;
use crate::rational::{rat_int, to_f64, ExactRational};
use crate::sieve::{mertens_product_of, nu_p, primes_up_to, RoughSieve, DEFAULT_SEGMENT_LEN};

/// Largest `X + H` the variance engine will sieve up to.
pub const VARIANCE_REACH_CAP: u64 = 1 << 40;
/// Largest modulus for [`variance_mod_q`].
pub const MODULUS_CAP: u64 = 100_000_000;
/// Largest window accepted, so window sums fit comfortably in machine words.
pub const MAX_H: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceResult {
    pub x: u64,
    pub h: u64,
    pub y: u64,
    /// `sum_{n < X} S_n`, `S_n` the number of rough integers in `(n, n + H]`.
    pub s1: u128,
    /// `sum_{n < X} S_n^2`.
    pub s2: u128,
    pub variance: ExactRational,
    pub variance_float: f64,
}

/// Moments over one block `[a, b)` of window positions.
fn block_moments(sieve: &RoughSieve, h: u64, a: u64, b: u64) -> (u128, u128) {
    let len = b - a;
    let mut trailing = Vec::new();
    let mut leading = Vec::new();
    sieve.fill(a, len, &mut trailing);
    sieve.fill(a + h, len, &mut leading);
    let mut s = sieve.count(a, a + h);
    let (mut s1, mut s2) = (0u128, 0u128);
    for (wi, (&lw, &tw)) in leading.iter().zip(&trailing).enumerate() {
        let bits = (len - 64 * wi as u64).min(64);
        if lw == tw {
            // Leaving and entering bits coincide: S is constant across the word.
            s1 += bits as u128 * s as u128;
            s2 += bits as u128 * (s as u128 * s as u128);
            continue;
        }
        for k in 0..bits {
            s1 += s as u128;
            s2 += s as u128 * s as u128;
            s = s + (lw >> k & 1) - (tw >> k & 1);
        }
    }
    (s1, s2)
}

/// `(S1, S2)` for `n = 0..X-1`, computed on `threads` workers (0 = all
/// available). The merge is integer addition, so the result does not depend
/// on the thread count.
pub fn window_moments(x: u64, h: u64, sieve: &RoughSieve, threads: usize) -> Result<(u128, u128)> {
    let workers = if threads == 0 { rayon::current_num_threads() } else { threads };
    let block = (x.div_ceil(4 * workers as u64)).clamp(1 << 12, DEFAULT_SEGMENT_LEN);
    let blocks: Vec<(u64, u64)> = (0..x.div_ceil(block)).map(|i| (i * block, ((i + 1) * block).min(x))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let parts: Vec<(u128, u128)> =
        pool.install(|| blocks.par_iter().map(|&(a, b)| block_moments(sieve, h, a, b)).collect());
    Ok(parts.into_iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d)))
}

fn check_variance_inputs(x: u64, h: u64, y: u64) -> Result<()> {
    if x == 0 || h == 0 {
        return Err(Error::InvalidInput(format!("X and H must be positive, got X = {x}, H = {h}")));
    }
    if y < 2 {
        return Err(Error::InvalidInput(format!("y must be at least 2, got {y}")));
    }
    if h > MAX_H {
        return Err(Error::InvalidInput(format!("H = {h} exceeds {MAX_H}")));
    }
    let reach = x.saturating_add(h);
    if reach > VARIANCE_REACH_CAP {
        return Err(Error::SegmentTooLarge { lo: 0, hi: reach, len: reach, budget: VARIANCE_REACH_CAP });
    }
    if y > crate::sieve::DEFAULT_Y_CAP {
        return Err(Error::PrimeCapExceeded { y, cap: crate::sieve::DEFAULT_Y_CAP });
    }
    Ok(())
}

/// Exact discrete variance `(1/X) sum_{n < X} (S_n - H Pi_y)^2`.
pub fn variance_exact(x: u64, h: u64, y: u64) -> Result<VarianceResult> {
    variance_exact_threads(x, h, y, 1)
}

pub fn variance_exact_threads(x: u64, h: u64, y: u64, threads: usize) -> Result<VarianceResult> {
    check_variance_inputs(x, h, y)?;
    let sieve = RoughSieve::new(y);
    let (s1, s2) = window_moments(x, h, &sieve, threads)?;
    let pi = mertens_product_of(sieve.table()).exact;
    let variance = assemble_variance(x, h, s1, s2, &pi);
    let variance_float = to_f64(&variance);
    Ok(VarianceResult { x, h, y, s1, s2, variance, variance_float })
}

/// `S2/X - 2 H Pi S1/X + H^2 Pi^2`.
pub fn assemble_variance(x: u64, h: u64, s1: u128, s2: u128, pi: &ExactRational) -> ExactRational {
    let xr = rat_int(x);
    let hp = rat_int(h) * pi;
    rat_int(s2) / &xr - rat_int(2) * &hp * rat_int(s1) / &xr + &hp * &hp
}

/// Coprimality bitmap of `Z/qZ`.
struct Totatives {
    q: u64,
    words: Vec<u64>,
}

impl Totatives {
    fn new(q: u64, primes: &[u64]) -> Self {
        let mut words = vec![u64::MAX; q.div_ceil(64) as usize];
        for &p in primes {
            let mut i = 0;
            while i < q {
                words[(i / 64) as usize] &= !(1u64 << (i % 64));
                i += p;
            }
        }
        Totatives { q, words }
    }

    #[inline]
    fn get(&self, i: u64) -> u64 {
        let i = i % self.q;
        self.words[(i / 64) as usize] >> (i % 64) & 1
    }
}

/// `V_q(H) = (1/q) sum_{i mod q} (#{1 <= n <= H : (n + i, q) = 1} - H phi(q)/q)^2`.
pub fn variance_mod_q(q: u64, h: u64) -> Result<ExactRational> {
    if q > MODULUS_CAP {
        return Err(Error::ModulusTooLarge { q, cap: MODULUS_CAP });
    }
    let primes = squarefree_factors(q)?;
    if q == 1 {
        return Ok(ExactRational::zero());
    }
    let phi: u64 = primes.iter().map(|p| p - 1).product();
    let tot = Totatives::new(q, &primes);
    let full = (h / q) as u128 * phi as u128;
    let rest = h % q;
    // count for i = 0: residues 1..=rest
    let mut c = full + (1..=rest).map(|j| tot.get(j) as u128).sum::<u128>();
    let mut sum_sq = 0u128;
    for i in 0..q {
        sum_sq += c * c;
        c = c + tot.get(i + rest + 1) as u128 - tot.get(i + 1) as u128;
    }
    // sum c_i = H phi, so V = (q sum c^2 - (H phi)^2) / q^2
    let hp = BigInt::from(h) * BigInt::from(phi);
    let qb = BigInt::from(q);
    let num = &qb * BigInt::from(sum_sq) - &hp * &hp;
    Ok(BigRational::new(num, &qb * &qb))
}

/// Largest number of offsets in a correlation sum.
pub const MAX_OFFSETS: usize = 4;

fn check_offsets(offsets: &[u64]) -> Result<()> {
    if offsets.is_empty() || offsets.len() > MAX_OFFSETS {
        return Err(Error::InvalidInput(format!("need 1 to {MAX_OFFSETS} offsets, got {}", offsets.len())));
    }
    let mut s = offsets.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != offsets.len() {
        return Err(Error::InvalidInput("offsets must be distinct".into()));
    }
    Ok(())
}

/// `sum_{n in (lo, lo + X]} prod_i alpha_y(n + h_i)`.
pub fn correlation_sum(lo: u64, x: u64, offsets: &[u64], y: u64) -> Result<u64> {
    check_offsets(offsets)?;
    let sieve = RoughSieve::new(y);
    let maxh = *offsets.iter().max().unwrap();
    let mut total = 0u64;
    let mut a = lo;
    let end = lo + x;
    while a < end {
        let len = (end - a).min(DEFAULT_SEGMENT_LEN);
        let seg = sieve.segment(a, a + len + maxh)?;
        let words = len.div_ceil(64) as usize;
        for w in 0..words {
            let mut acc = u64::MAX;
            for &hh in offsets {
                acc &= seg.window64(64 * w + hh as usize);
            }
            let bits = (len - 64 * w as u64).min(64);
            if bits < 64 {
                acc &= (1u64 << bits) - 1;
            }
            total += acc.count_ones() as u64;
        }
        a += len;
    }
    Ok(total)
}

/// `prod_{p <= y} (1 - nu_p(h)/p)`.
pub fn singular_product(offsets: &[u64], y: u64) -> Result<ExactRational> {
    check_offsets(offsets)?;
    let table = primes_up_to(y);
    let mut acc = ExactRational::one();
    for &p in table.primes() {
        let nu = nu_p(offsets, p) as i64;
        acc *= BigRational::new(BigInt::from(p as i64 - nu), BigInt::from(p));
    }
    Ok(acc)
}

/// Both sides of the mean identity
/// `(1/X) sum_{n<X} S_n = (H/X) sum_{n<=X} a(n) - (1/X) sum_{j<=H} a(j)(H-j)
///  + (1/X) sum_{X<j<=X+H} a(j)(X+H-j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanIdentity {
    pub lhs: ExactRational,
    pub rhs: ExactRational,
    pub residual: ExactRational,
}

pub fn mean_identity_check(x: u64, h: u64, y: u64) -> Result<MeanIdentity> {
    check_variance_inputs(x, h, y)?;
    let sieve = RoughSieve::new(y);
    let (s1, _) = window_moments(x, h, &sieve, 1)?;
    // Right-hand side straight from the indicator, one pass over (0, X+H].
    let mut count_x = 0i128;
    let mut head = 0i128;
    let mut tail = 0i128;
    let mut words = Vec::new();
    let mut a = 0u64;
    let reach = x + h;
    while a < reach {
        let len = (reach - a).min(DEFAULT_SEGMENT_LEN);
        sieve.fill(a, len, &mut words);
        for (wi, &word) in words.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let j = a + 1 + 64 * wi as u64 + bits.trailing_zeros() as u64;
                bits &= bits - 1;
                if j <= x {
                    count_x += 1;
                }
                if j <= h {
                    head += (h - j) as i128;
                }
                if j > x {
                    tail += (x + h - j) as i128;
                }
            }
        }
        a += len;
    }
    let xr = rat_int(x);
    let lhs = rat_int(s1) / &xr;
    let rhs = (rat_int(h as i128 * count_x) - rat_int(head) + rat_int(tail)) / &xr;
    let residual = &lhs - &rhs;
    Ok(MeanIdentity { lhs, rhs, residual })
}
