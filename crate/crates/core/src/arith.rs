//! The multiplicative functions `g_y`, `f_y`, `beta_y` and the finite Euler
//! products built from them.
//!
//! `g_y` lives on odd squarefree `y`-friable integers with `g_y(p) = p/(p-2)`;
//! its support is the divisor lattice of the odd part of the primorial.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{product_tree_u64, reduce_known_den, ExactRational};
use crate::sieve::{primes_up_to, PrimeTable};

/// Most odd primes for which the full support (`2^k` entries) may be walked.
pub const SUPPORT_CAP_LOG2: usize = 24;

/// An odd squarefree `y`-friable `n` with its weight `g_y(n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEntry {
    pub n: u128,
    pub weight: ExactRational,
}

/// Prime factorization of `n` restricted to the table, plus the unfactored
/// cofactor.
fn split(n: u64, table: &PrimeTable) -> (Vec<(u64, u32)>, u64) {
    let mut rest = n;
    let mut out = Vec::new();
    for &p in table.primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if rest > 1 && rest <= table.y() {
        out.push((rest, 1));
        rest = 1;
    }
    (out, rest)
}

pub fn g_y(n: u64, y: u64) -> ExactRational {
    g_y_with(n, &primes_up_to(y))
}

pub fn g_y_with(n: u64, table: &PrimeTable) -> ExactRational {
    assert!(n >= 1);
    let (fs, rest) = split(n, table);
    if rest != 1 || fs.iter().any(|&(p, e)| p == 2 || e > 1) {
        return ExactRational::zero();
    }
    let num: Vec<u64> = fs.iter().map(|&(p, _)| p).collect();
    let den: Vec<u64> = fs.iter().map(|&(p, _)| p - 2).collect();
    BigRational::new(product_tree_u64(&num).into(), product_tree_u64(&den).into())
}

pub fn f_y(k: u64, y: u64) -> ExactRational {
    f_y_with(k, &primes_up_to(y))
}

pub fn f_y_with(k: u64, table: &PrimeTable) -> ExactRational {
    assert!(k >= 1);
    let (fs, _) = split(k, table);
    let odd: Vec<u64> = fs.iter().map(|&(p, _)| p).filter(|&p| p > 2).collect();
    let num: Vec<u64> = odd.iter().map(|p| p - 1).collect();
    let den: Vec<u64> = odd.iter().map(|p| p - 2).collect();
    BigRational::new(product_tree_u64(&num).into(), product_tree_u64(&den).into())
}

/// `mu(n)` on `y`-friable `n`, zero elsewhere.
pub fn beta_y(n: u64, y: u64) -> i8 {
    beta_y_with(n, &primes_up_to(y))
}

pub fn beta_y_with(n: u64, table: &PrimeTable) -> i8 {
    assert!(n >= 1);
    let (fs, rest) = split(n, table);
    if rest != 1 || fs.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if fs.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Iterator over the support of `g_y`, in lexicographic order of the prime
/// subsets (depth-first, primes ascending).
pub struct SupportIter {
    primes: Vec<u64>,
    bound: Option<u128>,
    // (n, weight, index of the next prime to try)
    stack: Vec<(u128, ExactRational, usize)>,
}

impl Iterator for SupportIter {
    type Item = SupportEntry;

    fn next(&mut self) -> Option<SupportEntry> {
        let (n, weight, next) = self.stack.pop()?;
        // Push children in reverse so the smallest prime is visited first.
        let mut children = Vec::new();
        for (j, &p) in self.primes.iter().enumerate().skip(next) {
            let Some(m) = n.checked_mul(p as u128) else { break };
            if self.bound.is_some_and(|b| m > b) {
                break;
            }
            let w = &weight * BigRational::new(BigInt::from(p), BigInt::from(p - 2));
            children.push((m, w, j + 1));
        }
        self.stack.extend(children.into_iter().rev());
        Some(SupportEntry { n, weight })
    }
}

/// Every odd squarefree `y`-friable `n` (at most `bound`, if given).
pub fn enumerate_support(y: u64, bound: Option<u128>) -> Result<SupportIter> {
    enumerate_support_with(&primes_up_to(y), bound)
}

pub fn enumerate_support_with(table: &PrimeTable, bound: Option<u128>) -> Result<SupportIter> {
    let primes = table.odd_primes().to_vec();
    if bound.is_none() {
        check_support_size(primes.len())?;
    }
    Ok(SupportIter {
        primes,
        bound,
        stack: vec![(1, ExactRational::one(), 0)],
    })
}

pub(crate) fn check_support_size(odd_primes: usize) -> Result<()> {
    if odd_primes > SUPPORT_CAP_LOG2 {
        return Err(Error::SupportTooLarge { odd_primes, cap: SUPPORT_CAP_LOG2 });
    }
    Ok(())
}

/// Integer view of one support element, used by the exact evaluators:
/// `n`, `phi2(n) = prod_{p | n} (p - 2)` and the bitmask of its primes.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SupportInts {
    pub n: u128,
    pub phi2: u128,
}

/// Depth-first walk of the full support with integer data only.
pub(crate) fn walk_support_ints(odd_primes: &[u64], mut visit: impl FnMut(SupportInts)) {
    fn go(primes: &[u64], start: usize, cur: SupportInts, visit: &mut impl FnMut(SupportInts)) {
        visit(cur);
        for (j, &p) in primes.iter().enumerate().skip(start) {
            let next = SupportInts {
                n: cur.n * p as u128,
                phi2: cur.phi2 * (p as u128 - 2),
            };
            go(primes, j + 1, next, visit);
        }
    }
    go(odd_primes, 0, SupportInts { n: 1, phi2: 1 }, &mut visit);
}

/// `G_y(s) = prod_{2 < p <= y} (1 + 1/((p-2) p^{s-1}))`.
pub fn euler_g(s: Complex64, table: &PrimeTable) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    table.odd_primes().iter().fold(one, |acc, &p| {
        let pf = p as f64;
        acc * (one + ((1.0 - s) * pf.ln()).exp() / (pf - 2.0))
    })
}

/// `zeta(s, y) = prod_{p <= y} (1 - p^{-s})^{-1}`.
pub fn euler_zeta_partial(s: Complex64, table: &PrimeTable) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = one;
    for &p in table.primes() {
        let f = one - (-s * (p as f64).ln()).exp();
        if f.norm() < 1e-14 {
            return Err(Error::Pole(format!("zeta(s, y) has a pole at s = {s}: p^(-s) = 1 for p = {p}")));
        }
        acc /= f;
    }
    Ok(acc)
}

/// `H_y(s) = G_y(s) / zeta(s, y)`, evaluated through its own Euler product
/// `(1 - 2^{-s}) prod_{2 < p <= y} (1 + (2 - p^{1-s}) / (p^s (p - 2)))`.
pub fn euler_h(s: Complex64, table: &PrimeTable) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = if table.count() > 0 {
        one - (-s * 2f64.ln()).exp()
    } else {
        one
    };
    for &p in table.odd_primes() {
        let pf = p as f64;
        let lp = pf.ln();
        let p_s = (s * lp).exp();
        let p_1ms = ((1.0 - s) * lp).exp();
        acc *= one + (2.0 - p_1ms) / (p_s * (pf - 2.0));
    }
    acc
}

/// `C_y = prod_{2 < p <= y} (1 - 2/p)`.
pub fn c_y(y: u64) -> ExactRational {
    c_y_of(&primes_up_to(y))
}

pub fn c_y_of(table: &PrimeTable) -> ExactRational {
    let odd = table.odd_primes();
    let num: Vec<u64> = odd.iter().map(|p| p - 2).collect();
    let den: Vec<(u64, u32)> = odd.iter().map(|&p| (p, 1)).collect();
    reduce_known_den(product_tree_u64(&num).into(), &den)
}

/// `G_y(1) = prod_{2 < p <= y} (1 + 1/(p-2))`, exact.
pub fn g_at_one(table: &PrimeTable) -> ExactRational {
    let odd = table.odd_primes();
    let num: Vec<u64> = odd.iter().map(|p| p - 1).collect();
    let den: Vec<u64> = odd.iter().map(|p| p - 2).collect();
    BigRational::new(product_tree_u64(&num).into(), product_tree_u64(&den).into())
}

/// `G_y(2) = prod_{2 < p <= y} (1 + 1/((p-2)p))`, exact.
pub fn g_at_two(table: &PrimeTable) -> ExactRational {
    let odd = table.odd_primes();
    let num: Vec<u64> = odd.iter().map(|p| (p - 1) * (p - 1)).collect();
    let den: Vec<u64> = odd.iter().map(|p| p * (p - 2)).collect();
    BigRational::new(product_tree_u64(&num).into(), product_tree_u64(&den).into())
}
