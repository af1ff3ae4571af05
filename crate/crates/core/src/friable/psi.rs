//! Exact counts of `y`-friable integers.
//!
//! All three counts use the same recursion over the primes `p_1 < ... < p_k`
//! up to `y`, memoized on `(floor(x/d), k)`:
//!
//! * plain: `Psi(x, k) = Psi(x, 1) + sum_{2 <= i <= k} Psi(x/p_i, i)`
//! * squarefree with weight `w` per prime:
//!   `C(x, k) = 1 + w sum_{i <= k} C(x/p_i, i - 1)`
//!
//! where `k` is always clipped to the number of primes `<= x`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sieve::{primes_up_to, PrimeTable};

/// Guard on the number of memo entries.
pub const DEFAULT_MEMO_BUDGET: usize = 100_000_000;

/// `Psi(x, y)`: the number of `n <= x` with every prime factor `<= y`.
pub fn psi(x: u64, y: u64) -> Result<u64> {
    if y >= x {
        return Ok(x);
    }
    psi_with(x, &primes_up_to(y))
}

pub fn psi_with(x: u64, table: &PrimeTable) -> Result<u64> {
    FriableCounter::new(table, DEFAULT_MEMO_BUDGET).plain(x)
}

/// Squarefree `y`-friable `n <= x`.
pub fn psi_squarefree(x: u64, y: u64) -> Result<u64> {
    FriableCounter::new(&primes_up_to(y.min(x)), DEFAULT_MEMO_BUDGET).weighted(x, 1)
}

/// `sum_{n <= x, n y-friable} mu^2(n) 2^omega(n)`.
pub fn psi_2omega(x: u64, y: u64) -> Result<u64> {
    FriableCounter::new(&primes_up_to(y.min(x)), DEFAULT_MEMO_BUDGET).weighted(x, 2)
}

/// Memoized counter bound to one prime table.
pub struct FriableCounter<'a> {
    table: &'a PrimeTable,
    memo: HashMap<(u64, u32), u64>,
    budget: usize,
}

impl<'a> FriableCounter<'a> {
    pub fn new(table: &'a PrimeTable, budget: usize) -> Self {
        FriableCounter { table, memo: HashMap::new(), budget }
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn plain(&mut self, x: u64) -> Result<u64> {
        let k = self.table.count();
        self.plain_k(x, k)
    }

    pub fn weighted(&mut self, x: u64, w: u64) -> Result<u64> {
        self.memo.clear();
        let k = self.table.count();
        self.weighted_k(x, k, w)
    }

    fn remember(&mut self, key: (u64, u32), v: u64) -> Result<()> {
        if self.memo.len() >= self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        self.memo.insert(key, v);
        Ok(())
    }

    fn plain_k(&mut self, x: u64, k: usize) -> Result<u64> {
        if x == 0 {
            return Ok(0);
        }
        let k = k.min(self.table.pi(x));
        if k == 0 {
            return Ok(1);
        }
        if k == 1 {
            return Ok(64 - x.leading_zeros() as u64);
        }
        // Every prime up to x is available.
        if x <= self.table.y() && k == self.table.pi(x) {
            return Ok(x);
        }
        let key = (x, k as u32);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let primes = self.table.primes();
        let mut total = 64 - x.leading_zeros() as u64;
        for i in 2..=k {
            let p = primes[i - 1];
            let m = x / p;
            total += if m < p { m } else { self.plain_k(m, i)? };
        }
        self.remember(key, total)?;
        Ok(total)
    }

    fn weighted_k(&mut self, x: u64, k: usize, w: u64) -> Result<u64> {
        if x == 0 {
            return Ok(0);
        }
        let k = k.min(self.table.pi(x));
        if k == 0 {
            return Ok(1);
        }
        let key = (x, k as u32);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let primes = self.table.primes();
        let mut total = 1u64;
        for i in 1..=k {
            let m = x / primes[i - 1];
            let c = if m < 2 { 1 } else { self.weighted_k(m, i - 1, w)? };
            total += w * c;
        }
        self.remember(key, total)?;
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if e > 0 {
                out.push((d, e));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn examples() {
        assert_eq!(psi(10, 2).unwrap(), 4);
        assert_eq!(psi(100, 3).unwrap(), 20);
        assert_eq!(psi(57, 100).unwrap(), 57);
        assert_eq!(psi_squarefree(10, 3).unwrap(), 4);
        assert_eq!(psi_2omega(10, 3).unwrap(), 9);
        assert_eq!(psi(0, 5).unwrap(), 0);
        assert_eq!(psi(1, 1).unwrap(), 1);
    }

    #[test]
    fn recursion_matches_enumeration() {
        let xmax = 20_000u64;
        let facs: Vec<Vec<(u64, u32)>> = (0..=xmax).map(|n| if n == 0 { vec![] } else { factor(n) }).collect();
        for y in [2u64, 3, 5, 7, 13, 97] {
            let table = primes_up_to(y);
            let (mut a, mut b, mut c) = (0u64, 0u64, 0u64);
            for x in 1..=xmax {
                let f = &facs[x as usize];
                if f.iter().all(|&(p, _)| p <= y) {
                    a += 1;
                    if f.iter().all(|&(_, e)| e == 1) {
                        b += 1;
                        c += 1 << f.len();
                    }
                }
                if x % 997 == 0 || x == xmax {
                    assert_eq!(psi_with(x, &table).unwrap(), a, "psi({x},{y})");
                    assert_eq!(psi_squarefree(x, y).unwrap(), b, "psi*({x},{y})");
                    assert_eq!(psi_2omega(x, y).unwrap(), c, "psi2w({x},{y})");
                }
            }
        }
    }

    #[test]
    fn budget_guard() {
        let table = primes_up_to(1000);
        let mut c = FriableCounter::new(&table, 10);
        assert!(matches!(c.plain(10_000_000), Err(Error::BudgetExceeded(10))));
    }
}
