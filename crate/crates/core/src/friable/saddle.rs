//! The saddle point `alpha(x, y)` of `s -> zeta(s, y) x^s` and the
//! Hildebrand-Tenenbaum estimate built on it.

use crate::error::{Error, Result};
use crate::friable::dickman::xi;
use crate::sieve::{primes_up_to, PrimeTable};

/// Everything known at the saddle point.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleData {
    pub x: f64,
    pub log_x: f64,
    pub y: u64,
    pub alpha: f64,
    /// `log x / log y`.
    pub u: f64,
    /// `xi(u)`; zero when `u <= 1`.
    pub xi: f64,
    /// `sum_{p <= y} p^alpha log^2 p / (p^alpha - 1)^2`.
    pub sigma2: f64,
    pub zeta_partial_alpha: f64,
    pub log_zeta_partial_alpha: f64,
    /// `sum_{p <= y} log p / (p^alpha - 1) - log x`.
    pub residual: f64,
}

/// `sum_{p <= y} log p / (p^alpha - 1)`.
pub fn saddle_sum(alpha: f64, primes: &[u64]) -> f64 {
    primes
        .iter()
        .map(|&p| {
            let l = (p as f64).ln();
            l / (alpha * l).exp_m1()
        })
        .sum()
}

/// Root of `saddle_sum(alpha) = logx` by bisection; the sum decreases from
/// `+inf` at `0+` to `0` at `inf`, so the root is unique.
pub fn solve_alpha(logx: f64, primes: &[u64]) -> f64 {
    if primes.is_empty() {
        return f64::NAN;
    }
    let mut lo = 1.0f64;
    while saddle_sum(lo, primes) < logx {
        lo *= 0.5;
    }
    let mut hi = 1.0f64;
    while saddle_sum(hi, primes) > logx {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if saddle_sum(mid, primes) > logx {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Take whichever end has the smaller residual.
    if (saddle_sum(lo, primes) - logx).abs() <= (saddle_sum(hi, primes) - logx).abs() {
        lo
    } else {
        hi
    }
}

pub fn saddle_alpha(logx: f64, y: u64) -> Result<SaddleData> {
    saddle_alpha_with(logx, &primes_up_to(y))
}

pub fn saddle_alpha_with(logx: f64, table: &PrimeTable) -> Result<SaddleData> {
    let y = table.y();
    if y < 2 {
        return Err(Error::InvalidInput(format!("saddle point needs y >= 2, got {y}")));
    }
    if !(logx >= 2f64.ln() - 1e-15) {
        return Err(Error::InvalidInput(format!("saddle point needs log x >= log 2, got {logx}")));
    }
    let primes = table.primes();
    let alpha = solve_alpha(logx, primes);
    let mut sigma2 = 0.0;
    let mut log_zeta = 0.0;
    for &p in primes {
        let l = (p as f64).ln();
        let al = alpha * l;
        // p^a / (p^a - 1)^2 written without overflow.
        sigma2 += l * l / (al.exp_m1() * -(-al).exp_m1());
        log_zeta -= (-(-al).exp()).ln_1p();
    }
    let u = logx / (y as f64).ln();
    let xi = if u > 1.0 { xi(u)? } else { 0.0 };
    Ok(SaddleData {
        x: logx.exp(),
        log_x: logx,
        y,
        alpha,
        u,
        xi,
        sigma2,
        zeta_partial_alpha: log_zeta.exp(),
        log_zeta_partial_alpha: log_zeta,
        residual: saddle_sum(alpha, primes) - logx,
    })
}

/// `Psi(x, y) ~ zeta(alpha, y) x^alpha / (alpha sqrt(2 pi sigma2))`.
pub fn psi_ht_estimate(x: f64, y: u64) -> Result<f64> {
    if !(x >= y as f64 && y >= 2) {
        return Err(Error::InvalidInput(format!("estimate needs x >= y >= 2, got x = {x}, y = {y}")));
    }
    let s = saddle_alpha(x.ln(), y)?;
    Ok(ht_from_saddle(&s))
}

pub fn ht_from_saddle(s: &SaddleData) -> f64 {
    let log_est = s.log_zeta_partial_alpha + s.alpha * s.log_x
        - s.alpha.ln()
        - 0.5 * (2.0 * std::f64::consts::PI * s.sigma2).ln();
    log_est.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friable::psi::psi;

    #[test]
    fn residual_small() {
        for (lx, y) in [(10.0f64, 100u64), (30.0, 1000), (2f64.ln(), 2), (5.0, 1_000_000), (60.0, 3)] {
            let s = saddle_alpha(lx, y).unwrap();
            assert!(s.residual.abs() <= 1e-9 * lx, "{lx} {y} {}", s.residual);
            assert!(s.alpha > 0.0 && s.sigma2 > 0.0);
        }
    }

    #[test]
    fn large_y_gives_alpha_above_one() {
        let t = primes_up_to(1_000_000);
        let at_one = saddle_sum(1.0, t.primes());
        let s = saddle_alpha_with(at_one * 0.5, &t).unwrap();
        assert!(s.alpha >= 1.0);
    }

    #[test]
    fn alpha_decreases_in_x() {
        let t = primes_up_to(500);
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let s = saddle_alpha_with(k as f64, &t).unwrap();
            assert!(s.alpha < prev);
            prev = s.alpha;
        }
    }

    #[test]
    fn xi_tracks_alpha() {
        let s = saddle_alpha(1e6f64.ln(), 100).unwrap();
        let gap = ((1.0 - s.alpha) * 100f64.ln() - s.xi).abs();
        assert!(gap < 0.5, "gap {gap}");
    }

    #[test]
    fn ht_estimate_close_to_exact() {
        let e = psi_ht_estimate(1e6, 100).unwrap();
        let x = psi(1_000_000, 100).unwrap() as f64;
        assert!((e / x - 1.0).abs() < 0.10, "{e} vs {x}");
        let e = psi_ht_estimate(1000.0, 1000).unwrap();
        assert!((e / 1000.0 - 1.0).abs() < 0.25, "{e}");
    }

    #[test]
    fn bad_inputs() {
        assert!(saddle_alpha(0.1, 10).is_err());
        assert!(psi_ht_estimate(5.0, 10).is_err());
    }
}
