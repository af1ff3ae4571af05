//! The main term `M(H, y) = C_y sum_n g_y(n) {H/2n}(1 - {H/2n})`.
//!
//! Two exact evaluators that share nothing beyond the prime table:
//!
//! * [`main_term_direct`] walks the full support of `g_y` (the divisors of the
//!   odd part of `q_y`), so it is limited to `y < 101`;
//! * [`main_term_corr`] uses the correlation identity
//!   `M = H Pi_y - H^2 Pi_y^2 + C_y sum_{1 <= k < H/2} (H - 2k) f_y(k)`,
//!   whose cost is `O(H + pi(y))`.
//!
//! Their exact agreement is the central self-test of the crate. The
//! Hausman-Shapiro closed form for `V_q(H)` is evaluated literally as a third,
//! independent route.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{check_support_size, walk_support_ints};
use crate::error::{Error, Result};
use crate::friable::{dickman, psi, saddle};
use crate::rational::{frac_bernoulli, product_tree_u64, rat_int, reduce_known_den, ExactRational};
use crate::sieve::{primes_up_to, PrimeTable};
use crate::EULER_GAMMA;

/// Which exact evaluator produced a [`MainTermValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Correlation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Correlation => "correlation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainTermValue {
    pub h: u64,
    pub y: u64,
    pub value: ExactRational,
    pub method: Method,
}

pub fn main_term(h: u64, y: u64, method: Method) -> Result<MainTermValue> {
    let table = primes_up_to(y);
    let value = match method {
        Method::Direct => main_term_direct_with(h, &table)?,
        Method::Correlation => main_term_corr_with(h, &table),
    };
    Ok(MainTermValue { h, y, value, method })
}

/// `M(H, y)` summed over the full support of `g_y`.
pub fn main_term_direct(h: u64, y: u64) -> Result<ExactRational> {
    main_term_direct_with(h, &primes_up_to(y))
}

/// Direct evaluation over a prebuilt table.
///
/// With `Q` the product of the odd primes `<= y` and `r = H mod 2n`, each
/// support term equals `r(2n - r) (Q/n) phi2(Q/n) / (4 Q^2)`, where
/// `phi2(m) = prod_{p | m} (p - 2)`. The integer numerators are summed in a
/// fixed-width accumulator; `n < 2^121` because the support cap keeps `y`
/// below 101.
pub fn main_term_direct_with(h: u64, table: &PrimeTable) -> Result<ExactRational> {
    if h == 0 {
        return Err(Error::InvalidInput("H must be at least 1".into()));
    }
    let odd = table.odd_primes();
    check_support_size(odd.len())?;
    let mut acc = [0u64; ACC_LIMBS];
    let h128 = h as u128;
    // Binary include/exclude recursion: `n` and `phi2(n)` collect the
    // included primes, `cq` and `cphi` the excluded ones.
    fn go(odd: &[u64], i: usize, n: u128, cq: u128, cphi: u128, h: u128, acc: &mut [u64; ACC_LIMBS]) {
        if i == odd.len() {
            let two_n = 2 * n;
            let r = if two_n > h { h } else { h % two_n };
            if r == 0 {
                return;
            }
            let x = mul_u128(r, two_n - r);
            let y = mul_u128(cq, cphi);
            add_into(acc, &mul_4x4(&x, &y));
            return;
        }
        let p = odd[i] as u128;
        go(odd, i + 1, n * p, cq, cphi, h, acc);
        go(odd, i + 1, n, cq * p, cphi * (p - 2), h, acc);
    }
    go(odd, 0, 1, 1, 1, h128, &mut acc);
    let num = BigUint::from_slice(&limbs_to_u32(&acc));
    let mut den = vec![(2u64, 2u32)];
    den.extend(odd.iter().map(|&p| (p, 2u32)));
    Ok(reduce_known_den(BigInt::from(num), &den))
}

const ACC_LIMBS: usize = 10;

fn mul_u128(a: u128, b: u128) -> [u64; 4] {
    let a = [a as u64, (a >> 64) as u64];
    let b = [b as u64, (b >> 64) as u64];
    let mut out = [0u64; 4];
    for i in 0..2 {
        let mut carry = 0u128;
        for j in 0..2 {
            let t = out[i + j] as u128 + a[i] as u128 * b[j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        out[i + 2] = carry as u64;
    }
    out
}

fn mul_4x4(a: &[u64; 4], b: &[u64; 4]) -> [u64; 8] {
    let mut out = [0u64; 8];
    for i in 0..4 {
        let mut carry = 0u128;
        for j in 0..4 {
            let t = out[i + j] as u128 + a[i] as u128 * b[j] as u128 + carry;
            out[i + j] = t as u64;
            carry = t >> 64;
        }
        out[i + 4] = carry as u64;
    }
    out
}

fn add_into(acc: &mut [u64; ACC_LIMBS], v: &[u64; 8]) {
    let mut carry = 0u64;
    for i in 0..ACC_LIMBS {
        let x = if i < 8 { v[i] } else { 0 };
        let (s1, c1) = acc[i].overflowing_add(x);
        let (s2, c2) = s1.overflowing_add(carry);
        acc[i] = s2;
        carry = (c1 as u64) + (c2 as u64);
    }
    debug_assert_eq!(carry, 0);
}

fn limbs_to_u32(limbs: &[u64]) -> Vec<u32> {
    limbs.iter().flat_map(|&l| [l as u32, (l >> 32) as u32]).collect()
}

/// `M(H, y)` through the correlation identity.
pub fn main_term_corr(h: u64, y: u64) -> ExactRational {
    main_term_corr_with(h, &primes_up_to(y))
}

/// Block length of the kernel sieve over `k`.
const KERNEL_BLOCK: u64 = 1 << 20;

/// Correlation-identity evaluation over a prebuilt table.
///
/// `f_y(k)` only depends on the odd part of the radical of `k` restricted to
/// primes `<= y`; call it the kernel. Terms are grouped by kernel, so the
/// only rational work is one big-integer term per distinct kernel, put over
/// the common denominator `D = prod_{p in P} (p - 2)` with `P` the odd primes
/// `<= min(y, (H-1)/2)`.
pub fn main_term_corr_with(h: u64, table: &PrimeTable) -> ExactRational {
    assert!(h >= 1, "H must be at least 1");
    let kmax = (h - 1) / 2;
    let sieve_primes = table.odd_primes().iter().copied().take_while(|&p| p <= kmax).collect::<Vec<_>>();

    // kernel -> (sum of (H - 2k), prod (p - 1), prod (p - 2))
    let mut groups: HashMap<u64, (u128, u64, u64)> = HashMap::new();
    let mut ker = Vec::new();
    let mut num1 = Vec::new();
    let mut den2 = Vec::new();
    let mut lo = 1u64;
    while lo <= kmax {
        let hi = (lo + KERNEL_BLOCK - 1).min(kmax);
        let len = (hi - lo + 1) as usize;
        ker.clear();
        ker.resize(len, 1u64);
        num1.clear();
        num1.resize(len, 1u64);
        den2.clear();
        den2.resize(len, 1u64);
        for &p in &sieve_primes {
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                let i = (m - lo) as usize;
                ker[i] *= p;
                num1[i] *= p - 1;
                den2[i] *= p - 2;
                m += p;
            }
        }
        for i in 0..len {
            let k = lo + i as u64;
            let w = (h - 2 * k) as u128;
            let e = groups.entry(ker[i]).or_insert((0, num1[i], den2[i]));
            e.0 += w;
        }
        lo = hi + 1;
    }

    let d_prime = product_tree_u64(&sieve_primes.iter().map(|p| p - 2).collect::<Vec<_>>());
    // Deterministic order keeps the computation reproducible.
    let mut keys: Vec<u64> = groups.keys().copied().collect();
    keys.sort_unstable();
    let mut s = BigUint::zero();
    for key in keys {
        let (w, n1, d2) = groups[&key];
        let part = &d_prime / d2;
        s += part * n1 * BigUint::from(w);
    }

    let primes = table.primes();
    let odd = table.odd_primes();
    let n1 = BigInt::from(product_tree_u64(&primes.iter().map(|p| p - 1).collect::<Vec<_>>()));
    let p1 = BigInt::from(product_tree_u64(primes));
    let cn = BigInt::from(product_tree_u64(&odd.iter().map(|p| p - 2).collect::<Vec<_>>()));
    let codd = BigInt::from(product_tree_u64(odd));
    let dp = BigInt::from(d_prime);
    let hb = BigInt::from(h);

    // Everything over P1^2 * Codd * D.
    let codd_dp = &codd * &dp;
    let numer = (&hb * &n1 * &p1 - &hb * &hb * &n1 * &n1) * &codd_dp + cn * BigInt::from(s) * &p1 * &p1;

    let mut exps: BTreeMap<u64, u32> = BTreeMap::new();
    for &p in primes {
        *exps.entry(p).or_default() += if p == 2 { 2 } else { 3 };
    }
    for &p in &sieve_primes {
        for (q, e) in factor_small(p - 2, table) {
            *exps.entry(q).or_default() += e;
        }
    }
    let den: Vec<(u64, u32)> = exps.into_iter().collect();
    reduce_known_den(numer, &den)
}

/// Trial factorization of `m` whose prime factors are all in `table`.
fn factor_small(mut m: u64, table: &PrimeTable) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in table.primes() {
        if p * p > m {
            break;
        }
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// Distinct prime factors of a squarefree `q`, ascending.
pub fn squarefree_factors(q: u64) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    let mut m = q;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m % d == 0 {
            m /= d;
            if m % d == 0 {
                return Err(Error::NotSquarefree(q));
            }
            out.push(d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    Ok(out)
}

/// Largest number of prime factors accepted by [`hausman_shapiro_vq`].
pub const VQ_OMEGA_CAP: usize = 25;

/// Hausman-Shapiro closed form for `V_q(H)`, evaluated term by term as
/// `(phi(q)/q)^2 sum_{r | q} prod_{p | q, p !| r} p(p-2)/(p-1)^2
///  * r^2/phi(r)^2 * {H/r}(1 - {H/r})`.
pub fn hausman_shapiro_vq(q: u64, h: u64) -> Result<ExactRational> {
    let ps = squarefree_factors(q)?;
    if ps.len() > VQ_OMEGA_CAP {
        return Err(Error::SupportTooLarge { odd_primes: ps.len(), cap: VQ_OMEGA_CAP });
    }
    let omitted: Vec<ExactRational> =
        ps.iter().map(|&p| r_of(p * (p - 2), (p - 1) * (p - 1))).collect();
    let included: Vec<ExactRational> = ps.iter().map(|&p| r_of(p * p, (p - 1) * (p - 1))).collect();
    let hq = rat_int(h);
    let mut total = ExactRational::zero();
    for mask in 0u64..(1u64 << ps.len()) {
        let mut r = 1u64;
        let mut w = ExactRational::one();
        for (i, &p) in ps.iter().enumerate() {
            if mask >> i & 1 == 1 {
                r *= p;
                w *= &included[i];
            } else {
                w *= &omitted[i];
            }
        }
        if w.is_zero() {
            continue;
        }
        let b = frac_bernoulli(&(&hq / rat_int(r)));
        total += w * b;
    }
    let phi: u64 = ps.iter().map(|p| p - 1).product();
    let ratio = r_of(phi, q);
    Ok(&ratio * &ratio * total)
}

fn r_of(n: u64, d: u64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `sum_{r > x} g_y(r)/r` over the support of `g_y`.
pub fn tail_sum(x: &ExactRational, y: u64) -> Result<ExactRational> {
    let table = primes_up_to(y);
    let odd = table.odd_primes();
    check_support_size(odd.len())?;
    // Only integers `r` enter, so `r > x` iff `r > floor(x)`.
    let fl = x.floor().to_integer();
    let cutoff: Option<u128> = if fl < BigInt::zero() { Some(0) } else { fl.to_u128() };
    let Some(cutoff) = cutoff else { return Ok(ExactRational::zero()) };
    // g(r)/r = 1/phi2(r); sum over the common denominator phi2(Q).
    let big_phi: u128 = odd.iter().map(|&p| (p - 2) as u128).product();
    let mut sum = BigUint::zero();
    walk_support_ints(odd, |e| {
        if e.n > cutoff {
            sum += big_phi / e.phi2;
        }
    });
    Ok(BigRational::new(BigInt::from(sum), BigInt::from(big_phi)))
}

/// Regime of the asymptotic description of `M(H, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    LargeY,
    BoundedU,
    Mid,
    PowerA,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::LargeY => "large_y",
            Regime::BoundedU => "bounded_u",
            Regime::Mid => "mid",
            Regime::PowerA => "power_a",
        }
    }
}

/// Largest `u = log H / log y` still treated as bounded.
pub const BOUNDED_U_MAX: f64 = 10.0;
/// Largest `a = log log H / log y` treated as zero.
pub const MID_A_MAX: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct RegimePrediction {
    pub regime: Regime,
    pub predicted: f64,
    pub h: u64,
    pub y: u64,
    pub u: f64,
    pub a: f64,
    pub pi_y: f64,
    /// Intermediate quantities (lambda, alpha, Psi, ...) for the report.
    pub details: Vec<(&'static str, f64)>,
}

/// Picks the regime for `(H, y)` with the thresholds above.
pub fn select_regime(h: u64, y: u64) -> Result<(Regime, f64, f64)> {
    if h < 16 {
        return Err(Error::InvalidInput(format!("predict needs H >= 16, got {h}")));
    }
    if y < 3 {
        return Err(Error::InvalidInput(format!("predict needs y >= 3, got {y}")));
    }
    let lh = (h as f64).ln();
    let ly = (y as f64).ln();
    let u = lh / ly;
    let a = lh.ln() / ly;
    let regime = if y >= h {
        Regime::LargeY
    } else if u <= BOUNDED_U_MAX {
        Regime::BoundedU
    } else if a <= MID_A_MAX {
        Regime::Mid
    } else if a < 0.5 {
        Regime::PowerA
    } else {
        return Err(Error::UnsupportedRegime(format!(
            "a = log log H / log y = {a:.4} >= 1/2 at H = {h}, y = {y}"
        )));
    };
    Ok((regime, u, a))
}

/// `Pi_y` in floating point, summed in logarithms.
pub fn mertens_float(table: &PrimeTable) -> f64 {
    table.primes().iter().map(|&p| (-1.0 / p as f64).ln_1p()).sum::<f64>().exp()
}

/// Asymptotic prediction for `M(H, y)` in the regime selected by
/// [`select_regime`].
pub fn predict(h: u64, y: u64) -> Result<RegimePrediction> {
    let (regime, u, a) = select_regime(h, y)?;
    let table = primes_up_to(y);
    let pi_y = mertens_float(&table);
    let hf = h as f64;
    let mut details = Vec::new();
    let predicted = match regime {
        Regime::LargeY => hf * pi_y * (1.0 - (-EULER_GAMMA).exp() * u),
        Regime::BoundedU => {
            let lam = dickman::lambda(u)?;
            details.push(("lambda", lam));
            hf * pi_y * lam
        }
        Regime::Mid => {
            let ps = psi::psi(h, y)? as f64;
            details.push(("psi", ps));
            ps * pi_y * (-EULER_GAMMA).exp() / u.ln()
        }
        Regime::PowerA => {
            let ps = psi::psi(h, y)? as f64;
            let alpha = saddle::solve_alpha((hf / 2.0).ln(), table.primes());
            let z = crate::analytic::zeta::zeta_complex(Complex64::new(-a, 0.0))?.re;
            let mut prod_alpha = 0.0f64;
            let mut prod_a = 0.0f64;
            for &p in table.primes() {
                let pf = p as f64;
                prod_alpha += (-pf.powf(-alpha)).ln_1p();
                prod_a += (-(2.0 - pf.powf(-a)) / pf).ln_1p();
            }
            details.push(("psi", ps));
            details.push(("alpha", alpha));
            details.push(("one_minus_a", 1.0 - a));
            details.push(("zeta_minus_a", z));
            -2.0 * z * ps * prod_alpha.exp() * (y as f64).ln() * prod_a.exp() / hf.ln().ln()
        }
    };
    Ok(RegimePrediction { regime, predicted, h, y, u, a, pi_y, details })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sieve::mertens_product;

    #[test]
    fn direct_examples() {
        assert_eq!(main_term_direct(3, 3).unwrap(), rat(1, 3));
        assert_eq!(main_term_direct(6, 3).unwrap(), rat(0, 1));
        assert_eq!(main_term_direct(1, 3).unwrap(), rat(2, 9));
    }

    #[test]
    fn corr_examples() {
        assert_eq!(main_term_corr(3, 3), rat(1, 3));
        assert_eq!(main_term_corr(6, 3), rat(0, 1));
        for y in [2u64, 3, 10, 100, 1000] {
            let pi = mertens_product(y).exact;
            assert_eq!(main_term_corr(1, y), &pi * (ExactRational::one() - &pi));
        }
    }

    #[test]
    fn methods_agree_small_grid() {
        for y in [3u64, 5, 7, 11, 13] {
            let table = primes_up_to(y);
            for h in 1..=300 {
                assert_eq!(main_term_direct_with(h, &table).unwrap(), main_term_corr_with(h, &table), "H={h} y={y}");
            }
        }
    }

    #[test]
    fn direct_at_largest_allowed_y() {
        assert!(main_term_direct(10, 101).is_err());
        let t = primes_up_to(97);
        assert_eq!(main_term_direct_with(100, &t).unwrap(), main_term_corr_with(100, &t));
    }

    #[test]
    fn vq_examples() {
        assert_eq!(hausman_shapiro_vq(6, 3).unwrap(), rat(1, 3));
        assert_eq!(hausman_shapiro_vq(6, 6).unwrap(), rat(0, 1));
        assert_eq!(hausman_shapiro_vq(30, 7).unwrap(), main_term_direct(7, 5).unwrap());
        assert!(matches!(hausman_shapiro_vq(12, 3), Err(Error::NotSquarefree(12))));
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_sum(&rat(1, 1), 3).unwrap(), rat(1, 1));
        assert_eq!(tail_sum(&rat(3, 1), 3).unwrap(), rat(0, 1));
        assert_eq!(tail_sum(&rat(1, 1), 5).unwrap(), rat(5, 3));
        assert_eq!(tail_sum(&rat(5, 2), 5).unwrap(), rat(5, 3));
        assert_eq!(tail_sum(&rat(3, 1), 5).unwrap(), rat(2, 3));
    }

    #[test]
    fn squarefree_factorization() {
        assert_eq!(squarefree_factors(30030).unwrap(), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(squarefree_factors(1).unwrap(), Vec::<u64>::new());
        assert!(squarefree_factors(18).is_err());
    }

    #[test]
    fn regime_selection() {
        assert_eq!(select_regime(16, 1_000_000).unwrap().0, Regime::LargeY);
        assert_eq!(select_regime(10_000, 100).unwrap().0, Regime::BoundedU);
        assert_eq!(select_regime(100_000, 50).unwrap().0, Regime::BoundedU);
        assert!(select_regime(15, 100).is_err());
        assert!(matches!(select_regime(1 << 62, 3), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn large_y_prediction_formula() {
        let p = predict(16, 1_000_000).unwrap();
        let pi = mertens_product(1000).float; // sanity: Pi is decreasing
        assert!(p.pi_y < pi);
        let expected = 16.0 * p.pi_y * (1.0 - (-EULER_GAMMA).exp() * 16f64.ln() / 1e6f64.ln());
        assert!((p.predicted - expected).abs() < 1e-12 * expected);
    }
}
