//! Exact rational helpers.
//!
//! Every identity in the crate is checked on [`ExactRational`] values; the
//! `f64` mirrors handed out alongside them are derived, never the other way
//! round.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator.
pub type ExactRational = BigRational;

pub fn rat(n: i64, d: i64) -> ExactRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> ExactRational {
    BigRational::from_integer(n.into())
}

/// Fractional part `{r} = r - floor(r)`, exact.
pub fn frac(r: &ExactRational) -> ExactRational {
    let (_, m) = r.numer().div_mod_floor(r.denom());
    BigRational::new(m, r.denom().clone())
}

/// `{r}(1 - {r})`.
pub fn frac_bernoulli(r: &ExactRational) -> ExactRational {
    let f = frac(r);
    let one_minus = ExactRational::one() - &f;
    f * one_minus
}

/// Nearest `f64`, correct for numerators and denominators far outside the
/// `f64` range.
pub fn to_f64(r: &ExactRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    // Fall back on explicit scaling so huge numerator/denominator pairs with a
    // moderate ratio still convert.
    let neg = r.is_negative();
    let n = r.numer().abs().to_biguint().unwrap_or_default();
    let d = r.denom().to_biguint().unwrap_or_else(BigUint::one);
    let shift = n.bits() as i64 - d.bits() as i64 - 60;
    let q = if shift >= 0 {
        n / (d << shift as usize)
    } else {
        (n << (-shift) as usize) / d
    };
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(shift as i32);
    if neg {
        -mag
    } else {
        mag
    }
}

/// Product of a list of integers by balanced splitting, which keeps the
/// operands of each multiplication comparable in size.
pub fn product_tree(values: &[BigUint]) -> BigUint {
    match values.len() {
        0 => BigUint::one(),
        1 => values[0].clone(),
        n => {
            let (a, b) = values.split_at(n / 2);
            product_tree(a) * product_tree(b)
        }
    }
}

pub fn product_tree_u64(values: &[u64]) -> BigUint {
    fn go(v: &[u64]) -> BigUint {
        match v.len() {
            0 => BigUint::one(),
            1 => BigUint::from(v[0]),
            // Leaves multiply in u128 while they fit.
            2 => BigUint::from(v[0] as u128 * v[1] as u128),
            n => {
                let (a, b) = v.split_at(n / 2);
                go(a) * go(b)
            }
        }
    }
    go(values)
}

/// Builds the reduced fraction `num / den` when every prime factor of `den`
/// is known in advance: `den_primes` lists each such prime with its exponent.
///
/// num-bigint's gcd is quadratic, which is hopeless for the million-bit
/// products that show up at large `y`. Here the common factor is read off a
/// remainder tree instead: `num mod p^e` for every listed prime costs a
/// handful of fast big divisions.
pub fn reduce_known_den(num: BigInt, den_primes: &[(u64, u32)]) -> ExactRational {
    let den_primes: Vec<(u64, u32)> = den_primes.iter().copied().filter(|&(_, e)| e > 0).collect();
    if num.is_zero() {
        return ExactRational::zero();
    }
    let moduli: Vec<BigUint> =
        den_primes.iter().map(|&(p, e)| num_traits::pow(BigUint::from(p), e as usize)).collect();
    let den = product_tree(&moduli);
    if den_primes.is_empty() {
        return BigRational::from_integer(num);
    }
    let mag = num.magnitude().clone();
    let mut residues = vec![BigUint::zero(); moduli.len()];
    remainder_tree(&mag % &den, &moduli, &mut residues);
    let mut common = Vec::new();
    for (i, &(p, e)) in den_primes.iter().enumerate() {
        let mut r = residues[i].clone();
        let mut v = 0u32;
        if r.is_zero() {
            v = e;
        } else {
            let pb = BigUint::from(p);
            while v < e && (&r % &pb).is_zero() {
                r /= &pb;
                v += 1;
            }
        }
        if v > 0 {
            common.push(num_traits::pow(BigUint::from(p), v as usize));
        }
    }
    let g = product_tree(&common);
    let n = BigInt::from_biguint(num.sign(), mag / &g);
    let d = den / g;
    BigRational::new_raw(n, BigInt::from(d))
}

fn remainder_tree(value: BigUint, moduli: &[BigUint], out: &mut [BigUint]) {
    match moduli.len() {
        0 => {}
        1 => out[0] = value % &moduli[0],
        n => {
            let (a, b) = moduli.split_at(n / 2);
            let (oa, ob) = out.split_at_mut(n / 2);
            let pa = product_tree(a);
            let pb = product_tree(b);
            remainder_tree(&value % pa, a, oa);
            remainder_tree(value % pb, b, ob);
        }
    }
}

/// Multiplies a sign and a list of factors into a `BigInt`.
pub fn signed_product(negative: bool, factors: &[u64]) -> BigInt {
    let m = product_tree_u64(factors);
    if negative {
        -BigInt::from(m)
    } else {
        BigInt::from(m)
    }
}

/// Serialization used by every report: `"p/q"`, or `"p"` when `q = 1`.
pub fn to_string_exact(r: &ExactRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a decimal like `"2.5"`.
pub fn parse_rational(s: &str) -> Option<ExactRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches('-'), fp);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = BigRational::new(n, d);
        return Some(if neg { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}
