//! Exact identities for the main term and the closed form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use roughvar::arith::enumerate_support_with;
use roughvar::main_term::{hausman_shapiro_vq, main_term_corr_with, main_term_direct_with, squarefree_factors};
use roughvar::rational::frac;
use roughvar::sieve::mertens_product;
use roughvar::{primes_up_to, ExactRational};

fn int(n: u64) -> ExactRational {
    BigRational::from_integer(BigInt::from(n))
}

fn q_y(y: u64) -> u64 {
    primes_up_to(y).primes().iter().product()
}

#[test]
fn direct_and_correlation_agree_to_h_2000() {
    for y in [3u64, 5, 7, 11, 13, 17] {
        let t = primes_up_to(y);
        for h in 1..=2000 {
            let d = main_term_direct_with(h, &t).unwrap();
            assert!(!d.is_negative());
            assert_eq!(d, main_term_corr_with(h, &t), "H = {h}, y = {y}");
        }
    }
}

#[test]
fn closed_form_at_primorial_is_main_term() {
    for y in [3u64, 5, 7, 11, 13, 17] {
        let t = primes_up_to(y);
        let q = q_y(y);
        for h in 1..=2000 {
            assert_eq!(hausman_shapiro_vq(q, h).unwrap(), main_term_direct_with(h, &t).unwrap(), "H = {h}, y = {y}");
        }
    }
}

#[test]
fn periodic_in_h_with_period_q() {
    for y in [3u64, 5] {
        let t = primes_up_to(y);
        let q = q_y(y);
        for h in 1..=100 {
            assert_eq!(main_term_corr_with(h + q, &t), main_term_corr_with(h, &t));
        }
    }
}

#[test]
fn bernoulli_at_h_one() {
    for y in [2u64, 3, 5, 30, 97, 101, 1000, 5000, 10_000] {
        let pi = mertens_product(y).exact;
        let want = &pi * (ExactRational::one() - &pi);
        assert_eq!(main_term_corr_with(1, &primes_up_to(y)), want, "y = {y}");
    }
}

#[test]
fn bounds_sandwich_exactly() {
    for y in [3u64, 5, 7, 11, 13, 17, 19, 23, 29] {
        let support: Vec<_> = enumerate_support_with(&primes_up_to(y), None).unwrap().collect();
        for x in 1..=50u64 {
            let xr = int(x);
            let (mut lower, mut middle, mut upper) = (ExactRational::zero(), ExactRational::zero(), ExactRational::zero());
            for e in &support {
                let r = BigRational::from_integer(BigInt::from(e.n));
                let q = &xr / &r;
                if e.n > x as u128 {
                    lower += &e.weight / &r * (ExactRational::one() - &q);
                }
                let f = frac(&q);
                middle += &e.weight * &f * (ExactRational::one() - &f);
                upper += &e.weight * q.min(ExactRational::one());
            }
            lower *= &xr;
            assert!(lower <= middle && middle <= upper, "x = {x}, y = {y}");
        }
    }
}

fn squarefree() -> impl Strategy<Value = u64> {
    (2u64..=10_000).prop_filter("squarefree", |&q| squarefree_factors(q).is_ok())
}

proptest! {
    #[test]
    fn reflection_in_h(q in squarefree(), h in 0u64..=10_000) {
        let h = h % (q + 1);
        prop_assert_eq!(hausman_shapiro_vq(q, h).unwrap(), hausman_shapiro_vq(q, q - h).unwrap());
    }

    #[test]
    fn main_term_nonnegative(h in 1u64..5000, yi in 0usize..6) {
        let y = [3u64, 10, 30, 97, 300, 1000][yi];
        prop_assert!(!main_term_corr_with(h, &primes_up_to(y)).is_negative());
    }
}
