//! Riemann zeta by Euler-Maclaurin summation, with the reflection formula
//! left of `Re s = -1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of Bernoulli correction terms.
pub const BERNOULLI_TERMS: usize = 12;
/// Left edge of the supported half-plane.
pub const MIN_RE: f64 = -20.0;

/// `B_2, B_4, ..., B_24`.
const BERNOULLI: [f64; BERNOULLI_TERMS] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Default cutoff `N = max(20, ceil(1.3 |Im s|) + 10)`.
pub fn default_cutoff(s: Complex64) -> usize {
    ((1.3 * s.im.abs()).ceil() as usize + 10).max(20)
}

/// Left of this line the partial sums `sum n^-s` grow so large that their
/// rounding error swamps the value, so `zeta(1 - s)` is used instead.
const REFLECT_BELOW: f64 = -1.0;

pub fn zeta_complex(s: Complex64) -> Result<Complex64> {
    if s.re < REFLECT_BELOW {
        if !(s.re > MIN_RE) {
            return Err(Error::OutOfRange(format!("zeta evaluation needs Re s > {MIN_RE}, got {s}")));
        }
        return Ok(reflect(s));
    }
    zeta_complex_with(s, default_cutoff(s))
}

/// `zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1 - s) zeta(1 - s)`.
fn reflect(s: Complex64) -> Complex64 {
    use std::f64::consts::PI;
    let w = Complex64::new(1.0, 0.0) - s;
    // Trivial zeros exactly.
    if s.im == 0.0 && s.re.fract() == 0.0 && (s.re as i64) % 2 == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let z1 = zeta_complex_with(w, default_cutoff(w)).expect("Re(1 - s) > 2");
    let log_scale = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma(w);
    (s * (PI / 2.0)).sin() * log_scale.exp() * z1
}

/// Lanczos approximation (g = 7, nine terms) to `log Gamma(z)`, `Re z > 0`.
fn ln_gamma(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = z - 1.0;
    let mut a = Complex64::new(COEF[0], 0.0);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `sum_{n < N} n^-s + N^{1-s}/(s-1) + N^-s/2 + sum_k B_2k/(2k)! (s)_{2k-1} N^{-s-2k+1}`.
pub fn zeta_complex_with(s: Complex64, n: usize) -> Result<Complex64> {
    if (s - 1.0).norm() < 1e-15 {
        return Err(Error::Pole("zeta has a pole at s = 1".into()));
    }
    if !(s.re > MIN_RE) {
        return Err(Error::OutOfRange(format!("zeta evaluation needs Re s > {MIN_RE}, got {s}")));
    }
    let n = n.max(2);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_ms = (-s * ln_n).exp();
    sum += n_ms * nf / (s - 1.0) + n_ms * 0.5;
    // (s)(s+1)...(s+2k-2) / (2k)! * N^{-s-2k+1}
    let mut poch = s;
    let mut fact = 2.0;
    let mut pw = n_ms / nf;
    for (k, b) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let j = 2.0 * k as f64;
            poch *= (s + (j - 1.0)) * (s + j);
            fact *= (j + 1.0) * (j + 2.0);
            pw /= nf * nf;
        }
        sum += poch * pw * (*b / fact);
    }
    Ok(sum)
}
