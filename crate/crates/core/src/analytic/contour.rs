//! Perron-type integrals `(1/2 pi i) int_(c) x^s D(s) zeta(s-1) / (s(s-1)) ds`
//! with `D = G_y` (the main-term integral `I_c(x, y)`) or `D = 1`.
//!
//! The integrand is real on the real axis, so the line integral equals
//! `Im(J)/pi` with `J` taken along any upward path from `c`. The path used
//! here climbs the line `Re s = c` to height `T`, runs horizontally to
//! `Re s = c_t` (3 by default) and then continues upward. Past height `T`
//! the Dirichlet series `D(s) zeta(s-1) = sum c_m m^-s` converges absolutely
//! and every term integrates in closed form through `E1`, so no slowly
//! decaying tail is ever sampled. The coefficients are cut at `m <= M` with
//! `M` chosen from the bound `2 G_y(1) x^{c_t} / (pi T^2 M log(M/x))`, using
//! `c_m = m f_y(m) <= m G_y(1)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;

use crate::analytic::expint::e1;
use crate::analytic::quad::integrate;
use crate::analytic::zeta::zeta_complex;
use crate::arith::{c_y_of, enumerate_support_with, euler_g, euler_h};
use crate::error::{Error, Result};
use crate::friable::psi::psi_with;
use crate::friable::saddle::saddle_alpha_with;
use crate::main_term::main_term_corr_with;
use crate::rational::{frac_bernoulli, to_f64, ExactRational};
use crate::sieve::{primes_up_to, PrimeTable};

/// Default truncation height of the sampled part of the path.
pub const DEFAULT_T: f64 = 200.0;
/// Real part of the upper vertical ray.
pub const DEFAULT_C_TAIL: f64 = 3.0;
/// Largest Dirichlet truncation accepted.
pub const DEFAULT_MAX_TERMS: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Real part of the starting vertical line.
    pub c: f64,
    /// Height where the sampled path turns toward `c_tail`.
    pub t_max: f64,
    pub tolerance: f64,
    pub c_tail: f64,
    pub max_terms: usize,
}

impl ContourSpec {
    pub fn new(c: f64, tolerance: f64) -> Self {
        ContourSpec { c, t_max: DEFAULT_T, tolerance, c_tail: DEFAULT_C_TAIL, max_terms: DEFAULT_MAX_TERMS }
    }

    pub fn validate(&self) -> Result<()> {
        if [0.0, 1.0, 2.0].iter().any(|&p| (self.c - p).abs() < 1e-9) || !self.c.is_finite() {
            return Err(Error::Pole(format!("contour through a pole: c = {}", self.c)));
        }
        if !(self.t_max > 1.0) {
            return Err(Error::InvalidInput(format!("T must exceed 1, got {}", self.t_max)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.c_tail > 2.0) {
            return Err(Error::InvalidInput(format!("c_tail must exceed 2, got {}", self.c_tail)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourResult {
    pub value: f64,
    /// Bound on the discarded Dirichlet terms.
    pub tail_bound: f64,
    /// Quadrature error estimate on the sampled path (value units).
    pub quad_error: f64,
    pub dirichlet_terms: usize,
    pub panels: usize,
}

fn tail_bound(x: f64, g1: f64, c_t: f64, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    2.0 * g1 * x.powf(c_t) / (std::f64::consts::PI * t * t * mf * (mf / x).ln())
}

fn choose_terms(x: f64, g1: f64, c_t: f64, spec: &ContourSpec) -> Result<(usize, f64)> {
    let target = spec.tolerance / 10.0;
    let mut m = ((3.0 * x).ceil() as usize).max(64);
    loop {
        let b = tail_bound(x, g1, c_t, spec.t_max, m);
        if b <= target {
            return Ok((m, b));
        }
        if m >= spec.max_terms {
            return Err(Error::TruncationInsufficient { bound: b, tolerance: spec.tolerance });
        }
        m = (m * 2).min(spec.max_terms);
    }
}

/// `sum_m c_m [e^L E1(-L(c_t - 1 + iT)) - E1(-L(c_t + iT))]`, `L = log(x/m)`:
/// the path integral of the Dirichlet terms from `c_t + iT` upward.
fn analytic_tail(x: f64, c_t: f64, t: f64, coeffs: &[f64]) -> Complex64 {
    let z1 = Complex64::new(c_t - 1.0, t);
    let z2 = Complex64::new(c_t, t);
    let mut acc = Complex64::new(0.0, 0.0);
    let lx = x.ln();
    for (i, &cm) in coeffs.iter().enumerate().skip(1) {
        if cm == 0.0 {
            continue;
        }
        let m = i as f64;
        let l = lx - m.ln();
        let term = if l.abs() < 1e-13 {
            -(z1 / z2).ln()
        } else {
            e1(-z1 * l) * (x / m) - e1(-z2 * l)
        };
        acc += term * cm;
    }
    acc
}

/// Shared driver: `D` is the Euler product factor, `coeffs[m]` the Dirichlet
/// coefficients of `D(s) zeta(s-1)`, and `g1` a bound on `c_m / m`.
fn deformed_integral(
    x: f64,
    spec: &ContourSpec,
    d: &dyn Fn(Complex64) -> Complex64,
    coeffs_for: &dyn Fn(usize) -> Vec<f64>,
    g1: f64,
) -> Result<ContourResult> {
    spec.validate()?;
    let c = spec.c;
    let c_t = spec.c_tail.max(c);
    let t = spec.t_max;
    let (m, bound) = choose_terms(x, g1, c_t, spec)?;
    let lx = x.ln();
    let f = |s: Complex64| -> Complex64 {
        let z = zeta_complex(s - 1.0).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        (s * lx).exp() * d(s) * z / (s * (s - 1.0))
    };
    let pi = std::f64::consts::PI;
    // Error budget in J units; the value is Im(J)/pi.
    let budget = pi * spec.tolerance / 10.0;
    let vertical = integrate(|tt| f(Complex64::new(c, tt)) * Complex64::new(0.0, 1.0), 0.0, t, budget, 1.0);
    let horizontal = if c < c_t {
        integrate(|sg| f(Complex64::new(sg, t)), c, c_t, budget, 1.0)
    } else {
        Default::default()
    };
    let coeffs = coeffs_for(m);
    let tail = analytic_tail(x, c_t, t, &coeffs);
    let j = vertical.value + horizontal.value + tail;
    Ok(ContourResult {
        value: j.im / pi,
        tail_bound: bound,
        quad_error: (vertical.error_estimate + horizontal.error_estimate) / pi,
        dirichlet_terms: m,
        panels: vertical.panels + horizontal.panels,
    })
}

/// Closed forms of the two Perron branches.
pub fn perron_expected(x: f64, c: f64) -> Result<f64> {
    if c > 2.0 {
        let n = x.floor();
        Ok(x * n - n * (n + 1.0) / 2.0)
    } else if c > 0.5 && c < 1.0 {
        let fr = x - x.floor();
        Ok(fr * (1.0 - fr) / 2.0)
    } else {
        Err(Error::InvalidInput(format!("c = {c} is outside (1/2, 1) and (2, inf)")))
    }
}

/// `(1/2 pi i) int_(c) zeta(s-1) x^s / (s(s-1)) ds`.
pub fn perron_single(x: f64, c: f64, spec: &ContourSpec) -> Result<ContourResult> {
    if !(x > 0.0) {
        return Err(Error::InvalidInput(format!("x must be positive, got {x}")));
    }
    perron_expected(x, c)?;
    let spec = ContourSpec { c, ..*spec };
    let one = |_s: Complex64| Complex64::new(1.0, 0.0);
    let coeffs = |m: usize| (0..=m).map(|k| k as f64).collect::<Vec<_>>();
    deformed_integral(x, &spec, &one, &coeffs, 1.0)
}

/// `c_m = m f_y(m)` for `m <= bound`, by a multiplicative sieve.
fn gy_zeta_coefficients(table: &PrimeTable, bound: usize) -> Vec<f64> {
    let mut f = vec![1.0f64; bound + 1];
    for &p in table.odd_primes() {
        let p = p as usize;
        if p > bound {
            break;
        }
        let w = (p - 1) as f64 / (p - 2) as f64;
        for k in (p..=bound).step_by(p) {
            f[k] *= w;
        }
    }
    f[0] = 0.0;
    for (k, v) in f.iter_mut().enumerate() {
        *v *= k as f64;
    }
    f
}

fn check_ic_inputs(x: f64, table: &PrimeTable) -> Result<()> {
    if !(x >= 1.0) {
        return Err(Error::InvalidInput(format!("x must be at least 1, got {x}")));
    }
    if table.y() < 3 {
        return Err(Error::InvalidInput(format!("y must be at least 3, got {}", table.y())));
    }
    Ok(())
}

fn g_values(table: &PrimeTable) -> (f64, f64) {
    let g1 = euler_g(Complex64::new(1.0, 0.0), table).re;
    let g2 = euler_g(Complex64::new(2.0, 0.0), table).re;
    (g1, g2)
}

fn ic_on_line(x: f64, table: &PrimeTable, spec: &ContourSpec) -> Result<ContourResult> {
    let (g1, _) = g_values(table);
    let d = |s: Complex64| euler_g(s, table);
    let coeffs = |m: usize| gy_zeta_coefficients(table, m);
    deformed_integral(x, spec, &d, &coeffs, g1)
}

/// `I_c(x, y)` integrated from the line `Re s = c`, `c in (1/2, 1)`.
pub fn contour_i(x: f64, y: u64, spec: &ContourSpec) -> Result<ContourResult> {
    if !(spec.c > 0.5 && spec.c < 1.0) {
        return Err(Error::InvalidInput(format!("I_c needs c in (1/2, 1), got {}", spec.c)));
    }
    let table = primes_up_to(y);
    check_ic_inputs(x, &table)?;
    ic_on_line(x, &table, spec)
}

/// `I_c(x, y)` for `c in (1/2, 1)` via `I_{c_t} - x^2 G_y(2)/2 + x G_y(1)/2`,
/// the residues at `s = 2` and `s = 1` taken exactly.
pub fn contour_i_residue(x: f64, y: u64, spec: &ContourSpec) -> Result<ContourResult> {
    let table = primes_up_to(y);
    check_ic_inputs(x, &table)?;
    let far = ContourSpec { c: spec.c_tail, ..*spec };
    let mut r = ic_on_line(x, &table, &far)?;
    let (g1, g2) = g_values(&table);
    r.value += -x * x * g2 / 2.0 + x * g1 / 2.0;
    Ok(r)
}

/// The exact value `(1/2) sum_n g_y(n) {x/n}(1 - {x/n})` over the support.
pub fn ic_exact(x: &ExactRational, y: u64) -> Result<ExactRational> {
    let table = primes_up_to(y);
    let mut acc = ExactRational::zero();
    for e in enumerate_support_with(&table, None)? {
        let n = BigRational::from_integer(e.n.into());
        acc += e.weight * frac_bernoulli(&(x / n));
    }
    Ok(acc / BigRational::from_integer(2.into()))
}

/// Saddle-line comparison for the integral against friable counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleLineCheck {
    pub x: u64,
    pub y: u64,
    pub alpha: f64,
    /// `I_alpha(x, y)`, exact up to the final float conversion.
    pub integral: f64,
    pub psi: u64,
    pub h_alpha: f64,
    pub zeta_alpha_minus_one: f64,
    /// `H_y(alpha) zeta(alpha - 1)/(alpha - 1) Psi(x, y)`.
    pub predicted: f64,
    pub ratio: f64,
}

/// Compares `I_alpha(x, y)` with `H_y(alpha) zeta(alpha-1)/(alpha-1) Psi(x, y)`.
///
/// `I_alpha` is obtained exactly: for `alpha` in `(1/2, 1)` it equals `I_c`,
/// which is `M(2x, y)/(2 C_y)`; for `alpha` in `(1, 2)` the residue
/// `-x G_y(1)/2` at `s = 1` is added.
pub fn saddle_line_check(x: u64, y: u64) -> Result<SaddleLineCheck> {
    if y < 10 {
        return Err(Error::InvalidInput(format!("saddle line check needs y >= 10, got {y}")));
    }
    if x < y {
        return Err(Error::InvalidInput(format!("saddle line check needs x >= y, got x = {x}, y = {y}")));
    }
    let table = primes_up_to(y);
    let sd = saddle_alpha_with((x as f64).ln(), &table)?;
    let alpha = sd.alpha;
    if !(alpha > 0.5 && alpha < 2.0) || (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::OutOfRange(format!("saddle point alpha = {alpha} outside (1/2, 2)")));
    }
    let m = main_term_corr_with(2 * x, &table);
    let cy = c_y_of(&table);
    let mut integral = to_f64(&(m / (cy * BigRational::from_integer(2.into()))));
    if alpha > 1.0 {
        let (g1, _) = g_values(&table);
        integral -= x as f64 * g1 / 2.0;
    }
    let psi = psi_with(x, &table)?;
    let h_alpha = euler_h(Complex64::new(alpha, 0.0), &table).re;
    let z = zeta_complex(Complex64::new(alpha - 1.0, 0.0))?.re;
    let predicted = h_alpha * z / (alpha - 1.0) * psi as f64;
    Ok(SaddleLineCheck { x, y, alpha, integral, psi, h_alpha, zeta_alpha_minus_one: z, predicted, ratio: integral / predicted })
}
