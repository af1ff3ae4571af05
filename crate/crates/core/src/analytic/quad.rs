//! Gauss-Legendre panels with adaptive bisection.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Points per panel.
pub const GAUSS_ORDER: usize = 32;

/// Nodes and weights on `[-1, 1]` from Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Recurrence for P_n(x) and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GAUSS_ORDER))
}

/// One panel of the default rule.
pub fn panel<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Complex64 {
    let (x, w) = default_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, wi) in x.iter().zip(w) {
        acc += f(mid + half * xi) * *wi;
    }
    acc * half
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum over accepted panels of `|whole - halves|`.
    pub error_estimate: f64,
    pub panels: usize,
}

/// Integrates over `[a, b]`: first into panels no wider than `max_width`,
/// then bisecting each panel until the whole and the two halves agree to
/// `abs_tol` times the panel's share of the interval.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, abs_tol: f64, max_width: f64) -> Quadrature {
    let len = b - a;
    if len == 0.0 {
        return Quadrature { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, panels: 0 };
    }
    let pieces = (len.abs() / max_width).ceil().max(1.0) as usize;
    let step = len / pieces as f64;
    let mut out = Quadrature { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, panels: 0 };
    for i in 0..pieces {
        let lo = a + step * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + step };
        let whole = panel(&mut f, lo, hi);
        refine(&mut f, lo, hi, whole, abs_tol / pieces as f64, 0, &mut out);
    }
    out
}

const MAX_DEPTH: u32 = 40;

fn refine<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32, out: &mut Quadrature) {
    let m = 0.5 * (a + b);
    let left = panel(f, a, m);
    let right = panel(f, m, b);
    let halves = left + right;
    let diff = (halves - whole).norm();
    if diff <= tol || depth >= MAX_DEPTH {
        out.value += halves;
        out.error_estimate += diff;
        out.panels += 2;
        return;
    }
    refine(f, a, m, left, 0.5 * tol, depth + 1, out);
    refine(f, m, b, right, 0.5 * tol, depth + 1, out);
}
