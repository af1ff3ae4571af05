//! Dickman's `rho`, the tail integral `lambda`, and `xi(u)`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::EULER_GAMMA;

/// Default upper end of the table.
pub const DEFAULT_U_MAX: f64 = 60.0;
/// Default grid step is `2^-STEP_LOG2`.
pub const DEFAULT_STEP_LOG2: u32 = 10;
/// Width of the window `lambda` integrates over; `rho(u) < u^-u` makes the
/// rest invisible.
pub const LAMBDA_WINDOW: f64 = 40.0;

/// `rho` on `[0, 2]`, where it is elementary.
fn rho_elementary(u: f64) -> f64 {
    if u <= 1.0 {
        1.0
    } else {
        1.0 - u.ln()
    }
}

/// `int_0^u rho` for `u <= 2`.
fn cum_elementary(u: f64) -> f64 {
    if u <= 1.0 {
        u.max(0.0)
    } else {
        // int_1^u (1 - ln t) dt = 2(u - 1) - u ln u
        1.0 + 2.0 * (u - 1.0) - u * u.ln()
    }
}

/// `rho` sampled on a uniform grid, with tail integrals.
#[derive(Debug, Clone)]
pub struct DickmanTable {
    step: f64,
    per_unit: usize,
    u_max: f64,
    values: Vec<f64>,
    /// `tail[i] = int_{u_i}^{u_max} rho`, summed from the far end so that it
    /// stays accurate in relative terms.
    tail: Vec<f64>,
}

impl DickmanTable {
    /// Marches `u rho(u) = int_{u-1}^u rho(t) dt` from the exact values on
    /// `[0, 2]`.
    ///
    /// The differential form `u rho' = -rho(u - 1)` admits a slowly decaying
    /// parasitic solution (roughly `1/u`) that swamps `rho` past `u = 11`;
    /// the integral form has none, and every term in it is positive. The
    /// window is re-summed at each step for the same reason.
    pub fn new(step_log2: u32, u_max: f64) -> Self {
        let per_unit = 1usize << step_log2;
        let h = 1.0 / per_unit as f64;
        let n = (u_max * per_unit as f64).ceil() as usize;
        let two = 2 * per_unit;
        let mut values = vec![0.0; n + 1];
        for (i, v) in values.iter_mut().enumerate().take(two.min(n) + 1) {
            *v = rho_elementary(i as f64 * h);
        }
        // cells[k] = int over [u_k, u_{k+1}].
        let mut cells = vec![0.0; n];
        for (k, c) in cells.iter_mut().enumerate().take(two.min(n)) {
            *c = cum_elementary((k + 1) as f64 * h) - cum_elementary(k as f64 * h);
        }
        let inner = |v: &[f64], k: usize| (h / 24.0) * (-v[k - 1] + 13.0 * v[k] + 13.0 * v[k + 1] - v[k + 2]);
        for i in two..n {
            // Cells i-1 and i touch the unknown v[i+1]; the rest are final.
            let mut known: f64 = cells[i + 1 - per_unit..i - 1].iter().sum();
            known += (h / 24.0) * (-values[i - 2] + 13.0 * values[i - 1] + 13.0 * values[i]);
            known += (h / 24.0) * (values[i - 2] - 5.0 * values[i - 1] + 19.0 * values[i]);
            let u1 = (i + 1) as f64 * h;
            values[i + 1] = known / (u1 - h / 3.0);
            cells[i - 1] = inner(&values, i - 1);
        }
        if n > two {
            let i = n - 1;
            cells[i] = (h / 24.0) * (values[i - 2] - 5.0 * values[i - 1] + 19.0 * values[i] + 9.0 * values[i + 1]);
        }
        let mut tail = vec![0.0; n + 1];
        for k in (0..n).rev() {
            tail[k] = tail[k + 1] + cells[k];
        }
        DickmanTable { step: h, per_unit, u_max: n as f64 * h, values, tail }
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }

    /// Grid values; entry `i` is `rho(i * step)`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `rho(u)`, cubic interpolation between grid nodes past `u = 2`.
    pub fn rho(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0 && u <= self.u_max) {
            return Err(Error::OutOfRange(format!("rho({u}) outside [0, {}]", self.u_max)));
        }
        if u <= 2.0 {
            return Ok(rho_elementary(u));
        }
        let n = self.values.len() - 1;
        let x = u * self.per_unit as f64;
        let i = (x.floor() as usize).clamp(1, n - 2);
        let t = x - i as f64;
        let v = &self.values;
        // Lagrange through nodes i-1, i, i+1, i+2 at offset t from node i.
        let w0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w3 = (t + 1.0) * t * (t - 1.0) / 6.0;
        Ok(w0 * v[i - 1] + w1 * v[i] + w2 * v[i + 1] + w3 * v[i + 2])
    }

    /// `int_u^{u_max} rho`, zero past the end of the table.
    pub fn tail(&self, u: f64) -> f64 {
        if u >= self.u_max {
            return 0.0;
        }
        let u = u.max(0.0);
        let i = (u * self.per_unit as f64).floor() as usize;
        let u0 = i as f64 * self.step;
        let d = u - u0;
        if d == 0.0 {
            return self.tail[i];
        }
        // Three-point Gauss on the partial cell.
        let nodes = [-(0.6f64).sqrt(), 0.0, (0.6f64).sqrt()];
        let weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        let mut part = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            let t = u0 + 0.5 * d * (1.0 + x);
            part += w * self.rho(t).unwrap_or(0.0);
        }
        (self.tail[i] - 0.5 * d * part).max(0.0)
    }

    /// `int_0^u rho`, constant past the end of the table.
    pub fn cumulative(&self, u: f64) -> f64 {
        if u <= 2.0 {
            return cum_elementary(u);
        }
        self.tail[0] - self.tail(u)
    }

    /// `int_a^b rho` for `a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.tail(a) - self.tail(b)
    }
}

/// Shared default table (step `2^-10`, up to `u = 60`).
pub fn default_table() -> &'static DickmanTable {
    static TABLE: OnceLock<DickmanTable> = OnceLock::new();
    TABLE.get_or_init(|| DickmanTable::new(DEFAULT_STEP_LOG2, DEFAULT_U_MAX))
}

pub fn dickman_rho(u: f64) -> Result<f64> {
    default_table().rho(u)
}

/// `lambda(u) = e^-gamma int_u^inf rho`, truncated at `u + 40`.
pub fn lambda(u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::OutOfRange(format!("lambda({u}) needs u >= 0")));
    }
    Ok((-EULER_GAMMA).exp() * default_table().integral(u, u + LAMBDA_WINDOW))
}

/// The root `xi > 0` of `e^xi = 1 + u xi` (and `xi(1) = 0`).
///
/// Solved as `expm1(xi)/xi = u`, which is increasing in `xi` and stays
/// well-conditioned as `u -> 1`.
pub fn xi(u: f64) -> Result<f64> {
    if !(u >= 1.0) {
        return Err(Error::OutOfRange(format!("xi({u}) needs u >= 1")));
    }
    if u == 1.0 {
        return Ok(0.0);
    }
    let g = |x: f64| if x == 0.0 { 1.0 - u } else { x.exp_m1() / x - u };
    let mut lo = 0.0f64;
    let mut hi = 2.0 * (u * u.ln() + 2.0).ln() + 4.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
