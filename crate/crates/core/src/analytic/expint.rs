//! Exponential integral `E1(z) = int_z^inf e^-t / t dt` on the principal
//! branch (cut along the negative real axis).

use num_complex::Complex64;

use crate::EULER_GAMMA;

/// Below this modulus the power series is used.
const SERIES_RADIUS: f64 = 4.0;

pub fn e1(z: Complex64) -> Complex64 {
    if z.norm() < SERIES_RADIUS {
        e1_series(z)
    } else {
        e1_continued_fraction(z)
    }
}

/// `-gamma - ln z - sum_{k >= 1} (-z)^k / (k k!)`.
fn e1_series(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / kf;
        let add = term / kf;
        sum += add;
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// `e^-z / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))`, modified Lentz.
fn e1_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-z).exp()
}
