//! Error function and its inverse on `[0, 1)`.

use std::f64::consts::PI;

use crate::error::{invalid, Result};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse of `erf` on `[0, 1)`.
///
/// Newton iteration on `erf(s) - r` with derivative `2/sqrt(pi) exp(-s^2)`,
/// safeguarded by a bisection bracket and seeded from Giles' single-precision
/// rational approximation.
pub fn erfinv(r: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(invalid(format!("erfinv is defined on [0, 1), got {r}")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    while erf(hi) < r {
        hi *= 2.0;
        if hi > 30.0 {
            // erf saturates to 1 long before this.
            return Ok(hi);
        }
    }
    let mut s = seed(r).clamp(lo, hi);
    let scale = 2.0 / PI.sqrt();
    for _ in 0..100 {
        // erfc keeps the residual accurate when r is close to 1.
        let f = if s > 0.5 { (1.0 - r) - erfc(s) } else { erf(s) - r };
        if f == 0.0 {
            return Ok(s);
        }
        if f > 0.0 {
            hi = hi.min(s);
        } else {
            lo = lo.max(s);
        }
        let deriv = scale * (-s * s).exp();
        let mut next = s - f / deriv;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - s).abs();
        s = next;
        if step <= f64::EPSILON * s || hi - lo <= f64::EPSILON * s {
            break;
        }
    }
    Ok(s)
}

fn seed(r: f64) -> f64 {
    let w = -((1.0 - r) * (1.0 + r)).ln();
    if w < 5.0 {
        let w = w - 2.5;
        let mut p = 2.810_226_36e-08;
        p = 3.432_739_39e-07 + p * w;
        p = -3.523_387_7e-06 + p * w;
        p = -4.391_506_54e-06 + p * w;
        p = 0.000_218_580_87 + p * w;
        p = -0.001_253_725_03 + p * w;
        p = -0.004_177_681_64 + p * w;
        p = 0.246_640_727 + p * w;
        p = 1.501_409_41 + p * w;
        p * r
    } else {
        let w = w.sqrt() - 3.0;
        let mut p = -0.000_200_214_257;
        p = 0.000_100_950_558 + p * w;
        p = 0.001_349_343_22 + p * w;
        p = -0.003_673_428_44 + p * w;
        p = 0.005_739_507_73 + p * w;
        p = -0.007_622_461_3 + p * w;
        p = 0.009_438_870_47 + p * w;
        p = 1.001_674_06 + p * w;
        p = 2.832_976_82 + p * w;
        p * r
    }
}
