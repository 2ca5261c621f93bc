//! Scalar closed forms of the symmetric-covariance regime.
//!
//! F is the bound as a function of the signal-to-noise ratio s when the two
//! covariances coincide; G is its inverse, f(D) = 1/G(D) the coefficient of
//! the rank-one witness matrix, and h the per-lambda Chapman-Robbins
//! contrast the whole construction optimizes.

use crate::error::{Error, Result};

/// F(s) = 2 sqrt(s/(s+4)) artanh(sqrt(s/(s+4))), strictly increasing,
/// F(0) = 0, F(s) = s/2 - s^2/12 + O(s^3).
pub fn f_closed(s: f64) -> Result<f64> {
    if s < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "f_closed requires s >= 0, got {s}"
        )));
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let u = (s / (s + 4.0)).sqrt();
    Ok(2.0 * u * u.atanh())
}

/// Inverse of x |-> x tanh x on [0, inf): returns x >= 0 with
/// x tanh(x) = y to near machine precision.
///
/// x tanh x >= x - 1, so [0, max(2, y + 1)] always brackets the root;
/// a Newton iteration seeded at max(sqrt y, y) does the work and falls back
/// to bisection whenever it leaves the bracket.
pub fn g_inverse(y: f64) -> Result<f64> {
    if y < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "g_inverse requires y >= 0, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let h = |x: f64| x * x.tanh() - y;
    let dh = |x: f64| {
        let t = x.tanh();
        let sech2 = 1.0 - t * t;
        t + x * sech2
    };
    let mut lo = 0.0f64;
    let mut hi = 2.0f64.max(y + 1.0);
    let mut x = y.sqrt().max(y).clamp(lo, hi);
    for _ in 0..200 {
        let hx = h(x);
        if hx.abs() <= 1e-15 * y.max(1.0) {
            return Ok(x);
        }
        if hx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = dh(x);
        let newton = x - hx / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(x)
}

/// G(D) = 4 sinh^2(g(D/2)); the inverse of F.
pub fn g_of_d(d: f64) -> Result<f64> {
    if d < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "g_of_d requires D >= 0, got {d}"
        )));
    }
    let y = g_inverse(d / 2.0)?;
    Ok(4.0 * y.sinh().powi(2))
}

/// f(D) = 1/G(D). Returns +inf at D = 0 (the bound degenerates there).
pub fn f_of_d(d: f64) -> Result<f64> {
    if d < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "f_of_d requires D >= 0, got {d}"
        )));
    }
    if d == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / g_of_d(d)?)
}

/// Chapman-Robbins contrast h_lambda(x, y, z) =
/// x^2 / ((1-lambda) y + lambda z + lambda (1-lambda) x^2).
/// Zero numerator wins over a zero denominator; a zero denominator with
/// x != 0 returns the +inf sentinel.
pub fn witness_h(x: f64, y: f64, z: f64, lambda: f64) -> f64 {
    let num = x * x;
    if num == 0.0 {
        return 0.0;
    }
    let den = (1.0 - lambda) * y + lambda * z + lambda * (1.0 - lambda) * num;
    if den <= 0.0 {
        return f64::INFINITY;
    }
    num / den
}

/// Integrand of the bound: lambda s / (1 + lambda (1 - lambda) s).
pub fn bound_integrand(lambda: f64, s: f64) -> f64 {
    lambda * s / (1.0 + lambda * (1.0 - lambda) * s)
}
