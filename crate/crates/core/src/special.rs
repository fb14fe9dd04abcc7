//! Gamma-function helpers.
//!
//! Everything downstream needs gamma *quotients* rather than gamma values, often
//! with arguments in the hundreds or thousands. Quotients of large arguments go
//! through a Stirling difference written with `ln_1p` so that the dominant
//! `z ln z` terms cancel analytically instead of numerically.

use std::f64::consts::PI;

/// Arguments at or above this use the Stirling difference.
const STIRLING_MIN: f64 = 20.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..=8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `sin(pi x)`, exactly zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    // reduce to [-1/2, 1/2]
    let arg = if r <= 0.5 {
        r
    } else if r <= 1.5 {
        1.0 - r
    } else {
        r - 2.0
    };
    (PI * arg).sin()
}

pub fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `ln |Gamma(x)|` together with the sign of `Gamma(x)`.
pub fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

/// Reciprocal gamma function; entire, so it is zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        let (lg, _) = ln_gamma_signed(x);
        return (-lg).exp();
    }
    1.0 / gamma(x)
}

/// Euler beta function `B(a, b)` for positive arguments.
pub fn beta(a: f64, b: f64) -> f64 {
    gamma_ratio(a, a + b) * gamma(b)
}

fn stirling_tail(z: f64) -> f64 {
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let mut acc = 0.0;
    let mut p = zinv;
    for c in STIRLING_COEFFS {
        acc += c * p;
        p *= z2;
    }
    acc
}

/// `ln Gamma(x) - ln Gamma(y)` for `x, y >= 20`.
fn ln_gamma_ratio_stirling(x: f64, y: f64) -> f64 {
    let d = x - y;
    d * y.ln() + (x - 0.5) * (d / y).ln_1p() - d + stirling_tail(x) - stirling_tail(y)
}

/// Shift `z` up by an integer so it lands at or above `STIRLING_MIN`.
/// Returns the shifted argument and `Gamma(shifted) / Gamma(z)` (the rising product).
fn shift_up(z: f64) -> (f64, f64) {
    let mut zz = z;
    let mut prod = 1.0;
    while zz < STIRLING_MIN {
        prod *= zz;
        zz += 1.0;
    }
    (zz, prod)
}

/// `ln (Gamma(x) / Gamma(y))` for positive arguments.
pub fn ln_gamma_ratio(x: f64, y: f64) -> f64 {
    debug_assert!(x > 0.0 && y > 0.0);
    if x == y {
        return 0.0;
    }
    let (xs, px) = shift_up(x);
    let (ys, py) = shift_up(y);
    ln_gamma_ratio_stirling(xs, ys) - px.ln() + py.ln()
}

/// `Gamma(x) / Gamma(y)`.
///
/// Exact integer offsets are reduced to a finite product; large positive
/// arguments use the Stirling difference; everything else goes through
/// `tgamma` with the reciprocal convention at poles of the denominator.
pub fn gamma_ratio(x: f64, y: f64) -> f64 {
    if x == y {
        return 1.0;
    }
    let d = x - y;
    if d.fract() == 0.0 && d.abs() <= 64.0 && !is_nonpositive_integer(x.min(y)) {
        // Gamma(y + m) / Gamma(y) = y (y+1) ... (y+m-1)
        let m = d.abs() as usize;
        let lo = x.min(y);
        let mut prod = 1.0;
        for k in 0..m {
            prod *= lo + k as f64;
        }
        return if d > 0.0 { prod } else { 1.0 / prod };
    }
    if x > 0.0 && y > 0.0 {
        if x.max(y) <= 150.0 && x.min(y) < STIRLING_MIN {
            return gamma(x) / gamma(y);
        }
        let (xs, px) = shift_up(x);
        let (ys, py) = shift_up(y);
        return ln_gamma_ratio_stirling(xs, ys).exp() * (py / px);
    }
    if is_nonpositive_integer(x) {
        return if is_nonpositive_integer(y) {
            // ratio of residues: Gamma(-m)/Gamma(-k) -> (-1)^{m-k} k! / m!
            let m = -x;
            let k = -y;
            let sign = if ((m - k) as i64) % 2 == 0 { 1.0 } else { -1.0 };
            sign * gamma(k + 1.0) / gamma(m + 1.0)
        } else {
            f64::INFINITY
        };
    }
    gamma(x) * rgamma(y)
}

/// `Gamma(y + d) / Gamma(y)` with the offset `d` kept exact.
///
/// Forming `y + d` first rounds away the low bits of `d` once `y` is large,
/// which `gamma_ratio` then amplifies by `ln y`.
pub fn gamma_ratio_offset(y: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    let lo = y.min(y + d);
    if d.fract() == 0.0 || !(lo > 0.0) {
        return gamma_ratio(y + d, y);
    }
    let mut ys = y;
    let mut prod = 1.0;
    while ys.min(ys + d) < STIRLING_MIN {
        prod *= ys / (ys + d);
        ys += 1.0;
    }
    let x = ys + d;
    let ln = d * ys.ln() + (x - 0.5) * (d / ys).ln_1p() - d + stirling_tail(x) - stirling_tail(ys);
    ln.exp() * prod
}

/// Generalised binomial coefficient `C(z, k)` by the falling product.
pub fn binomial(z: f64, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (z - i as f64) / (i as f64 + 1.0);
    }
    acc
}
