//! Scalar distribution functions used by the closed-form depth formulas.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function Φ.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), computed without cancellation.
pub fn normal_sf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard Cauchy distribution function.
pub fn cauchy_cdf(x: f64) -> f64 {
    1.0 - cauchy_sf(x)
}

pub fn cauchy_sf(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x > 0.0 {
        (1.0 / x).atan() / PI
    } else {
        0.5 - x.atan() / PI
    }
}

pub fn cauchy_pdf(x: f64) -> f64 {
    1.0 / (PI * (1.0 + x * x))
}

pub fn logistic_pdf(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

pub fn logistic_cdf(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Exact binomial coefficient, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}
