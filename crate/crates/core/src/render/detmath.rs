//! Sine and cosine built from IEEE basic operations only.
//!
//! `f64::sin` defers to the platform libm, whose last-ulp behaviour varies
//! between targets. Anything that feeds pixel geometry uses these instead.

use std::f64::consts::PI;

fn sin_poly(x: f64) -> f64 {
    // Taylor series through x^17, |x| <= pi/4.
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    for _ in 0..8 {
        term = -term * x2 / ((n + 1.0) * (n + 2.0));
        sum += term;
        n += 2.0;
    }
    sum
}

fn cos_poly(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    for _ in 0..8 {
        term = -term * x2 / ((n + 1.0) * (n + 2.0));
        sum += term;
        n += 2.0;
    }
    sum
}

/// `(sin, cos)` of an angle given in degrees.
pub fn sin_cos_deg(deg: f64) -> (f64, f64) {
    let mut d = deg - 360.0 * (deg / 360.0).floor();
    if d >= 360.0 {
        d -= 360.0;
    }
    let q = ((d + 45.0) / 90.0).floor();
    let r = d - 90.0 * q;
    let x = r * (PI / 180.0);
    let (s, c) = (sin_poly(x), cos_poly(x));
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}
