//! Complementary error function and exponentially scaled modified Bessel
//! functions of orders 0 and 1.

use std::f64::consts::PI;

use crate::{Error, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `erfc(x) = 2/√π ∫_x^∞ e^{-t²} dt`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < 1.5 {
        1.0 - erf_series(x)
    } else if x > 0.0 {
        erfc_cf(x)
    } else {
        2.0 - erfc_cf(-x)
    }
}

pub fn erf(x: f64) -> f64 {
    if x.abs() < 1.5 {
        erf_series(x)
    } else {
        1.0 - erfc(x)
    }
}

// erf(x) = 2x/√π e^{-x²} Σ (2x²)^n / (1·3·…·(2n+1)), all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * x * (-x2).exp() * sum
}

// Modified Lentz evaluation of erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))).
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// `e^{-r} I₀(r)` for `r ≥ 0`.
pub fn bessel_i0_scaled(r: f64) -> Result<f64> {
    scaled_bessel(0, r)
}

/// `e^{-r} I₁(r)` for `r ≥ 0`.
pub fn bessel_i1_scaled(r: f64) -> Result<f64> {
    scaled_bessel(1, r)
}

fn scaled_bessel(nu: u32, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("Bessel argument {r} must be nonnegative")));
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    Ok(if r <= 25.0 { series(nu, r) * (-r).exp() } else { asymptotic(nu, r) })
}

// I_ν(r) = Σ (r/2)^{2k+ν} / (k! (k+ν)!)
fn series(nu: u32, r: f64) -> f64 {
    let q = 0.25 * r * r;
    let mut term = if nu == 0 { 1.0 } else { 0.5 * r };
    let mut sum = term;
    let mut k = 0.0;
    while term > 1e-17 * sum {
        k += 1.0;
        term *= q / (k * (k + nu as f64));
        sum += term;
    }
    sum
}

// e^{-r} I_ν(r) ~ (2πr)^{-1/2} Σ (-1)^k a_k(ν) / r^k
fn asymptotic(nu: u32, r: f64) -> f64 {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * k * r);
        if next.abs() >= term.abs() || next.abs() < 1e-17 * sum.abs() {
            sum += next;
            break;
        }
        term = next;
        sum += term;
    }
    sum / (2.0 * PI * r).sqrt()
}

/// `I₁(r)/r`, finite at the origin where it tends to 1/2.
pub fn bessel_i1_over_r_scaled(r: f64) -> Result<f64> {
    if r < 1e-4 {
        if r < 0.0 {
            return Err(Error::InvalidArgument(format!("Bessel argument {r} must be nonnegative")));
        }
        let q = 0.25 * r * r;
        return Ok(0.5 * (1.0 + q / 2.0 + q * q / 12.0) * (-r).exp());
    }
    Ok(bessel_i1_scaled(r)? / r)
}
