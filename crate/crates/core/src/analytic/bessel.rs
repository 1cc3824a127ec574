//! Modified Bessel functions K₀ and K₁ of real positive argument.
//!
//! Power series for x ≤ 2, Steed's continued fraction (CF2, Temme's normalization) above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 2.0;
const EPS: f64 = 1e-17;

/// Relative error bound carried by every evaluation.
pub const BESSEL_REL_ERROR: f64 = 1e-13;

/// K₀(x) and K₁(x) with a relative error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselEval {
    pub x: f64,
    pub k0: f64,
    pub k1: f64,
    pub rel_error: f64,
}

fn series(x: f64) -> (f64, f64) {
    let t = x * x / 4.0;
    let l = (x / 2.0).ln();
    // term = t^k/(k!)², term1 = t^k/(k!(k+1)!)
    let mut term = 1.0;
    let mut term1 = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut i1s = 1.0;
    let mut s0 = 0.0;
    let mut s1 = 2.0 * (-EULER_GAMMA) + 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= t / (k * k);
        term1 *= t / (k * (k + 1.0));
        harmonic += 1.0 / k;
        i0 += term;
        i1s += term1;
        s0 += term * harmonic;
        // ψ(k+1) + ψ(k+2) = 2H_k + 1/(k+1) − 2γ
        s1 += term1 * (2.0 * harmonic + 1.0 / (k + 1.0) - 2.0 * EULER_GAMMA);
        if term < EPS * i0 && term1 < EPS * i1s {
            break;
        }
    }
    let k0 = -(l + EULER_GAMMA) * i0 + s0;
    let i1 = x / 2.0 * i1s;
    let k1 = 1.0 / x + l * i1 - x / 4.0 * s1;
    (k0, k1)
}

fn steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..100_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn eval(x: f64) -> Result<BesselEval> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument(x));
    }
    let (k0, k1) = if x <= SERIES_CUTOFF { series(x) } else { steed(x) };
    Ok(BesselEval { x, k0, k1, rel_error: BESSEL_REL_ERROR })
}

/// K₀(x) (with K₁(x) alongside).
pub fn bessel_k0(x: f64) -> Result<BesselEval> {
    eval(x)
}

/// K₁(x) (with K₀(x) alongside).
pub fn bessel_k1(x: f64) -> Result<BesselEval> {
    eval(x)
}

/// √(π/2x)·e^{−x}, the majorant of K₀ from the integral representation.
pub fn k0_majorant(x: f64) -> f64 {
    (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp()
}
