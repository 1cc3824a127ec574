//! The kernel ψ(x) = −(6/π)·x·K₁(4πx) + 24x²·K₀(4πx) and its lattice sums Σ_d ψ(dx).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bessel::bessel_k0;
use crate::error::Result;

/// Arguments y with 4πy beyond this contribute below 10⁻³⁰ relative to ψ near the origin.
const PSI_CUTOFF: f64 = 5.5;

/// ψ(x) for x > 0.
pub fn psi(x: f64) -> Result<f64> {
    let z = 4.0 * PI * x;
    let b = bessel_k0(z)?;
    Ok(-6.0 / PI * x * b.k1 + 24.0 * x * x * b.k0)
}

/// ψ(0⁺) = −3/(2π²).
pub fn psi_at_zero() -> f64 {
    -3.0 / (2.0 * PI * PI)
}

/// 6√2·y^{3/2}·e^{−4πy}, an upper bound for ψ(y).
pub fn psi_majorant(y: f64) -> f64 {
    6.0 * 2f64.sqrt() * y.powf(1.5) * (-4.0 * PI * y).exp()
}

/// Σ_{d ≥ a} d²·e^{−cd} in closed form:
/// e^{−c(a−1)}·(1 + e^c + 2a(e^c − 1) + a²(e^c − 1)²)/(e^c − 1)³.
pub fn d2_exp_tail(a: u64, c: f64) -> f64 {
    let a = a as f64;
    let em1 = c.exp_m1();
    (-c * (a - 1.0)).exp() * (1.0 + c.exp() + 2.0 * a * em1 + a * a * em1 * em1) / (em1 * em1 * em1)
}

/// Upper bound for Σ_{d ≥ a} ψ(dx): with (dx)^{3/2} ≤ (dx)²/√(ax),
/// 6√2·x^{3/2}/√a · Σ_{d ≥ a} d²·e^{−4πxd}.
pub fn psi_tail_bound(x: f64, a: u64) -> f64 {
    if a == 0 {
        return f64::INFINITY;
    }
    6.0 * 2f64.sqrt() * x.powf(1.5) / (a as f64).sqrt() * d2_exp_tail(a, 4.0 * PI * x)
}

/// Σ_{d ≥ 1} ψ(dx) split into an explicit part and a certified tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiSum {
    pub x: f64,
    pub value: f64,
    pub terms: u64,
    pub tail: f64,
}

/// Σ_{d=1}^{D} ψ(dx) with D the first index past the cutoff, plus the bound on d > D.
pub fn psi_sum(x: f64) -> Result<PsiSum> {
    let last = ((PSI_CUTOFF / x).ceil() as u64).max(1);
    let (value, terms) = psi_partial(x, last)?;
    Ok(PsiSum { x, value, terms, tail: psi_tail_bound(x, last + 1) })
}

/// Σ_{d=1}^{last} ψ(dx).
pub fn psi_partial(x: f64, last: u64) -> Result<(f64, u64)> {
    let mut s = 0.0;
    for d in 1..=last {
        s += psi(d as f64 * x)?;
    }
    Ok((s, last))
}

/// −9y²/(π²(4 + y²)^{5/2}).
pub fn psi_fourier(y: f64) -> f64 {
    -9.0 * y * y / (PI * PI * (4.0 + y * y).powf(2.5))
}
