//! Petersson norm of the cusp part of θ_Q through the dual form.
//!
//! With C* = θ_{Q*} − E* the dual cusp part (an element of S₂⁻), ⟨C, C⟩ = N·⟨C*, C*⟩ and
//!
//!   ⟨C*, C*⟩ = (1/[SL₂(Z) : Γ₀(N)])·Σ_n 2^{ω(gcd(n,N))}·a(n)²/n·Σ_d ψ(d√(n/N)).
//!
//! Terms with n·d² ≤ T are summed explicitly; n ≤ T with n·d² > T are bounded through the ψ
//! majorant; n > T enter as C₂·C²_{Q*} using |a(n)| ≤ C_{Q*}·d(n)·√n.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_k0, BESSEL_REL_ERROR};
use super::newform::gamma0_index;
use super::psi::psi_tail_bound;
use crate::arith::{gcd, is_fundamental_discriminant, isqrt, kronecker, omega};
use crate::error::{Error, Result};
use crate::forms::{dual_form, theta_series, QuadraticForm};
use crate::local::Eisenstein;

/// Default truncation T = 15N.
pub const DEFAULT_TRUNCATION_FACTOR: u64 = 15;
/// d(n)² ≤ 7.0609·n^{3/4} for all n.
pub const DIVISOR_SQUARE_CONSTANT: f64 = 7.0609;

/// b(n) = Σ_{m | n, n/m square} 2^{ω(gcd(m,N))}·a(m)²/m for 1 ≤ n ≤ bound (index 0 is 0).
pub fn rs_coefficients(a: &[f64], level: u64, bound: usize) -> Vec<f64> {
    let mut b = vec![0.0; bound + 1];
    for m in 1..=bound.min(a.len().saturating_sub(1)) {
        if a[m] == 0.0 {
            continue;
        }
        let w = (1u64 << omega(gcd(m as i128, level as i128) as u64)) as f64;
        let t = w * a[m] * a[m] / m as f64;
        let mut k = 1usize;
        while m * k * k <= bound {
            b[m * k * k] += t;
            k += 1;
        }
    }
    b
}

fn check_fundamental(q: &QuadraticForm) -> Result<()> {
    if q.rank() != 4 {
        return Err(Error::WrongRank { expected: 4, found: q.rank() });
    }
    if !is_fundamental_discriminant(q.disc()) {
        return Err(Error::NonFundamentalDiscriminant(q.disc()));
    }
    Ok(())
}

/// a_{C*}(n) = r_{Q*}(n) − a_{E*}(n) for 0 ≤ n ≤ bound, exact.
pub fn dual_cusp_coefficients(q: &QuadraticForm, bound: u64) -> Result<Vec<BigRational>> {
    check_fundamental(q)?;
    let dual = dual_form(q);
    let theta = theta_series(&dual, bound)?;
    let eis = Eisenstein::new(&dual)?;
    Ok((0..=bound)
        .into_par_iter()
        .map(|n| {
            if n == 0 {
                BigRational::zero()
            } else {
                BigRational::from_integer(theta.get(n).into()) - eis.coefficient(n)
            }
        })
        .collect())
}

/// n ≤ bound with gcd(n,N) = 1, χ(n) = 1 and a_{C*}(n) ≠ 0; empty when C* ∈ S₂⁻.
pub fn s2_minus_violations(coeffs: &[BigRational], level: u64, disc: i128) -> Vec<u64> {
    (1..coeffs.len() as u64)
        .filter(|&n| gcd(n as i128, level as i128) == 1 && kronecker(disc, n as i128) == 1)
        .filter(|&n| !coeffs[n as usize].is_zero())
        .collect()
}

/// Interval for ⟨C, C⟩ with every ingredient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeterssonBound {
    pub form: String,
    pub level: u64,
    pub index: f64,
    pub truncation: u64,
    /// Explicit part of ⟨C*, C*⟩ (n·d² ≤ T).
    pub explicit: f64,
    /// Bound for n ≤ T, n·d² > T, already divided by the index.
    pub inner_tail: f64,
    /// Bound for the floating-point error of `explicit` and `inner_tail`.
    pub rounding: f64,
    /// C₁ = explicit + inner tail + rounding.
    pub c1: f64,
    /// n > T contributes at most C₂·C²_{Q*}.
    pub c2: f64,
    /// C₂·C²_{Q*} once C_{Q*} is known.
    pub large_n_tail: Option<f64>,
    /// Lower end for ⟨C, C⟩.
    pub lo: f64,
    /// Upper end for ⟨C, C⟩; includes the n > T term only when `large_n_tail` is set.
    pub hi: f64,
}

impl PeterssonBound {
    /// Fold in C₂·C²_{Q*}.
    pub fn resolve(&mut self, c_q_star_sq: f64) {
        let t = self.c2 * c_q_star_sq;
        self.large_n_tail = Some(t);
        self.hi = self.level as f64 * (self.c1 + t);
    }

    /// ⟨C*, C*⟩ ≤ C₁ + C₂·C²_{Q*}.
    pub fn star_upper(&self, c_q_star_sq: f64) -> f64 {
        self.c1 + self.c2 * c_q_star_sq
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Σ_{d ≥ 1} d^{3/2}·e^{−c(d−1)}, an upper bound for e^{c'}·Σ_d d^{3/2}e^{−c'd} when c' ≥ c.
fn d32_factor(c: f64) -> f64 {
    let mut s = 0.0;
    let mut d = 1.0f64;
    loop {
        let t = d.powf(1.5) * (-c * (d - 1.0)).exp();
        s += t;
        if t < 1e-18 * s {
            // remaining terms are below a geometric series of ratio < 1/2
            return s * (1.0 + 1e-17);
        }
        d += 1.0;
    }
}

/// ∫_T^∞ x^{3/2}·e^{−4π√(x/N)} dx = 2N^{5/2}·∫_{s₀}^∞ s⁴e^{−4πs} ds with s₀ = √(T/N).
pub fn large_n_integral(level: u64, truncation: u64) -> f64 {
    let k = 4.0 * PI;
    let s0 = (truncation as f64 / level as f64).sqrt();
    let mut poly = 0.0;
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
    for j in 0..=4 {
        poly += 24.0 / fact[j] * s0.powi(j as i32) / k.powi(5 - j as i32);
    }
    2.0 * (level as f64).powf(2.5) * (-k * s0).exp() * poly
}

/// C₂ with ⟨C*, C*⟩'s n > T part ≤ C₂·C²_{Q*}.
pub fn large_n_coefficient(level: u64, truncation: u64) -> f64 {
    let n = level as f64;
    let t = truncation as f64;
    let c0 = 4.0 * PI * (t / n).sqrt();
    let per_term = 6.0 * 2f64.sqrt() * d32_factor(c0) * DIVISOR_SQUARE_CONSTANT;
    let w = (1u64 << omega(level)) as f64;
    per_term * w / n.powf(0.75) * (1.0 + 1.0 / t).powf(1.5) * large_n_integral(level, truncation)
        / gamma0_index(level)
}

/// Petersson data from precomputed dual cusp coefficients a_{C*}(n), n ≤ T.
pub fn petersson_from_coefficients(form: &QuadraticForm, coeffs: &[BigRational]) -> PeterssonBound {
    let level = form.level();
    let truncation = coeffs.len() as u64 - 1;
    let nf = level as f64;
    let parts: Vec<(f64, f64, f64)> = (1..=truncation)
        .into_par_iter()
        .map(|n| {
            let a = coeffs[n as usize].to_f64().unwrap_or(f64::NAN);
            if a == 0.0 {
                return (0.0, 0.0, 0.0);
            }
            let w = (1u64 << omega(gcd(n as i128, level as i128) as u64)) as f64;
            let weight = w * a * a / n as f64;
            let x = (n as f64 / nf).sqrt();
            let last = isqrt((truncation / n) as u128) as u64;
            let mut s = 0.0;
            let mut mag = 0.0;
            for d in 1..=last {
                let y = d as f64 * x;
                let b = bessel_k0(4.0 * PI * y).expect("positive argument");
                let t1 = 6.0 / PI * y * b.k1;
                let t2 = 24.0 * y * y * b.k0;
                s += t2 - t1;
                mag += t1 + t2;
            }
            let tail = psi_tail_bound(x, last + 1);
            (weight * s, weight * tail, weight * mag)
        })
        .collect();
    let explicit_raw = pairwise_sum(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let tail_raw = pairwise_sum(&parts.iter().map(|p| p.1).collect::<Vec<_>>());
    let mag: f64 = parts.iter().map(|p| p.2 + p.1).sum();
    let err_rel = BESSEL_REL_ERROR + 64.0 * f64::EPSILON * (truncation as f64).log2().max(1.0);
    let index = gamma0_index(level);
    let explicit = explicit_raw / index;
    let inner_tail = tail_raw / index;
    let rounding = 2.0 * mag * err_rel / index;
    let c1 = explicit + inner_tail + rounding;
    PeterssonBound {
        form: form.to_polynomial(),
        level,
        index,
        truncation,
        explicit,
        inner_tail,
        rounding,
        c1,
        c2: large_n_coefficient(level, truncation),
        large_n_tail: None,
        lo: nf * (explicit - rounding),
        hi: nf * c1,
    }
}

/// Petersson data for ⟨C, C⟩ with truncation T = factor·N.
pub fn petersson_norm_c_with(q: &QuadraticForm, factor: u64) -> Result<PeterssonBound> {
    check_fundamental(q)?;
    let coeffs = dual_cusp_coefficients(q, factor.max(1) * q.level())?;
    Ok(petersson_from_coefficients(q, &coeffs))
}

/// Petersson data for ⟨C, C⟩ with the default truncation 15N.
pub fn petersson_norm_c(q: &QuadraticForm) -> Result<PeterssonBound> {
    petersson_norm_c_with(q, DEFAULT_TRUNCATION_FACTOR)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rs_trivial_support() {
        let mut a = vec![0.0; 50];
        a[1] = 1.0;
        let b = rs_coefficients(&a, 6, 49);
        for n in 1..=49usize {
            let sq = (n as f64).sqrt().round() as usize;
            assert_eq!(b[n], if sq * sq == n { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn rs_matches_divisor_loop() {
        let level = 12u64;
        let a: Vec<f64> = (0..=36).map(|n| if n == 0 { 0.0 } else { ((n * 7) % 5) as f64 - 2.0 }).collect();
        let b = rs_coefficients(&a, level, 36);
        for n in 1..=36u64 {
            let mut s = 0.0;
            for m in 1..=n {
                if n % m != 0 {
                    continue;
                }
                let r = n / m;
                let k = (r as f64).sqrt().round() as u64;
                if k * k != r {
                    continue;
                }
                let w = 2f64.powi(omega(gcd(m as i128, level as i128) as u64) as i32);
                s += w * a[m as usize] * a[m as usize] / m as f64;
            }
            assert!((b[n as usize] - s).abs() < 1e-12);
        }
        let a2: Vec<f64> = a.iter().map(|x| 2.0 * x).collect();
        let b2 = rs_coefficients(&a2, level, 36);
        for n in 1..=36 {
            assert!((b2[n] - 4.0 * b[n]).abs() < 1e-12);
        }
    }

    #[test]
    fn large_n_integral_constant() {
        let n = 6780u64;
        let i = large_n_integral(n, 15 * n) / (n as f64).powf(2.5);
        assert!(i <= 2.85e-20 && i > 2.7e-20, "{i}");
        assert!(d32_factor(4.0 * PI * 15f64.sqrt()) <= 1.000012);
    }

    #[test]
    fn rejects_non_fundamental() {
        let q: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        assert!(matches!(petersson_norm_c(&q), Err(Error::NonFundamentalDiscriminant(16))));
    }
}
