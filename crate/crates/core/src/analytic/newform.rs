//! Lower bounds for Petersson norms of non-CM newforms and dimensions of S₂(Γ₀(N), χ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, fundamental_part, gcd, is_fundamental_discriminant, kronecker};
use crate::error::{Error, Result};

/// Constant d in the adjoint bound (the 10! of the contour estimate cancels).
pub const ADJOINT_D: f64 = 8.35176e-3;
const X_LOW: f64 = 3989.0;
const X_HIGH: f64 = 330775.0;
const C_LOW: f64 = 1.6;
const C_HIGH: f64 = 1.64;

/// [SL₂(Z) : Γ₀(N)] = N·∏_{p | N}(1 + 1/p).
pub fn gamma0_index(n: u64) -> f64 {
    n as f64 * factorize(n).iter().map(|&(p, _)| 1.0 + 1.0 / p as f64).product::<f64>()
}

/// ∏_{p | N}(1 + 1/p).
pub fn index_factor(n: u64) -> f64 {
    gamma0_index(n) / n as f64
}

/// β = 1 − (5 − 2√6)/(4 log N − 11): no real zero of L(Ad²f, s) lies above β.
pub fn zero_free_beta(n: u64) -> Result<f64> {
    if n < 44 {
        return Err(Error::SmallLevel(n));
    }
    Ok(1.0 - (5.0 - 2.0 * 6f64.sqrt()) / (4.0 * (n as f64).ln() - 11.0))
}

/// Lower bound on L(Ad²f, 1) with every parameter recorded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdjointBound {
    pub level: u64,
    pub beta: f64,
    /// Exponent with x = N^A; `None` when only the fallback applies.
    pub a: Option<f64>,
    pub c: Option<f64>,
    pub optimized: f64,
    pub fallback: f64,
    pub value: f64,
    /// Set for N < 167, where the bound is not certified by the formula alone.
    pub small_level: bool,
}

fn optimal_a(n: f64, beta: f64, c: f64) -> f64 {
    let l = n.ln();
    (4.0 - ((1.0 - beta).ln() + c.ln() - ADJOINT_D.ln() - 2.5f64.ln()) / l) / (beta + 1.5)
}

fn adjoint_at(n: f64, beta: f64, a: f64, c: f64) -> f64 {
    (1.0 - beta) * (c / n.powf(a * (1.0 - beta)) - ADJOINT_D / n.powf(2.5 * a - 4.0))
}

/// max(1/(26 log N), (1−β)(c/N^{A(1−β)} − d/N^{(5/2)A−4})) with the optimal A and the c valid
/// for x = N^A.
pub fn adjoint_lower_bound(n: u64) -> Result<AdjointBound> {
    let beta = zero_free_beta(n)?;
    let nf = n as f64;
    let fallback = 1.0 / (26.0 * nf.ln());
    let mut best: Option<(f64, f64, f64)> = None;
    for (c, lo, hi) in [(C_HIGH, X_HIGH, f64::INFINITY), (C_LOW, X_LOW, X_HIGH)] {
        let mut a = optimal_a(nf, beta, c);
        let x = nf.powf(a);
        if x >= hi {
            continue;
        }
        if x < lo {
            a = lo.ln() / nf.ln();
        }
        let v = adjoint_at(nf, beta, a, c);
        if best.map_or(true, |(_, _, b)| v > b) {
            best = Some((a, c, v));
        }
    }
    let (a, c, optimized) = match best {
        Some((a, c, v)) => (Some(a), Some(c), v),
        None => (None, None, f64::NEG_INFINITY),
    };
    Ok(AdjointBound {
        level: n,
        beta,
        a,
        c,
        optimized,
        fallback,
        value: optimized.max(fallback),
        small_level: n < 167,
    })
}

/// Newform Petersson-norm lower bound and its adjoint input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewformBound {
    pub adjoint: AdjointBound,
    pub index_factor: f64,
    pub value: f64,
}

/// B = L(Ad²f, 1)·3/(8π⁴·∏_{p | N}(1 + 1/p)).
pub fn newform_petersson_lower(n: u64) -> Result<NewformBound> {
    let adjoint = adjoint_lower_bound(n)?;
    let index_factor = index_factor(n);
    let value = adjoint.value * 3.0 / (8.0 * PI.powi(4) * index_factor);
    Ok(NewformBound { adjoint, index_factor, value })
}

/// dim S₂(Γ₀(N), χ) for the even quadratic character χ_D (D = 1 for the trivial character),
/// by the Cohen–Oesterlé formula.
pub fn dim_s2(level: u64, disc: i128) -> Result<u64> {
    let invalid = Error::InvalidCharacter { disc, level };
    if level == 0 || disc <= 0 || (disc != 1 && !is_fundamental_discriminant(disc)) {
        return Err(invalid);
    }
    if level as i128 % disc != 0 {
        return Err(invalid);
    }
    let n = level as i128;
    let f = disc as u64;
    let chi = |x: i128| -> i64 {
        if gcd(x, n) != 1 {
            0
        } else {
            kronecker(disc, x) as i64
        }
    };
    let mut lambda = 1i128;
    for (p, r) in factorize(level) {
        let s = factorize(f).iter().find(|&&(q, _)| q == p).map_or(0, |&(_, e)| e);
        let p = p as i128;
        lambda *= if 2 * s <= r {
            if r % 2 == 0 {
                p.pow(r / 2) + p.pow(r / 2 - 1)
            } else {
                2 * p.pow(r / 2)
            }
        } else {
            2 * p.pow(r - s)
        };
    }
    let mut nu2 = 0i64;
    let mut nu3 = 0i64;
    for x in 0..n {
        if (x * x + 1) % n == 0 {
            nu2 += chi(x);
        }
        if (x * x + x + 1) % n == 0 {
            nu3 += chi(x);
        }
    }
    // 12·dim = idx − 6λ − 3ν₂ − 4ν₃ + 12·[χ trivial]
    let idx: i128 = n * factorize(level).iter().map(|&(p, _)| p as i128 + 1).product::<i128>()
        / factorize(level).iter().map(|&(p, _)| p as i128).product::<i128>();
    let trivial = if fundamental_part(disc).0 == 1 { 12 } else { 0 };
    let twelve = idx - 6 * lambda - 3 * nu2 as i128 - 4 * nu3 as i128 + trivial;
    debug_assert!(twelve % 12 == 0 && twelve >= 0);
    Ok((twelve / 12) as u64)
}
