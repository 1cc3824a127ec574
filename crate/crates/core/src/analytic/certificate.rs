//! Cusp-constant certificates: C_Q from the Petersson bound, the newform lower bound and the
//! dimension of the cusp space, then the F₄ threshold F = C_Q/C_E.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::f4::{F4Search, F4Summary};
use super::newform::{dim_s2, newform_petersson_lower};
use super::petersson::{petersson_norm_c_with, PeterssonBound, DEFAULT_TRUNCATION_FACTOR};
use crate::arith::{is_fundamental_discriminant, num_divisors};
use crate::error::{Error, Result};
use crate::forms::{theta_series, QuadraticForm};
use crate::local::Eisenstein;

/// Options for [`cusp_constant_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateConfig {
    /// Truncation T = factor·N of the explicit Petersson sum.
    pub truncation_factor: u64,
    /// Compute the largest F₄ candidate and the candidate count.
    pub candidate_summary: bool,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        CertificateConfig { truncation_factor: DEFAULT_TRUNCATION_FACTOR, candidate_summary: true }
    }
}

/// Every intermediate of the cusp-constant bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspConstantCertificate {
    pub form: String,
    pub level: u64,
    pub disc: i128,
    pub u: u64,
    pub beta: f64,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub adjoint_c: Option<f64>,
    pub adjoint_lower: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub c_q_star: f64,
    pub c_q: f64,
    pub c_e: String,
    pub c_e_value: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub petersson: PeterssonBound,
    pub candidates: Option<F4Summary>,
    /// The non-CM newform bound is applied to every newform, CM forms included.
    pub cm_caveat: bool,
    /// Set when N < 167, below the certified range of the adjoint bound.
    pub small_level: bool,
    pub provenance: BTreeMap<String, String>,
}

/// C²_{Q*} ≤ u·C₁/(B − u·C₂), C_Q = √N·C_{Q*}; returns (C_{Q*}, C_Q).
pub fn solve_cusp_constant(u: u64, b: f64, c1: f64, c2: f64, level: u64) -> Result<(f64, f64)> {
    let uf = u as f64;
    let denom = b - uf * c2;
    if !(denom > 0.0) {
        return Err(Error::TailDominates { b, uc2: uf * c2 });
    }
    let star = (uf * c1 / denom).sqrt();
    Ok((star, (level as f64).sqrt() * star))
}

fn provenance() -> BTreeMap<String, String> {
    let entries = [
        ("u", "dim S2(Gamma0(N), chi) by the Cohen-Oesterle formula"),
        ("beta", "1 - (5 - 2*sqrt(6))/(4 log N - 11), real zero-free region of L(Ad^2 f, s)"),
        ("A", "optimal exponent x = N^A in the smoothed sum of L(f x fbar, s)"),
        ("adjoint_lower", "max((1-beta)(c/N^(A(1-beta)) - d/N^(5A/2-4)), 1/(26 log N)), d = 8.35176e-3"),
        ("B", "L(Ad^2 f, 1) * 3/(8 pi^4 prod_{p|N}(1+1/p)), lower bound for non-CM newform norms"),
        ("c1", "explicit sum over n d^2 <= T of 2^omega(gcd(n,N)) a*(n)^2/n psi(d sqrt(n/N)) plus inner tail, over the index"),
        ("c2", "bound for n > T via d(n)^2 <= 7.0609 n^(3/4) and the psi majorant, over the index"),
        ("c_q_star", "C*^2 <= u C1/(B - u C2)"),
        ("c_q", "sqrt(N) * C_Q*"),
        ("c_e", "prefactor times minimum over square classes of beta_p/(1 - chi(p)/p^2) at p | 2N"),
        ("F", "C_Q / C_E"),
    ];
    entries.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

/// Certificate for a quaternary form of fundamental discriminant.
pub fn cusp_constant_with(q: &QuadraticForm, cfg: &CertificateConfig) -> Result<CuspConstantCertificate> {
    if q.rank() != 4 {
        return Err(Error::WrongRank { expected: 4, found: q.rank() });
    }
    if !is_fundamental_discriminant(q.disc()) {
        return Err(Error::NonFundamentalDiscriminant(q.disc()));
    }
    let level = q.level();
    let disc = q.disc();
    let u = dim_s2(level, disc)?;
    let newform = newform_petersson_lower(level)?;
    let mut petersson = petersson_norm_c_with(q, cfg.truncation_factor)?;
    let (c_q_star, c_q) = solve_cusp_constant(u, newform.value, petersson.c1, petersson.c2, level)?;
    petersson.resolve(c_q_star * c_q_star);
    let c_e = Eisenstein::new(q)?.lower_constant();
    let c_e_value = c_e.to_f64().unwrap_or(0.0);
    let f = c_q / c_e_value;
    let candidates = cfg.candidate_summary.then(|| F4Search::new(f, level, disc).summary());
    Ok(CuspConstantCertificate {
        form: q.to_polynomial(),
        level,
        disc,
        u,
        beta: newform.adjoint.beta,
        a: newform.adjoint.a,
        adjoint_c: newform.adjoint.c,
        adjoint_lower: newform.adjoint.value,
        b: newform.value,
        c1: petersson.c1,
        c2: petersson.c2,
        c_q_star,
        c_q,
        c_e: c_e.to_string(),
        c_e_value,
        f,
        petersson,
        candidates,
        cm_caveat: true,
        small_level: newform.adjoint.small_level,
        provenance: provenance(),
    })
}

/// Certificate with the default options.
pub fn cusp_constant(q: &QuadraticForm) -> Result<CuspConstantCertificate> {
    cusp_constant_with(q, &CertificateConfig::default())
}

impl CuspConstantCertificate {
    /// Recompute C_Q from (u, B, C₁, C₂, N).
    pub fn recompute_c_q(&self) -> Result<f64> {
        solve_cusp_constant(self.u, self.b, self.c1, self.c2, self.level).map(|p| p.1)
    }

    /// Whether the stored chain reproduces bit for bit and satisfies C²_{Q*}(B − uC₂) ≤ uC₁.
    pub fn reaudit(&self) -> bool {
        let uf = self.u as f64;
        let consistent = self.c_q_star * self.c_q_star * (self.b - uf * self.c2) <= uf * self.c1 * (1.0 + 1e-12);
        matches!(self.recompute_c_q(), Ok(v) if v.to_bits() == self.c_q.to_bits())
            && consistent
            && (self.f - self.c_q / self.c_e_value).abs() == 0.0
    }
}

/// n ≤ limit with |r_Q(n) − a_E(n)| > C_Q·d(n)·√n.
pub fn audit_cusp_bound(q: &QuadraticForm, c_q: f64, limit: u64) -> Result<Vec<u64>> {
    let theta = theta_series(q, limit)?;
    let eis = Eisenstein::new(q)?;
    Ok((1..=limit)
        .filter(|&n| {
            let c: BigRational = BigRational::from_integer(theta.get(n).into()) - eis.coefficient(n);
            let a = c.abs().to_f64().unwrap_or(f64::INFINITY);
            a > c_q * num_divisors(n) as f64 * (n as f64).sqrt()
        })
        .collect())
}
