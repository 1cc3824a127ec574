//! Exact local densities β_p(n).
//!
//! The form is split over Z_p as Q = Q₀ ⊕ Q₁ with Q₀ the unimodular part. Solutions with
//! x₀ ≢ 0 (mod p) are counted by Hensel lifting from level 1 (odd p) or level 3 (p = 2);
//! solutions with x₀ ≡ 0 replace Q₀ by p²Q₀, and a form divisible by p reduces to
//! β(pQ', m) = p·β(Q', m/p).

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::jordan::{jordan_splitting, BlockKind, JordanBlock};
use crate::arith::{legendre, split_power, valuation};
use crate::forms::QuadraticForm;

/// A finite-place density value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityValue {
    pub p: u64,
    pub n: u64,
    pub value: BigRational,
}

impl DensityValue {
    /// `n,place,num,den`.
    pub fn csv_row(&self) -> String {
        format!("{},{},{},{}", self.n, self.p, self.value.numer(), self.value.denom())
    }
}

pub const DENSITY_CSV_HEADER: &str = "n,place,num,den";

fn pow_rat(p: u64, e: i64) -> BigRational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// Densities of one form at one prime, memoized by (ord_p n, unit residue).
pub struct PrimeDensity {
    p: u64,
    blocks: Vec<JordanBlock>,
    cache: Mutex<HashMap<(u32, u64), BigRational>>,
}

impl PrimeDensity {
    pub fn new(q: &QuadraticForm, p: u64) -> Self {
        PrimeDensity { p, blocks: jordan_splitting(q, p).blocks, cache: Mutex::new(HashMap::new()) }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    fn key(&self, n: u64) -> (u32, u64) {
        let (k, u) = split_power(n as i128, self.p as i128);
        let m = if self.p == 2 { 8 } else { self.p };
        (k, (u as u64) % m)
    }

    /// β_p(n) for n ≥ 1.
    pub fn density(&self, n: u64) -> BigRational {
        assert!(n >= 1, "density needs n >= 1");
        let key = self.key(n);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        let comps: Vec<(u32, BlockKind)> = self.blocks.iter().map(|b| (b.scale, b.kind)).collect();
        let v = beta(self.p, &comps, key.0, key.1);
        self.cache.lock().unwrap().insert(key, v.clone());
        v
    }
}

fn beta(p: u64, comps: &[(u32, BlockKind)], ord: u32, u: u64) -> BigRational {
    if comps.is_empty() {
        return BigRational::zero();
    }
    let s0 = comps.iter().map(|c| c.0).min().unwrap();
    if s0 >= 1 {
        if ord == 0 {
            return BigRational::zero();
        }
        let lowered: Vec<(u32, BlockKind)> = comps.iter().map(|&(s, k)| (s - 1, k)).collect();
        return BigRational::from_integer(BigInt::from(p)) * beta(p, &lowered, ord - 1, u);
    }
    let r0: usize = comps.iter().filter(|c| c.0 == 0).map(|c| dim(c.1)).sum();
    let good = if p == 2 { good_dyadic(comps, ord, u) } else { good_odd(p, comps, ord, u) };
    let raised: Vec<(u32, BlockKind)> = comps.iter().map(|&(s, k)| (if s == 0 { 2 } else { s }, k)).collect();
    good + pow_rat(p, -(r0 as i64)) * beta(p, &raised, ord, u)
}

fn dim(k: BlockKind) -> usize {
    match k {
        BlockKind::Unit(_) => 1,
        _ => 2,
    }
}

/// #{x ∈ F_p^k : Σ u_i x_i² = c} for a nondegenerate diagonal form with determinant d.
pub fn count_diagonal_mod_p(p: u64, k: usize, d: i128, c: i128) -> BigInt {
    let pi = BigInt::from(p);
    let pp = p as i128;
    let c = c.rem_euclid(pp);
    if k == 0 {
        return BigInt::from(u8::from(c == 0));
    }
    let base = pi.pow(k as u32 - 1);
    if k % 2 == 1 {
        let sgn = if ((k - 1) / 2) % 2 == 1 { -1 } else { 1 };
        let eta = legendre(sgn * c * d, pp);
        base + pi.pow((k as u32 - 1) / 2) * eta
    } else {
        let sgn = if (k / 2) % 2 == 1 { -1 } else { 1 };
        let eta = legendre(sgn * d, pp);
        let v: i64 = if c == 0 { p as i64 - 1 } else { -1 };
        base + pi.pow((k as u32 - 2) / 2) * v * eta
    }
}

fn good_odd(p: u64, comps: &[(u32, BlockKind)], ord: u32, u: u64) -> BigRational {
    let units: Vec<i128> = comps
        .iter()
        .filter(|c| c.0 == 0)
        .map(|c| match c.1 {
            BlockKind::Unit(x) => x as i128,
            _ => unreachable!("even blocks occur only at p = 2"),
        })
        .collect();
    let k = units.len();
    let d = units.iter().fold(1i128, |acc, &x| (acc * x).rem_euclid(p as i128));
    let c = if ord == 0 { u as i128 } else { 0 };
    let mut n = count_diagonal_mod_p(p, k, d, c);
    if c == 0 {
        n -= 1;
    }
    BigRational::from_integer(n) * pow_rat(p, 1 - k as i64)
}

/// Value distribution mod 8 of one component over residues mod 8, optionally restricted
/// to even coordinates.
fn dist_mod8(scale: u32, kind: BlockKind, even_only: bool) -> [u64; 8] {
    let mut out = [0u64; 8];
    if scale >= 3 {
        let cnt = match kind {
            BlockKind::Unit(_) => 8u64,
            _ => 64,
        };
        out[0] = if even_only { cnt / dim_pow(kind) } else { cnt };
        return out;
    }
    let s = 1u64 << scale;
    let step = if even_only { 2 } else { 1 };
    match kind {
        BlockKind::Unit(u) => {
            for x in (0..8u64).step_by(step) {
                out[((s * u * x * x) % 8) as usize] += 1;
            }
        }
        BlockKind::Hyperbolic | BlockKind::A2 => {
            for x in (0..8u64).step_by(step) {
                for y in (0..8u64).step_by(step) {
                    let v = if kind == BlockKind::A2 { x * x + x * y + y * y } else { x * y };
                    out[((s * v) % 8) as usize] += 1;
                }
            }
        }
    }
    out
}

fn dim_pow(kind: BlockKind) -> u64 {
    match kind {
        BlockKind::Unit(_) => 2,
        _ => 4,
    }
}

fn cyclic_conv(a: &[u64; 8], b: &[u64; 8]) -> [u64; 8] {
    let mut out = [0u64; 8];
    for i in 0..8 {
        for j in 0..8 {
            out[(i + j) % 8] += a[i] * b[j];
        }
    }
    out
}

fn good_dyadic(comps: &[(u32, BlockKind)], ord: u32, u: u64) -> BigRational {
    let r: usize = comps.iter().map(|c| dim(c.1)).sum();
    let mut all = [0u64; 8];
    all[0] = 1;
    let mut even0 = all;
    for &(s, k) in comps {
        all = cyclic_conv(&all, &dist_mod8(s, k, false));
        even0 = cyclic_conv(&even0, &dist_mod8(s, k, s == 0));
    }
    let m = if ord >= 3 { 0 } else { ((u << ord) % 8) as usize };
    let count = all[m] - even0[m];
    BigRational::from_integer(BigInt::from(count)) * pow_rat(2, 3 * (1 - r as i64))
}

/// β_p(n) for a single (form, p, n).
pub fn local_density(q: &QuadraticForm, n: u64, p: u64) -> DensityValue {
    DensityValue { p, n, value: PrimeDensity::new(q, p).density(n) }
}

/// Modulus exponent beyond which β_p(n) is unchanged by n → n + p^K.
pub fn stability_exponent(q: &QuadraticForm, p: u64) -> u32 {
    1 + 2 * valuation(2 * q.disc(), p as i128)
}

/// Per-form density tables for every prime, shared across threads.
pub struct DensityTable {
    form: QuadraticForm,
    primes: Mutex<HashMap<u64, Arc<PrimeDensity>>>,
}

impl DensityTable {
    pub fn new(form: &QuadraticForm) -> Self {
        DensityTable { form: form.clone(), primes: Mutex::new(HashMap::new()) }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn at(&self, p: u64) -> Arc<PrimeDensity> {
        let mut g = self.primes.lock().unwrap();
        g.entry(p).or_insert_with(|| Arc::new(PrimeDensity::new(&self.form, p))).clone()
    }

    pub fn density(&self, n: u64, p: u64) -> BigRational {
        self.at(p).density(n)
    }
}
