//! Jordan splittings over Z_p.
//!
//! Scales follow the value convention: a component `p^ν·u·x²` has scale ν, and the even
//! 2-adic blocks `2^ν·xy`, `2^ν·(x²+xy+y²)` have scale ν.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::forms::QuadraticForm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    /// u·x² with u a unit: residue mod p (odd p) or mod 8 (p = 2).
    Unit(u64),
    /// x·y.
    Hyperbolic,
    /// x² + xy + y².
    A2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JordanBlock {
    pub scale: u32,
    pub kind: BlockKind,
}

impl JordanBlock {
    pub fn dim(&self) -> usize {
        match self.kind {
            BlockKind::Unit(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JordanSplitting {
    pub p: u64,
    pub blocks: Vec<JordanBlock>,
}

impl JordanSplitting {
    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    /// Integers c_i with Q ≅ Σ c_i y_i² over Q_p.
    pub fn rational_diagonal(&self) -> Vec<i128> {
        let p = self.p as i128;
        let mut out = Vec::new();
        for b in &self.blocks {
            let s = p.pow(b.scale);
            match b.kind {
                BlockKind::Unit(u) => out.push(s * u as i128),
                BlockKind::Hyperbolic => out.extend([s, -s]),
                BlockKind::A2 => out.extend([s, 3 * s]),
            }
        }
        out
    }
}

fn val(x: &BigRational, p: &BigInt) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let mut v = 0i64;
    let mut n = x.numer().clone();
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    let mut d = x.denom().clone();
    while d.is_multiple_of(p) {
        d /= p;
        v -= 1;
    }
    Some(v)
}

/// Unit part of x mod `m`, where x = p^v·a/b with a, b prime to p.
fn unit_residue(x: &BigRational, p: &BigInt, v: i64, m: u64) -> u64 {
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    for _ in 0..v.max(0) {
        n /= p;
    }
    for _ in 0..(-v).max(0) {
        d /= p;
    }
    let mb = BigInt::from(m);
    let nm = n.mod_floor(&mb).to_i128().unwrap();
    let dm = d.mod_floor(&mb).to_i128().unwrap();
    let inv = crate::arith::inv_mod(dm, m as i128);
    ((nm * inv).rem_euclid(m as i128)) as u64
}

/// Jordan splitting of Q at the prime p, sorted by scale.
pub fn jordan_splitting(q: &QuadraticForm, p: u64) -> JordanSplitting {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<BigRational>> = q
        .gram()
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut active: Vec<usize> = (0..a.len()).collect();
    let mut blocks = Vec::new();
    let two = BigRational::from_integer(BigInt::from(2));
    while !active.is_empty() {
        // Minimal valuation among the remaining entries.
        let mut best: Option<(i64, usize, usize)> = None;
        for (ii, &i) in active.iter().enumerate() {
            for &j in &active[ii..] {
                if let Some(v) = val(&a[i][j], &pb) {
                    let better = match best {
                        None => true,
                        Some((bv, bi, bj)) => v < bv || (v == bv && i == j && bi != bj),
                    };
                    if better {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let (v, i, j) = best.expect("nondegenerate form");
        if i != j && p != 2 {
            // b_i ← b_i + b_j makes the diagonal entry of valuation v.
            let n = a.len();
            for t in 0..n {
                let add = a[j][t].clone();
                a[i][t] += add;
            }
            for t in 0..n {
                let add = a[t][j].clone();
                a[t][i] += add;
            }
            continue;
        }
        if i == j {
            let piv = a[i][i].clone();
            let others: Vec<usize> = active.iter().copied().filter(|&t| t != i).collect();
            for &t in &others {
                let c = &a[t][i] / &piv;
                if c.is_zero() {
                    continue;
                }
                eliminate(&mut a, t, &[(i, c)]);
            }
            let value = &piv / &two;
            let vq = val(&value, &pb).unwrap();
            let m = if p == 2 { 8 } else { p };
            blocks.push(JordanBlock { scale: vq as u32, kind: BlockKind::Unit(unit_residue(&value, &pb, vq, m)) });
            active.retain(|&t| t != i);
        } else {
            // 2-adic even block on (i, j).
            let (aii, aij, ajj) = (a[i][i].clone(), a[i][j].clone(), a[j][j].clone());
            let det = &aii * &ajj - &aij * &aij;
            let others: Vec<usize> = active.iter().copied().filter(|&t| t != i && t != j).collect();
            for &t in &others {
                let (bi, bj) = (a[t][i].clone(), a[t][j].clone());
                let ci = (&ajj * &bi - &aij * &bj) / &det;
                let cj = (&aii * &bj - &aij * &bi) / &det;
                eliminate(&mut a, t, &[(i, ci), (j, cj)]);
            }
            let dv = val(&det, &pb).unwrap();
            debug_assert_eq!(dv, 2 * v);
            let cls = unit_residue(&det, &pb, dv, 8);
            let kind = if cls % 8 == 3 { BlockKind::A2 } else { BlockKind::Hyperbolic };
            blocks.push(JordanBlock { scale: v as u32, kind });
            active.retain(|&t| t != i && t != j);
        }
    }
    blocks.sort();
    JordanSplitting { p, blocks }
}

/// b_t ← b_t − Σ c_k b_k.
fn eliminate(a: &mut [Vec<BigRational>], t: usize, coeffs: &[(usize, BigRational)]) {
    let n = a.len();
    for (k, c) in coeffs {
        for s in 0..n {
            let d = c * &a[*k][s];
            a[t][s] -= d;
        }
    }
    for (k, c) in coeffs {
        for s in 0..n {
            let d = c * &a[s][*k];
            a[s][t] -= d;
        }
    }
    debug_assert!(coeffs.iter().all(|(k, _)| a[t][*k].is_zero()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::hilbert::{epsilon_of_diagonal, epsilon_invariant, Place};

    fn unit(scale: u32, u: u64) -> JordanBlock {
        JordanBlock { scale, kind: BlockKind::Unit(u) }
    }

    #[test]
    fn odd_prime_examples() {
        let q: QuadraticForm = "x^2+y^2+z^2+5w^2".parse().unwrap();
        let j = jordan_splitting(&q, 5);
        assert_eq!(j.blocks.iter().map(|b| b.scale).collect::<Vec<_>>(), vec![0, 0, 0, 1]);
        let q: QuadraticForm = "x^2+3y^2+xy".parse().unwrap();
        let j = jordan_splitting(&q, 5);
        assert_eq!(j.blocks.len(), 2);
        assert!(j.blocks.iter().all(|b| b.scale == 0));
    }

    #[test]
    fn dyadic_examples() {
        let q: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        assert_eq!(jordan_splitting(&q, 2).blocks, vec![unit(0, 1); 4]);
        let h = crate::forms::validate_gram(vec![vec![0, 1], vec![1, 0]]);
        assert!(h.is_err());
        let q = crate::forms::validate_gram(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(jordan_splitting(&q, 2).blocks, vec![JordanBlock { scale: 0, kind: BlockKind::A2 }]);
        let q = crate::forms::validate_gram(vec![vec![4, 2], vec![2, 4]]).unwrap();
        assert_eq!(jordan_splitting(&q, 2).blocks, vec![JordanBlock { scale: 1, kind: BlockKind::A2 }]);
        let q = crate::forms::validate_gram(vec![vec![2, 1], vec![1, 4]]).unwrap();
        assert_eq!(jordan_splitting(&q, 2).blocks, vec![JordanBlock { scale: 0, kind: BlockKind::Hyperbolic }]);
        // x² + 3y² at 2: both unit.
        let q: QuadraticForm = "x^2+3y^2".parse().unwrap();
        assert_eq!(jordan_splitting(&q, 2).blocks, vec![unit(0, 1), unit(0, 3)]);
    }

    #[test]
    fn splitting_preserves_epsilon() {
        for s in ["x^2+3y^2+3yz+3yw+5z^2+zw+34w^2", "x^2-xz+2y^2+yz-2yw+5z^2+zw+29w^2", "x^2+xy+3y^2+4z^2+33w^2"] {
            let q: QuadraticForm = s.parse().unwrap();
            for p in [2u64, 3, 5, 7, 11, 113] {
                let j = jordan_splitting(&q, p);
                assert_eq!(j.rank(), 4);
                assert_eq!(epsilon_of_diagonal(&j.rational_diagonal(), Place::Prime(p)), epsilon_invariant(&q, Place::Prime(p)), "{s} at {p}");
            }
        }
    }
}
