//! Positive-definite integer-valued quadratic forms Q(x) = ½ xᵀAx.

pub mod cholesky;
pub mod enumerate;
pub mod isometry;
pub mod matrix;
pub mod parse;
pub mod reduce;
pub mod theta;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::lcm;
use crate::error::{Error, Result};
use matrix::{adjugate, det, to_i128};

pub use cholesky::{cholesky, CholeskyData};
pub use enumerate::{find_representation, representations};
pub use isometry::{is_isometric, represents_form, Embedding};
pub use reduce::{reduce, reduce_with_transform, successive_minima};
pub use theta::{partial_sum, theta_series, theta_series_with_budget, ThetaSeries};

/// A validated Gram matrix with cached invariants.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GramJson", into = "GramJson")]
pub struct QuadraticForm {
    gram: Vec<Vec<i64>>,
    disc: i128,
    level: u64,
}

#[derive(Serialize, Deserialize)]
struct GramJson {
    gram: Vec<Vec<i64>>,
}

impl TryFrom<GramJson> for QuadraticForm {
    type Error = Error;
    fn try_from(g: GramJson) -> Result<Self> {
        validate_gram(g.gram)
    }
}

impl From<QuadraticForm> for GramJson {
    fn from(q: QuadraticForm) -> Self {
        GramJson { gram: q.gram }
    }
}

/// Checks symmetry, even diagonal and positive-definiteness (in that order) and caches invariants.
///
/// The empty matrix is accepted as the zero lattice.
pub fn validate_gram(gram: Vec<Vec<i64>>) -> Result<QuadraticForm> {
    let r = gram.len();
    if gram.iter().any(|row| row.len() != r) {
        return Err(Error::NotSquare);
    }
    for i in 0..r {
        for j in i + 1..r {
            if gram[i][j] != gram[j][i] {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }
    if let Some(i) = (0..r).find(|&i| gram[i][i] % 2 != 0) {
        return Err(Error::OddDiagonal { index: i });
    }
    let a = to_i128(&gram);
    for k in 1..=r {
        let minor: Vec<Vec<i128>> = a[..k].iter().map(|row| row[..k].to_vec()).collect();
        if det(&minor) <= 0 {
            return Err(Error::NotPositiveDefinite { size: k });
        }
    }
    let disc = det(&a);
    let level = compute_level(&a, disc)?;
    Ok(QuadraticForm { gram, disc, level })
}

fn compute_level(a: &[Vec<i128>], disc: i128) -> Result<u64> {
    if a.is_empty() {
        return Ok(1);
    }
    let adj = adjugate(a);
    let mut n = 1i128;
    for (i, row) in adj.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let m = if i == j { 2 * disc } else { disc };
            n = lcm(n, m / crate::arith::gcd(x, m));
        }
    }
    u64::try_from(n).map_err(|_| Error::Overflow("level"))
}

impl QuadraticForm {
    /// The zero lattice of rank 0.
    pub fn zero() -> Self {
        QuadraticForm { gram: Vec::new(), disc: 1, level: 1 }
    }

    /// Diagonal form Σ cᵢ xᵢ².
    pub fn diagonal(coeffs: &[i64]) -> Result<Self> {
        let r = coeffs.len();
        let gram = (0..r)
            .map(|i| (0..r).map(|j| if i == j { 2 * coeffs[i] } else { 0 }).collect())
            .collect();
        validate_gram(gram)
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// det A.
    pub fn disc(&self) -> i128 {
        self.disc
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// D with θ_Q carrying the character χ_D: (-1)^{r/2} det A for even rank, 2 det A for odd rank.
    pub fn character_disc(&self) -> i128 {
        let r = self.rank();
        if r % 2 == 0 {
            if (r / 2) % 2 == 0 {
                self.disc
            } else {
                -self.disc
            }
        } else {
            2 * self.disc
        }
    }

    /// Q(x).
    pub fn value(&self, x: &[i64]) -> i128 {
        let r = self.rank();
        let mut s = 0i128;
        for i in 0..r {
            s += (self.gram[i][i] / 2) as i128 * (x[i] as i128) * (x[i] as i128);
            for j in i + 1..r {
                s += self.gram[i][j] as i128 * x[i] as i128 * x[j] as i128;
            }
        }
        s
    }

    /// B(x, y) = xᵀAy, so that B(x, x) = 2Q(x).
    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> i128 {
        let mut s = 0i128;
        for (i, row) in self.gram.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                s += a as i128 * x[i] as i128 * y[j] as i128;
            }
        }
        s
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let (r, s) = (self.rank(), other.rank());
        let mut g = vec![vec![0i64; r + s]; r + s];
        for i in 0..r {
            g[i][..r].copy_from_slice(&self.gram[i]);
        }
        for i in 0..s {
            g[r + i][r..].copy_from_slice(&other.gram[i]);
        }
        validate_gram(g).expect("orthogonal sum of positive-definite forms")
    }

    /// Form of the sublattice spanned by the columns of `l`.
    pub fn restrict(&self, l: &[Vec<i64>]) -> Result<QuadraticForm> {
        validate_gram(matrix::congruence(&self.gram, l))
    }

    /// Polynomial rendering with variables x, y, z, w, v, ...
    pub fn to_polynomial(&self) -> String {
        parse::to_polynomial(&self.gram)
    }
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadraticForm({:?})", self.gram)
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_polynomial())
    }
}

impl std::str::FromStr for QuadraticForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse::parse_form(s)
    }
}

pub fn discriminant(q: &QuadraticForm) -> i128 {
    q.disc()
}

pub fn level(q: &QuadraticForm) -> u64 {
    q.level()
}

/// Q* with Gram N·A⁻¹.
pub fn dual_form(q: &QuadraticForm) -> QuadraticForm {
    let a = to_i128(q.gram());
    let adj = adjugate(&a);
    let n = q.level() as i128;
    let g = adj
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| i64::try_from(n * x / q.disc()).expect("dual Gram overflow"))
                .collect()
        })
        .collect();
    validate_gram(g).expect("dual of a positive-definite form")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        let q = validate_gram(vec![vec![2]]).unwrap();
        assert_eq!((q.rank(), q.disc()), (1, 2));
        let q = validate_gram(vec![vec![2, 0, 1], vec![0, 4, 0], vec![1, 0, 10]]).unwrap();
        assert_eq!(q.disc(), 76);
        let q = validate_gram(vec![vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(q.disc(), 3);
        assert_eq!(
            validate_gram(vec![vec![2, 1], vec![0, 2]]),
            Err(Error::NotSymmetric { row: 0, col: 1 })
        );
        assert_eq!(validate_gram(vec![vec![1]]), Err(Error::OddDiagonal { index: 0 }));
        assert_eq!(
            validate_gram(vec![vec![2, 3], vec![3, 2]]),
            Err(Error::NotPositiveDefinite { size: 2 })
        );
    }

    #[test]
    fn levels_and_duals() {
        let q = QuadraticForm::diagonal(&[1, 1, 1, 1]).unwrap();
        assert_eq!((q.disc(), q.level()), (16, 4));
        assert_eq!(dual_form(&q), q);
        let q: QuadraticForm = "x^2+3y^2+xy".parse().unwrap();
        assert_eq!(q.disc(), 11);
    }

    #[test]
    fn json_round_trip() {
        let q: QuadraticForm = serde_json::from_str(r#"{"gram": [[2,1],[1,6]]}"#).unwrap();
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"gram":[[2,1],[1,6]]}"#);
        assert!(serde_json::from_str::<QuadraticForm>(r#"{"gram": [[1]]}"#).is_err());
    }
}
