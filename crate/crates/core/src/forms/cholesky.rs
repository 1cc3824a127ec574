use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::QuadraticForm;

/// Exact factorization A = Mᵀ·diag(a)·M with M upper unitriangular.
#[derive(Clone, Debug, PartialEq)]
pub struct CholeskyData {
    pub diag: Vec<BigRational>,
    pub unitriangular: Vec<Vec<BigRational>>,
}

pub fn cholesky(q: &QuadraticForm) -> CholeskyData {
    let a = q.gram();
    let r = a.len();
    let int = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut d: Vec<BigRational> = Vec::with_capacity(r);
    let mut m = vec![vec![BigRational::zero(); r]; r];
    for i in 0..r {
        m[i][i] = BigRational::one();
        let mut di = int(a[i][i]);
        for k in 0..i {
            di -= &d[k] * &m[k][i] * &m[k][i];
        }
        for j in i + 1..r {
            let mut s = int(a[i][j]);
            for k in 0..i {
                s -= &d[k] * &m[k][i] * &m[k][j];
            }
            m[i][j] = s / &di;
        }
        d.push(di);
    }
    CholeskyData { diag: d, unitriangular: m }
}

impl CholeskyData {
    /// Mᵀ·diag·M.
    pub fn reconstruct(&self) -> Vec<Vec<BigRational>> {
        let r = self.diag.len();
        let mut out = vec![vec![BigRational::zero(); r]; r];
        for i in 0..r {
            for j in 0..r {
                let mut s = BigRational::zero();
                for k in 0..=i.min(j) {
                    s += &self.unitriangular[k][i] * &self.diag[k] * &self.unitriangular[k][j];
                }
                out[i][j] = s;
            }
        }
        out
    }

    /// Coefficients qᵢ = aᵢ/2 of Q(x) = Σ qᵢ (xᵢ + Σ_{j>i} mᵢⱼ xⱼ)², as floats.
    pub fn float_parts(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let q = self.diag.iter().map(|d| d.to_f64().unwrap() / 2.0).collect();
        let m = self
            .unitriangular
            .iter()
            .map(|row| row.iter().map(|x| x.to_f64().unwrap()).collect())
            .collect();
        (q, m)
    }

    /// ∏ (2√(x/qᵢ) + 1), an upper bound for #{v : Q(v) ≤ x}.
    pub fn box_count_bound(&self, x: f64) -> f64 {
        self.float_parts()
            .0
            .iter()
            .map(|&q| 2.0 * (x / q).sqrt() + 1.0)
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::validate_gram;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn hand_examples() {
        let c = cholesky(&validate_gram(vec![vec![2, 0], vec![0, 6]]).unwrap());
        assert_eq!(c.diag, vec![rat(2, 1), rat(6, 1)]);
        assert_eq!(c.unitriangular[0][1], rat(0, 1));
        let c = cholesky(&validate_gram(vec![vec![2, 1], vec![1, 6]]).unwrap());
        assert_eq!(c.diag, vec![rat(2, 1), rat(11, 2)]);
        assert_eq!(c.unitriangular[0][1], rat(1, 2));
    }
}
