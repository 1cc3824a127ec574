//! Eisenstein coefficients of quaternary theta series as exact rationals.
//!
//! With D = f·m² (f fundamental), the product over p ∤ 2Dn of the unramified densities
//! 1 − χ_f(p)/p² is 1/L(2, χ_f) = f^{3/2}/(π²·B_{2,χ_f}), so that
//!
//!   a_E(n) = 4nf/(m·B_{2,χ_f}) · ∏_{p | 2Dn} β_p(n) / (1 − χ_f(p)/p²).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::density::DensityTable;
use crate::arith::{factorize, fundamental_part, is_squarefree, kronecker, prime_divisors};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;

fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// B_{2,χ_f} = f·Σ_{a=1}^{f} χ_f(a)·B₂(a/f) with B₂(t) = t² − t + 1/6.
pub fn generalized_bernoulli_2(f: i128) -> BigRational {
    let mut s = BigRational::zero();
    for a in 1..=f {
        let c = kronecker(f, a);
        if c == 0 {
            continue;
        }
        let t = rat(a, f);
        let b2 = &t * &t - &t + rat(1, 6);
        s += b2 * BigRational::from_integer(BigInt::from(c));
    }
    s * BigRational::from_integer(BigInt::from(f))
}

/// β_∞(n) = π²n/√D as stated for the normalization Q = ½xᵀAx with D = det A.
pub fn archimedean_density(q: &QuadraticForm, n: u64) -> Result<f64> {
    if q.rank() != 4 {
        return Err(Error::WrongRank { expected: 4, found: q.rank() });
    }
    Ok(std::f64::consts::PI.powi(2) * n as f64 / (q.disc() as f64).sqrt())
}

/// Eisenstein data for a quaternary form.
pub struct Eisenstein {
    table: DensityTable,
    disc: i128,
    f: i128,
    m: i128,
    prefactor: BigRational,
    ramified: Vec<u64>,
}

impl Eisenstein {
    pub fn new(q: &QuadraticForm) -> Result<Self> {
        if q.rank() != 4 {
            return Err(Error::WrongRank { expected: 4, found: q.rank() });
        }
        let disc = q.disc();
        let (f, m) = fundamental_part(disc);
        let b2 = generalized_bernoulli_2(f);
        let prefactor = rat(4 * f, m) / b2;
        Ok(Eisenstein { table: DensityTable::new(q), disc, f, m, prefactor, ramified: prime_divisors(2 * disc) })
    }

    pub fn form(&self) -> &QuadraticForm {
        self.table.form()
    }

    pub fn table(&self) -> &DensityTable {
        &self.table
    }

    /// (f, m) with D = f·m².
    pub fn fundamental(&self) -> (i128, i128) {
        (self.f, self.m)
    }

    /// χ_D(p) for the character attached to the form.
    pub fn chi(&self, p: u64) -> i32 {
        kronecker(self.disc, p as i128)
    }

    fn euler_factor(&self, p: u64) -> BigRational {
        let c = kronecker(self.f, p as i128) as i128;
        BigRational::one() - rat(c, (p * p) as i128)
    }

    fn ramified(&self) -> Vec<u64> {
        self.ramified.clone()
    }

    /// a_E(n), exact.
    pub fn coefficient(&self, n: u64) -> BigRational {
        if n == 0 {
            return BigRational::one();
        }
        let mut primes = self.ramified();
        for (p, _) in factorize(n) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
        let mut v = &self.prefactor * BigRational::from_integer(BigInt::from(n));
        for p in primes {
            if !self.ramified.contains(&p) {
                // p ∤ 2D: β_p(n)/(1 − χ(p)/p²) = Σ_{j ≤ v_p(n)} (χ(p)/p)^j
                let c = self.chi(p) as i128;
                let e = crate::arith::valuation(n as i128, p as i128);
                let mut s = BigRational::one();
                let mut t = BigRational::one();
                for _ in 0..e {
                    t *= rat(c, p as i128);
                    s += &t;
                }
                v *= s;
                continue;
            }
            let b = self.table.density(n, p);
            if b.is_zero() {
                return BigRational::zero();
            }
            v *= b / self.euler_factor(p);
        }
        v
    }

    /// Whether n is represented over every Z_p.
    pub fn locally_represents(&self, n: u64) -> bool {
        n == 0 || self.ramified().into_iter().all(|p| self.table.density(n, p).is_positive())
    }

    /// C_E with a_E(n) ≥ C_E·n·∏_{p | n, χ(p) = −1} (p−1)/(p+1) for odd squarefree locally
    /// represented n.
    ///
    /// A prime p ∤ 2D with p ‖ n contributes (p+1)/p or (p−1)/p to a_E(n)/n, both at least the
    /// factor on the right. The ramified factors depend only on n mod 8 and, for odd p | D,
    /// on ord_p n ∈ {0,1} and the unit square class; the minimum over classes is attained
    /// independently at each prime.
    pub fn lower_constant(&self) -> BigRational {
        let mut c = self.prefactor.clone();
        for p in self.ramified() {
            let classes: Vec<u64> = if p == 2 {
                vec![1, 3, 5, 7]
            } else {
                let nr = (2..p).find(|&a| crate::arith::legendre(a as i128, p as i128) == -1).unwrap();
                vec![1, nr, p, p * nr]
            };
            let best = classes
                .into_iter()
                .map(|n| self.table.density(n, p))
                .filter(|b| b.is_positive())
                .min();
            match best {
                Some(b) => c *= b / self.euler_factor(p),
                None => return BigRational::zero(),
            }
        }
        c
    }

    /// C·n·∏_{p | n, χ(p) = −1} (p−1)/(p+1).
    pub fn lower_bound(&self, c_e: &BigRational, n: u64) -> BigRational {
        let mut v = c_e * BigRational::from_integer(BigInt::from(n));
        for (p, _) in factorize(n) {
            if self.chi(p) == -1 {
                v *= rat(p as i128 - 1, p as i128 + 1);
            }
        }
        v
    }

    /// Odd squarefree locally represented n ≤ limit violating the lower bound.
    pub fn audit_lower_constant(&self, c_e: &BigRational, limit: u64) -> Vec<u64> {
        (1..=limit)
            .step_by(2)
            .filter(|&n| is_squarefree(n) && self.locally_represents(n))
            .filter(|&n| self.coefficient(n) < self.lower_bound(c_e, n))
            .collect()
    }
}

pub fn eisenstein_coefficient(q: &QuadraticForm, n: u64) -> Result<BigRational> {
    Ok(Eisenstein::new(q)?.coefficient(n))
}

pub fn eisenstein_lower_constant(q: &QuadraticForm) -> Result<BigRational> {
    Ok(Eisenstein::new(q)?.lower_constant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(generalized_bernoulli_2(1), rat(1, 6));
        // L(2, χ₅)·... B_{2,χ₅} = 4/5, B_{2,χ₈} = 2, B_{2,χ₁₂} = 4.
        assert_eq!(generalized_bernoulli_2(5), rat(4, 5));
        assert_eq!(generalized_bernoulli_2(8), rat(2, 1));
        assert_eq!(generalized_bernoulli_2(12), rat(4, 1));
    }

    #[test]
    fn archimedean_examples() {
        let q: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((archimedean_density(&q, 1).unwrap() - pi2 / 4.0).abs() < 1e-12);
        assert!((archimedean_density(&q, 3).unwrap() - 3.0 * pi2 / 4.0).abs() < 1e-12);
        let t: QuadraticForm = "x^2+y^2+z^2".parse().unwrap();
        assert!(archimedean_density(&t, 1).is_err());
    }

    fn jacobi(n: u64) -> u64 {
        8 * (1..=n).filter(|d| n % d == 0 && d % 4 != 0).sum::<u64>()
    }

    #[test]
    fn one_class_genera() {
        let q: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        let e = Eisenstein::new(&q).unwrap();
        for n in 1..=50 {
            assert_eq!(e.coefficient(n), BigRational::from_integer(jacobi(n).into()), "n={n}");
        }
        for s in ["x^2+xy+y^2+z^2+zw+w^2", "x^2+y^2+z^2+w^2+xw+yw+zw"] {
            let q: QuadraticForm = s.parse().unwrap();
            let e = Eisenstein::new(&q).unwrap();
            let th = crate::forms::theta_series(&q, 60).unwrap();
            for n in 1..=60u64 {
                assert_eq!(e.coefficient(n), BigRational::from_integer(th.get(n).into()), "{s} n={n}");
            }
        }
    }
}
