//! p-adic invariants, local representability and local densities.

pub mod density;
pub mod eisenstein;
pub mod hilbert;
pub mod jordan;

use serde::{Deserialize, Serialize};

pub use density::{local_density, stability_exponent, DensityTable, DensityValue, PrimeDensity, DENSITY_CSV_HEADER};
pub use eisenstein::{archimedean_density, eisenstein_coefficient, eisenstein_lower_constant, Eisenstein};
pub use hilbert::{epsilon_invariant, hilbert_symbol, is_anisotropic, Place};
pub use jordan::{jordan_splitting, BlockKind, JordanBlock, JordanSplitting};

use crate::arith::{factorize, prime_divisors, valuation};
use crate::forms::QuadraticForm;
use num_traits::Signed;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub place: Place,
    /// Square class of the determinant of a diagonalization, as a representative integer.
    pub disc_class: i128,
    pub epsilon: i32,
    pub anisotropic: bool,
}

pub fn local_invariants(q: &QuadraticForm, place: Place) -> LocalInvariants {
    LocalInvariants {
        place,
        disc_class: hilbert::determinant_class(q),
        epsilon: epsilon_invariant(q, place),
        anisotropic: is_anisotropic(q, place),
    }
}

/// Primes where a form can have nontrivial ε or be anisotropic, together with primes
/// dividing the leading minors (where a diagonalization may have nonunit coefficients).
pub fn relevant_places(q: &QuadraticForm) -> Vec<Place> {
    let mut ps: Vec<u64> = Vec::new();
    for c in hilbert::diagonal_classes(q) {
        for p in prime_divisors(c) {
            if !ps.contains(&p) {
                ps.push(p);
            }
        }
    }
    if !ps.contains(&2) {
        ps.push(2);
    }
    ps.sort_unstable();
    std::iter::once(Place::Infinity).chain(ps.into_iter().map(Place::Prime)).collect()
}

/// Local representability of integers by one form, with densities cached per prime.
pub struct LocalRepresentation {
    table: DensityTable,
    bad: Vec<u64>,
    rank: usize,
}

impl LocalRepresentation {
    pub fn new(q: &QuadraticForm) -> Self {
        let bad = if q.rank() == 0 { Vec::new() } else { prime_divisors(2 * q.disc()) };
        LocalRepresentation { table: DensityTable::new(q), bad, rank: q.rank() }
    }

    pub fn bad_primes(&self) -> &[u64] {
        &self.bad
    }

    pub fn represents(&self, n: u64) -> bool {
        if n == 0 {
            return true;
        }
        if self.rank == 0 {
            return false;
        }
        if !self.bad.iter().all(|&p| self.table.density(n, p).is_positive()) {
            return false;
        }
        if self.rank <= 2 {
            return factorize(n)
                .into_iter()
                .filter(|(p, _)| !self.bad.contains(p))
                .all(|(p, _)| self.table.density(n, p).is_positive());
        }
        true
    }

    /// Local representability at a single prime.
    pub fn represents_at(&self, n: u64, p: u64) -> bool {
        n == 0 || self.table.density(n, p).is_positive()
    }
}

pub fn locally_represents(q: &QuadraticForm, n: u64) -> bool {
    LocalRepresentation::new(q).represents(n)
}

/// Odd residue classes modulo 8 or p² on which local representability is constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeClasses {
    pub p: u64,
    pub modulus: u64,
    /// Residues a mod `modulus` (odd for p = 2, p² ∤ a for odd p) that are represented.
    pub represented: Vec<u64>,
    pub missed: Vec<u64>,
}

/// Locally represented odd classes modulo M = 8·∏_{odd p | disc} p² for a form of rank ≥ 3.
///
/// Classes divisible by p² for an odd p | disc are not covered; such n are decided by
/// [`LocalRepresentation::represents`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareclassProfile {
    pub modulus: u64,
    pub primes: Vec<PrimeClasses>,
}

impl SquareclassProfile {
    /// `Some(flag)` when the class of n is covered.
    pub fn flag(&self, n: u64) -> Option<bool> {
        let mut ok = true;
        for pc in &self.primes {
            let a = n % pc.modulus;
            if pc.p == 2 && a % 2 == 0 || pc.p != 2 && a % (pc.p * pc.p) == 0 {
                return None;
            }
            ok &= pc.represented.contains(&a);
        }
        Some(ok)
    }

    /// Every covered odd residue mod M with its flag.
    pub fn classes(&self) -> Vec<(u64, bool)> {
        (1..self.modulus).step_by(2).filter_map(|a| self.flag(a).map(|f| (a, f))).collect()
    }

    pub fn missed_classes(&self) -> Vec<u64> {
        self.classes().into_iter().filter(|c| !c.1).map(|c| c.0).collect()
    }

    pub fn misses_nothing(&self) -> bool {
        self.primes.iter().all(|pc| pc.missed.is_empty())
    }
}

pub fn locally_missed_classes(q: &QuadraticForm) -> SquareclassProfile {
    let lr = LocalRepresentation::new(q);
    let mut primes = Vec::new();
    let mut modulus = 1u64;
    for &p in lr.bad_primes() {
        let m = if p == 2 { 8 } else { p * p };
        modulus *= m;
        let (mut represented, mut missed) = (Vec::new(), Vec::new());
        for a in 1..m {
            let covered = if p == 2 { a % 2 == 1 } else { valuation(a as i128, p as i128) < 2 };
            if !covered {
                continue;
            }
            // A representative that is odd and has the same p-adic class.
            let n = if p == 2 || a % 2 == 1 { a } else { a + m };
            if lr.represents_at(n, p) {
                represented.push(a);
            } else {
                missed.push(a);
            }
        }
        primes.push(PrimeClasses { p, modulus: m, represented, missed });
    }
    if !primes.iter().any(|pc| pc.p == 2) {
        modulus *= 8;
        primes.insert(0, PrimeClasses { p: 2, modulus: 8, represented: vec![1, 3, 5, 7], missed: Vec::new() });
    }
    SquareclassProfile { modulus, primes }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_formula() {
        for s in ["x^2+y^2+z^2+w^2", "x^2+3y^2+3yz+3yw+5z^2+zw+34w^2", "x^2+2y^2+5z^2+xz", "x^2+xy+3y^2+4z^2+33w^2"] {
            let q: QuadraticForm = s.parse().unwrap();
            let prod: i32 = relevant_places(&q).into_iter().map(|v| epsilon_invariant(&q, v)).product();
            assert_eq!(prod, 1, "{s}");
        }
    }

    #[test]
    fn missed_classes_examples() {
        let q: QuadraticForm = "x^2+3y^2+5z^2+7w^2-3yw".parse().unwrap();
        let lr = LocalRepresentation::new(&q);
        for n in (1..200u64).step_by(2) {
            let expected = !(n % 5 == 0 && matches!((n / 5) % 5, 2 | 3));
            if n % 25 != 0 {
                assert_eq!(lr.represents(n), expected, "n={n}");
            }
        }
        let q: QuadraticForm = "x^2+3y^2+7z^2+9w^2+xy-yw".parse().unwrap();
        let lr = LocalRepresentation::new(&q);
        for n in (1..400u64).step_by(2) {
            let expected = !(n % 7 == 0 && matches!((n / 7) % 7, 3 | 5 | 6));
            if n % 49 != 0 {
                assert_eq!(lr.represents(n), expected, "n={n}");
            }
        }
        let four: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        assert!((0..=100).all(|n| locally_represents(&four, n)));
        assert!(locally_missed_classes(&four).misses_nothing());
    }
}
