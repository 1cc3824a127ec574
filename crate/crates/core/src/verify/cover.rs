//! Split local covers R + d·w² inside Q and the table-driven representation test they give.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::arith::{gcd, isqrt};
use crate::error::{Error, Result};
use crate::forms::enumerate::{short_vectors, Enumerator, Mode};
use crate::forms::isometry::Embedding;
use crate::forms::matrix::{self, IMat};
use crate::forms::theta::count_estimate;
use crate::forms::{reduce, reduce_with_transform, QuadraticForm};

/// Maximum number of short vectors tried as the w direction.
const COVER_SEARCH_VECTORS: usize = 4000;

/// A sublattice of Q isometric to R ⊕ ⟨d⟩.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitLocalCover {
    pub r: QuadraticForm,
    pub d: u64,
    /// Columns: a basis of R followed by w, in the coordinates of Q.
    pub witness: Embedding,
}

impl SplitLocalCover {
    /// The cover R ⊕ ⟨d⟩ as a form.
    pub fn form(&self) -> QuadraticForm {
        self.r.direct_sum(&QuadraticForm::diagonal(&[self.d as i64]).expect("positive d"))
    }

    pub fn verify(&self, q: &QuadraticForm) -> bool {
        self.witness.verify(q, &self.form())
    }

    /// Index of the cover lattice in Q.
    pub fn index(&self, q: &QuadraticForm) -> u64 {
        let ratio = self.form().disc() / q.disc();
        isqrt(ratio as u128) as u64
    }

    /// The vector of Q carrying R(y) + d·w².
    pub fn lift(&self, y: &[i64], w: i64) -> Vec<i64> {
        let mut coords = y.to_vec();
        coords.push(w);
        matrix::apply(&self.witness.matrix, &coords)
    }

    /// The cover of an orthogonal sum R ⊕ ⟨d⟩ given in that order.
    pub fn orthogonal(r: &QuadraticForm, d: u64) -> Self {
        let n = r.rank() + 1;
        let cover = SplitLocalCover { r: r.clone(), d, witness: Embedding { matrix: matrix::identity(n) } };
        debug_assert!(cover.verify(&cover.form()));
        cover
    }
}

/// Basis (as columns) of {x ∈ Zʳ : v·x = 0} for a nonzero integer row v.
pub fn row_kernel_basis(v: &[i64]) -> IMat {
    let r = v.len();
    let mut row: Vec<i128> = v.iter().map(|&x| x as i128).collect();
    let mut u: Vec<Vec<i128>> = (0..r).map(|i| (0..r).map(|j| i128::from(i == j)).collect()).collect();
    let pivot = row.iter().position(|&x| x != 0).expect("nonzero row");
    for j in 0..r {
        if j == pivot {
            continue;
        }
        while row[j] != 0 {
            let q = row[pivot] / row[j];
            row[pivot] -= q * row[j];
            for line in u.iter_mut() {
                line[pivot] -= q * line[j];
            }
            row.swap(pivot, j);
            for line in u.iter_mut() {
                line.swap(pivot, j);
            }
        }
    }
    (0..r)
        .map(|i| (0..r).filter(|&j| j != pivot).map(|j| i64::try_from(u[i][j]).expect("kernel entry")).collect())
        .collect()
}

fn cover_along(q: &QuadraticForm, w: &[i64]) -> Option<SplitLocalCover> {
    let r = q.rank();
    let aw = matrix::apply(q.gram(), w);
    let kernel = row_kernel_basis(&aw);
    let raw = q.restrict(&kernel).ok()?;
    let (red, u) = reduce_with_transform(&raw);
    let basis = matrix::mul(&kernel, &u);
    let d = q.value(w) as u64;
    let m: IMat = (0..r).map(|i| basis[i].iter().copied().chain(std::iter::once(w[i])).collect()).collect();
    let cover = SplitLocalCover { r: red, d, witness: Embedding { matrix: m } };
    cover.verify(q).then_some(cover)
}

/// Cover with the smallest index in Q, then the smallest disc(R), then the lexicographically
/// least Gram matrix of R.
pub fn find_split_local_cover(q: &QuadraticForm) -> Result<SplitLocalCover> {
    if q.rank() < 2 {
        return Err(Error::NoCoverFound);
    }
    let red = reduce(q);
    let bound = (0..red.rank()).map(|i| red.gram()[i][i] as u64 / 2).max().unwrap_or(1);
    let mut best: Option<(u64, i128, IMat, SplitLocalCover)> = None;
    for (w, _) in short_vectors(q, bound).into_iter().take(COVER_SEARCH_VECTORS) {
        if w.iter().fold(0i128, |g, &x| gcd(g, x as i128)) != 1 {
            continue;
        }
        let Some(c) = cover_along(q, &w) else { continue };
        let key = (c.index(q), c.r.disc(), c.r.gram().to_vec());
        if best.as_ref().map_or(true, |b| key < (b.0, b.1, b.2.clone())) {
            best = Some((key.0, key.1, key.2, c));
        }
    }
    best.map(|b| b.3).ok_or(Error::NoCoverFound)
}

/// Bitset of the values of R up to a limit.
#[derive(Clone, Debug)]
pub struct CoverTable {
    pub limit: u64,
    bits: Vec<u64>,
}

impl CoverTable {
    pub fn new(r: &QuadraticForm, limit: u64) -> Self {
        let mut bits = vec![0u64; (limit / 64 + 1) as usize];
        bits[0] |= 1;
        let red = reduce(r);
        let e = Enumerator::new(&red);
        let _ = e.walk(limit as i128, Mode::Half, &mut |_, v| {
            bits[(v >> 6) as usize] |= 1 << (v & 63);
            ControlFlow::Continue(())
        });
        CoverTable { limit, bits }
    }

    /// Largest limit ≤ `want` whose enumeration stays within `vector_budget`.
    pub fn affordable_limit(r: &QuadraticForm, want: u64, vector_budget: u64) -> u64 {
        if count_estimate(r, want) <= vector_budget as f64 {
            return want;
        }
        let (mut lo, mut hi) = (0u64, want);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if count_estimate(r, mid) <= vector_budget as f64 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn contains(&self, m: u64) -> bool {
        m <= self.limit && self.bits[(m >> 6) as usize] >> (m & 63) & 1 == 1
    }
}

/// (w, m) with n = m + d·w² and m a tabulated value of R, trying the smallest m first.
pub fn cover_witness(table: &CoverTable, d: u64, n: u64) -> Option<(u64, u64)> {
    let mut w = isqrt((n / d) as u128) as u64;
    loop {
        let m = n - d * w * w;
        if m > table.limit {
            return None;
        }
        if table.contains(m) {
            return Some((w, m));
        }
        if w == 0 {
            return None;
        }
        w -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn kernel_is_orthogonal_and_primitive() {
        for v in [vec![2i64, 0, 1], vec![6, 10, 15], vec![0, 3, 0, 4], vec![-4, 6]] {
            let k = row_kernel_basis(&v);
            assert_eq!(k[0].len(), v.len() - 1);
            for j in 0..v.len() - 1 {
                let dot: i64 = (0..v.len()).map(|i| v[i] * k[i][j]).sum();
                assert_eq!(dot, 0);
            }
            let cols: Vec<Vec<i64>> = (0..v.len() - 1).map(|j| k.iter().map(|row| row[j]).collect()).collect();
            assert_eq!(matrix::rank(&cols), v.len() - 1);
        }
    }

    #[test]
    fn ternary_cover_is_exact_split() {
        let q: QuadraticForm = "x^2+2y^2+5z^2+xz".parse().unwrap();
        let c = find_split_local_cover(&q).unwrap();
        assert_eq!(c.d, 2);
        assert_eq!(c.r, reduce(&"x^2+xy+5y^2".parse::<QuadraticForm>().unwrap()));
        assert_eq!(c.index(&q), 1);
    }

    #[test]
    fn diagonal_cover_drops_largest_coefficient() {
        let q = QuadraticForm::diagonal(&[1, 2, 3, 7]).unwrap();
        let c = find_split_local_cover(&q).unwrap();
        assert_eq!(c.d, 7);
        assert_eq!(c.r, QuadraticForm::diagonal(&[1, 2, 3]).unwrap());
    }

    #[test]
    fn random_lifts_are_representations() {
        let q: QuadraticForm = "x^2+3y^2+3yz+3yw+5z^2+zw+34w^2".parse().unwrap();
        let c = find_split_local_cover(&q).unwrap();
        assert!(c.verify(&q));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let y: Vec<i64> = (0..3).map(|_| rng.gen_range(-20..=20)).collect();
            let w = rng.gen_range(-20..=20);
            let x = c.lift(&y, w);
            assert_eq!(q.value(&x), c.r.value(&y) + c.d as i128 * (w * w) as i128);
        }
    }

    #[test]
    fn table_matches_theta() {
        let r: QuadraticForm = "x^2+xy+5y^2".parse().unwrap();
        let t = CoverTable::new(&r, 3000);
        let th = crate::forms::theta_series(&r, 3000).unwrap();
        for m in 0..=3000 {
            assert_eq!(t.contains(m), th.represents(m), "{m}");
        }
        assert!(!t.contains(3001));
    }

    #[test]
    fn affordable_limit_respects_budget() {
        let r = QuadraticForm::diagonal(&[1, 1, 1]).unwrap();
        let l = CoverTable::affordable_limit(&r, 1 << 40, 1_000_000);
        assert!(count_estimate(&r, l) <= 1e6 && count_estimate(&r, l + 1) > 1e6);
    }
}
