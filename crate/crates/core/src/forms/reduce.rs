//! Basis reduction on Gram matrices: LLL followed by greedy pair and triple moves.

use std::ops::ControlFlow;

use super::enumerate::{Enumerator, Mode};
use super::matrix::{self, IMat};
use super::{validate_gram, QuadraticForm};

struct Work {
    g: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
}

impl Work {
    /// b_k ← b_k − c·b_j.
    fn sub(&mut self, k: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        let r = self.g.len();
        for row in self.u.iter_mut() {
            row[k] -= c * row[j];
        }
        let gkk = self.g[k][k] - 2 * c * self.g[k][j] + c * c * self.g[j][j];
        for t in 0..r {
            if t != k {
                let v = self.g[k][t] - c * self.g[j][t];
                self.g[k][t] = v;
                self.g[t][k] = v;
            }
        }
        self.g[k][k] = gkk;
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.g.swap(i, j);
        for row in self.g.iter_mut() {
            row.swap(i, j);
        }
        for row in self.u.iter_mut() {
            row.swap(i, j);
        }
    }

    fn negate(&mut self, i: usize) {
        let r = self.g.len();
        for t in 0..r {
            if t != i {
                self.g[i][t] = -self.g[i][t];
                self.g[t][i] = -self.g[t][i];
            }
        }
        for row in self.u.iter_mut() {
            row[i] = -row[i];
        }
    }

    fn gram_schmidt(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let r = self.g.len();
        let mut mu = vec![vec![0.0; r]; r];
        let mut bs = vec![0.0; r];
        for i in 0..r {
            for j in 0..i {
                let mut s = self.g[i][j] as f64;
                for k in 0..j {
                    s -= mu[j][k] * mu[i][k] * bs[k];
                }
                mu[i][j] = s / bs[j];
            }
            let mut s = self.g[i][i] as f64;
            for k in 0..i {
                s -= mu[i][k] * mu[i][k] * bs[k];
            }
            bs[i] = s;
        }
        (mu, bs)
    }

    fn lll(&mut self) {
        let r = self.g.len();
        let delta = 0.99;
        let mut k = 1;
        let mut guard = 0u64;
        while k < r {
            guard += 1;
            assert!(guard < 1_000_000, "LLL failed to terminate");
            for j in (0..k).rev() {
                let (mu, _) = self.gram_schmidt();
                let c = mu[k][j].round() as i128;
                self.sub(k, j, c);
            }
            let (mu, bs) = self.gram_schmidt();
            if bs[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bs[k - 1] {
                k += 1;
            } else {
                self.swap(k, k - 1);
                k = (k - 1).max(1);
            }
        }
    }

    fn greedy(&mut self) {
        let r = self.g.len();
        loop {
            let mut changed = false;
            for i in 0..r {
                for j in 0..r {
                    if i == j {
                        continue;
                    }
                    let c = round_div(self.g[i][j], self.g[j][j]);
                    if c != 0 && self.g[j][j] * c * c - 2 * c * self.g[i][j] < 0 {
                        self.sub(i, j, c);
                        changed = true;
                    }
                }
            }
            for i in 0..r {
                for j in 0..r {
                    for k in j + 1..r {
                        if i == j || i == k {
                            continue;
                        }
                        for (sj, sk) in [(1i128, 1i128), (1, -1), (-1, 1), (-1, -1)] {
                            // Norm change of b_i − sj·b_j − sk·b_k.
                            let delta = self.g[j][j] + self.g[k][k] + 2 * sj * sk * self.g[j][k]
                                - 2 * sj * self.g[i][j]
                                - 2 * sk * self.g[i][k];
                            if delta < 0 {
                                self.sub(i, j, sj);
                                self.sub(i, k, sk);
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn normalize(&mut self) {
        let r = self.g.len();
        // Stable sort by norm.
        for i in 1..r {
            let mut j = i;
            while j > 0 && self.g[j - 1][j - 1] > self.g[j][j] {
                self.swap(j - 1, j);
                j -= 1;
            }
        }
        for i in 1..r {
            if let Some(t) = (0..i).find(|&t| self.g[t][i] != 0) {
                if self.g[t][i] < 0 {
                    self.negate(i);
                }
            }
        }
    }
}

fn round_div(a: i128, b: i128) -> i128 {
    (2 * a + b).div_euclid(2 * b)
}

/// Reduced form R and U with R = UᵀAU (columns of U are the new basis in old coordinates).
pub fn reduce_with_transform(q: &QuadraticForm) -> (QuadraticForm, IMat) {
    let r = q.rank();
    let mut w = Work {
        g: matrix::to_i128(q.gram()),
        u: (0..r).map(|i| (0..r).map(|j| i128::from(i == j)).collect()).collect(),
    };
    if r > 1 {
        w.lll();
        w.greedy();
        w.normalize();
    }
    let g: IMat = w
        .g
        .iter()
        .map(|row| row.iter().map(|&x| i64::try_from(x).expect("reduced Gram overflow")).collect())
        .collect();
    let u: IMat = w
        .u
        .iter()
        .map(|row| row.iter().map(|&x| i64::try_from(x).expect("transform overflow")).collect())
        .collect();
    (validate_gram(g).expect("reduction preserves definiteness"), u)
}

pub fn reduce(q: &QuadraticForm) -> QuadraticForm {
    reduce_with_transform(q).0
}

/// Successive minima λ₁ ≤ … ≤ λ_r as values of Q.
pub fn successive_minima(q: &QuadraticForm) -> Vec<u64> {
    let red = reduce(q);
    let r = red.rank();
    if r == 0 {
        return Vec::new();
    }
    let bound = red.gram().iter().enumerate().map(|(i, row)| row[i] / 2).max().unwrap();
    let e = Enumerator::new(&red);
    let mut vecs: Vec<(u64, Vec<i64>)> = Vec::new();
    let _ = e.walk(bound as i128, Mode::Half, &mut |x, v| {
        vecs.push((v as u64, x.to_vec()));
        ControlFlow::Continue(())
    });
    vecs.sort();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    let mut minima = Vec::new();
    for (v, x) in vecs {
        chosen.push(x);
        if matrix::rank(&chosen) == chosen.len() {
            minima.push(v);
            if minima.len() == r {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    minima
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima_examples() {
        let q: QuadraticForm = "x^2+2y^2".parse().unwrap();
        assert_eq!(successive_minima(&q), vec![1, 2]);
        let q: QuadraticForm = "x^2+3y^2+xy".parse().unwrap();
        assert_eq!(successive_minima(&q), vec![1, 3]);
    }

    #[test]
    fn transform_is_consistent() {
        let q = validate_gram(vec![vec![2, 7, 3], vec![7, 30, 11], vec![3, 11, 10]]).unwrap();
        let (r, u) = reduce_with_transform(&q);
        assert_eq!(matrix::congruence(q.gram(), &u), r.gram().to_vec());
        assert_eq!(r.disc(), q.disc());
    }
}
