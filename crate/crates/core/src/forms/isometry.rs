//! Isometric embeddings by backtracking over short-vector images.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::enumerate::{Enumerator, Mode};
use super::matrix::{self, IMat};
use super::{reduce_with_transform, theta_series, QuadraticForm};

/// L with Lᵀ A_Q L = A_R.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub matrix: IMat,
}

impl Embedding {
    pub fn verify(&self, q: &QuadraticForm, r: &QuadraticForm) -> bool {
        matrix::congruence(q.gram(), &self.matrix) == r.gram()
    }
}

struct Candidate {
    x: Vec<i64>,
    ax: Vec<i64>,
}

/// Finds L' with L'ᵀ A L' = G by backtracking; `a` and `g` should be reduced.
fn embed_reduced(a: &QuadraticForm, g: &[Vec<i64>]) -> Option<IMat> {
    let m = g.len();
    if m == 0 {
        return Some(vec![Vec::new(); a.rank()]);
    }
    let norms: Vec<i64> = (0..m).map(|i| g[i][i] / 2).collect();
    let maxn = *norms.iter().max().unwrap();
    let e = Enumerator::new(a);
    let mut by_norm: std::collections::HashMap<i64, Vec<Candidate>> = Default::default();
    let wanted: std::collections::HashSet<i64> = norms.iter().copied().collect();
    let _ = e.walk(maxn as i128, Mode::Half, &mut |x, v| {
        let v = v as i64;
        if wanted.contains(&v) {
            by_norm.entry(v).or_default().push(Candidate { x: x.to_vec(), ax: matrix::apply(a.gram(), x) });
        }
        ControlFlow::Continue(())
    });
    if norms.iter().any(|n| !by_norm.contains_key(n)) {
        return None;
    }
    // Candidate lists with both signs, except the first vector (−1 is an automorphism).
    let lists: Vec<Vec<(Vec<i64>, Vec<i64>)>> = (0..m)
        .map(|i| {
            let base = &by_norm[&norms[i]];
            let mut out = Vec::with_capacity(base.len() * 2);
            for c in base {
                out.push((c.x.clone(), c.ax.clone()));
                if i > 0 {
                    out.push((c.x.iter().map(|t| -t).collect(), c.ax.iter().map(|t| -t).collect()));
                }
            }
            out
        })
        .collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    if search(&lists, g, &mut chosen) {
        let r = a.rank();
        let mut l = vec![vec![0i64; m]; r];
        for (j, &k) in chosen.iter().enumerate() {
            for i in 0..r {
                l[i][j] = lists[j][k].0[i];
            }
        }
        Some(l)
    } else {
        None
    }
}

fn search(lists: &[Vec<(Vec<i64>, Vec<i64>)>], g: &[Vec<i64>], chosen: &mut Vec<usize>) -> bool {
    let i = chosen.len();
    if i == lists.len() {
        return true;
    }
    'cand: for (k, (x, _)) in lists[i].iter().enumerate() {
        for (j, &kj) in chosen.iter().enumerate() {
            let ax_j = &lists[j][kj].1;
            let b: i64 = ax_j.iter().zip(x).map(|(p, q)| p * q).sum();
            if b != g[j][i] {
                continue 'cand;
            }
        }
        chosen.push(k);
        if search(lists, g, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// An embedding of R into Q, if one exists.
pub fn represents_form(q: &QuadraticForm, r: &QuadraticForm) -> Option<Embedding> {
    if r.rank() > q.rank() {
        return None;
    }
    let (qr, uq) = reduce_with_transform(q);
    let (rr, ur) = reduce_with_transform(r);
    let l = embed_reduced(&qr, rr.gram())?;
    let full = matrix::mul(&matrix::mul(&uq, &l), &matrix::inverse_unimodular(&ur));
    let emb = Embedding { matrix: full };
    debug_assert!(emb.verify(q, r));
    Some(emb)
}

/// U with Uᵀ A₁ U = A₂ when Q₁ ≅ Q₂.
pub fn is_isometric(q1: &QuadraticForm, q2: &QuadraticForm) -> Option<IMat> {
    if q1.rank() != q2.rank() || q1.disc() != q2.disc() {
        return None;
    }
    let (r1, u1) = reduce_with_transform(q1);
    let (r2, u2) = reduce_with_transform(q2);
    let diag = |f: &QuadraticForm| (0..f.rank()).map(|i| f.gram()[i][i] as u64 / 2).max().unwrap_or(0);
    let bound = diag(&r1).max(diag(&r2));
    if theta_series(&r1, bound).ok()? != theta_series(&r2, bound).ok()? {
        return None;
    }
    let l = embed_reduced(&r1, r2.gram())?;
    let u = matrix::mul(&matrix::mul(&u1, &l), &matrix::inverse_unimodular(&u2));
    debug_assert_eq!(matrix::congruence(q1.gram(), &u), q2.gram());
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::validate_gram;

    #[test]
    fn sign_flip_is_isometry() {
        let a = validate_gram(vec![vec![2, 1], vec![1, 6]]).unwrap();
        let b = validate_gram(vec![vec![2, -1], vec![-1, 6]]).unwrap();
        let u = is_isometric(&a, &b).unwrap();
        assert_eq!(matrix::congruence(a.gram(), &u), b.gram());
    }

    #[test]
    fn non_representation() {
        let q: QuadraticForm = "x^2+2y^2".parse().unwrap();
        let r = QuadraticForm::diagonal(&[5]).unwrap();
        assert!(represents_form(&q, &r).is_none());
        let one = QuadraticForm::diagonal(&[1]).unwrap();
        assert!(represents_form(&q, &one).unwrap().verify(&q, &one));
    }
}
