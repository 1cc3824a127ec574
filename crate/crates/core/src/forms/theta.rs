use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::enumerate::{Enumerator, Mode};
use super::{reduce, validate_gram, QuadraticForm};
use crate::error::{Error, Result};

/// Default cap on the estimated number of enumerated vectors.
pub const DEFAULT_VECTOR_BUDGET: u64 = 20_000_000_000;

/// Coefficients r_Q(0..=B).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSeries {
    pub precision: u64,
    pub coeffs: Vec<u64>,
}

impl ThetaSeries {
    pub fn get(&self, n: u64) -> u64 {
        self.coeffs[n as usize]
    }

    pub fn represents(&self, n: u64) -> bool {
        self.coeffs[n as usize] > 0
    }
}

/// Splits a Gram matrix into orthogonal blocks (connected components of the off-diagonal support).
pub fn orthogonal_components(gram: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let r = gram.len();
    let mut seen = vec![false; r];
    let mut comps = Vec::new();
    for s in 0..r {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let mut comp = Vec::new();
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..r {
                if !seen[j] && gram[i][j] != 0 {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Volume estimate of #{x : Q(x) ≤ B}.
pub fn count_estimate(q: &QuadraticForm, bound: u64) -> f64 {
    let r = q.rank() as f64;
    if q.rank() == 0 {
        return 1.0;
    }
    // Volume of the unit r-ball.
    let ln_vol = (r / 2.0) * std::f64::consts::PI.ln() - ln_gamma(r / 2.0 + 1.0);
    // det(A/2) = disc / 2^r.
    let ln_det = (q.disc() as f64).ln() - r * 2f64.ln();
    (ln_vol + (r / 2.0) * (bound.max(1) as f64).ln() - 0.5 * ln_det).exp()
}

fn ln_gamma(x: f64) -> f64 {
    // Half-integers and integers suffice here.
    let mut v = 0.0;
    let mut y = x;
    while y > 1.5 {
        y -= 1.0;
        v += y.ln();
    }
    if (y - 0.5).abs() < 1e-9 {
        v + std::f64::consts::PI.sqrt().ln()
    } else {
        v
    }
}

fn theta_component(q: &QuadraticForm, bound: u64) -> Vec<u64> {
    let red = reduce(q);
    let e = Enumerator::new(&red);
    let mut c = vec![0u64; bound as usize + 1];
    c[0] = 1;
    let _ = e.walk(bound as i128, Mode::Half, &mut |_, v| {
        c[v as usize] += 2;
        ControlFlow::Continue(())
    });
    c
}

fn convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len();
    let nz_a: Vec<(usize, u64)> = a.iter().copied().enumerate().filter(|x| x.1 != 0).collect();
    let nz_b: Vec<(usize, u64)> = b.iter().copied().enumerate().filter(|x| x.1 != 0).collect();
    let (sparse, dense) = if nz_a.len() <= nz_b.len() { (nz_a, b) } else { (nz_b, a) };
    let mut out = vec![0u64; n];
    for (i, x) in sparse {
        for (j, &y) in dense[..n - i].iter().enumerate() {
            if y != 0 {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// r_Q(0..=B) from one enumeration per orthogonal block.
pub fn theta_series_with_budget(q: &QuadraticForm, bound: u64, budget: u64) -> Result<ThetaSeries> {
    let comps = orthogonal_components(q.gram());
    let mut acc: Vec<u64> = vec![0; bound as usize + 1];
    acc[0] = 1;
    let mut sub_forms = Vec::new();
    for comp in &comps {
        let g: Vec<Vec<i64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| q.gram()[i][j]).collect())
            .collect();
        let sub = validate_gram(g).expect("principal block of a positive-definite form");
        let est = count_estimate(&sub, bound);
        if est > budget as f64 {
            return Err(Error::ResourceLimit { estimate: est as u64, budget });
        }
        sub_forms.push(sub);
    }
    for sub in sub_forms {
        let t = theta_component(&sub, bound);
        acc = convolve(&acc, &t);
    }
    Ok(ThetaSeries { precision: bound, coeffs: acc })
}

pub fn theta_series(q: &QuadraticForm, bound: u64) -> Result<ThetaSeries> {
    theta_series_with_budget(q, bound, DEFAULT_VECTOR_BUDGET)
}

/// Σ_{n ≤ x} r_Q(n).
pub fn partial_sum(q: &QuadraticForm, x: u64) -> Result<u64> {
    Ok(theta_series(q, x)?.coeffs.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ternary_prefix() {
        let q: QuadraticForm = "x^2+2y^2+5z^2+xz".parse().unwrap();
        assert_eq!(theta_series(&q, 5).unwrap().coeffs, vec![1, 2, 2, 4, 2, 4]);
        assert_eq!(theta_series(&q, 0).unwrap().coeffs, vec![1]);
    }

    #[test]
    fn components_are_found() {
        let q: QuadraticForm = "x^2+xz+5z^2+2y^2".parse().unwrap();
        assert_eq!(orthogonal_components(q.gram()), vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn empty_form_theta() {
        let t = theta_series(&QuadraticForm::zero(), 4).unwrap();
        assert_eq!(t.coeffs, vec![1, 0, 0, 0, 0]);
    }
}
