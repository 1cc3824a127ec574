//! Fincke–Pohst enumeration of lattice points in the ellipsoid Q(x) ≤ B.
//!
//! Coordinates are fixed from the last to the first. Outer levels are pruned with the
//! floating Cholesky box (padded); the innermost coordinate is solved exactly in integers,
//! so no vector is ever accepted or rejected on the basis of a rounded value.

use std::ops::ControlFlow;

use super::{cholesky, matrix, reduce_with_transform, QuadraticForm};
use crate::arith::isqrt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Every x with Q(x) ≤ B, including 0.
    All,
    /// Nonzero x with Q(x) ≤ B whose last nonzero coordinate is positive.
    Half,
    /// Every x with Q(x) = B.
    Exact,
}

pub struct Enumerator {
    a: Vec<Vec<i64>>,
    q: Vec<f64>,
    m: Vec<Vec<f64>>,
}

struct State {
    x: Vec<i64>,
    lin: Vec<i128>,
    cen: Vec<f64>,
}

fn div_floor(a: i128, b: i128) -> i128 {
    let d = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        d - 1
    } else {
        d
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    -div_floor(-a, b)
}

impl Enumerator {
    pub fn new(q: &QuadraticForm) -> Self {
        let (qs, m) = cholesky(q).float_parts();
        Enumerator { a: q.gram().to_vec(), q: qs, m }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// Calls `f(x, Q(x))` for every vector selected by `mode`; stops early on `Break`.
    pub fn walk<F>(&self, bound: i128, mode: Mode, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[i64], i128) -> ControlFlow<()>,
    {
        let r = self.rank();
        if bound < 0 {
            return ControlFlow::Continue(());
        }
        if r == 0 {
            if mode == Mode::All || (mode == Mode::Exact && bound == 0) {
                return f(&[], 0);
            }
            return ControlFlow::Continue(());
        }
        let mut st = State { x: vec![0; r], lin: vec![0; r], cen: vec![0.0; r] };
        self.rec(r - 1, &mut st, 0, 0.0, bound, mode, true, f)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<F>(
        &self,
        i: usize,
        st: &mut State,
        qexact: i128,
        s: f64,
        bound: i128,
        mode: Mode,
        zero_above: bool,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[i64], i128) -> ControlFlow<()>,
    {
        if i == 0 {
            return self.innermost(st, qexact, bound, mode, zero_above, f);
        }
        let bf = bound as f64;
        let pad = 1e-9 * (bf.abs() + 1.0);
        let rem = bf - s;
        if rem < -pad {
            return ControlFlow::Continue(());
        }
        let center = -st.cen[i];
        let rad = (rem.max(0.0) / self.q[i] + pad / self.q[i] + 1e-9).sqrt();
        let mut lo = (center - rad).ceil() as i64;
        let hi = (center + rad).floor() as i64;
        if mode == Mode::Half && zero_above {
            lo = lo.max(0);
        }
        let aii = self.a[i][i] as i128 / 2;
        for xi in lo..=hi {
            let t = xi as f64 - center;
            let s2 = s + self.q[i] * t * t;
            if s2 > bf + pad {
                continue;
            }
            let x128 = xi as i128;
            let q2 = qexact + x128 * st.lin[i] + aii * x128 * x128;
            st.x[i] = xi;
            for k in 0..i {
                st.lin[k] += self.a[k][i] as i128 * x128;
                st.cen[k] += self.m[k][i] * xi as f64;
            }
            let flow = self.rec(i - 1, st, q2, s2, bound, mode, zero_above && xi == 0, f);
            for k in 0..i {
                st.lin[k] -= self.a[k][i] as i128 * x128;
                st.cen[k] -= self.m[k][i] * xi as f64;
            }
            st.x[i] = 0;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn innermost<F>(
        &self,
        st: &mut State,
        c: i128,
        bound: i128,
        mode: Mode,
        zero_above: bool,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[i64], i128) -> ControlFlow<()>,
    {
        // Q = a x² + b x + c with a = A₀₀/2; a x² + b x + c ≤ B  ⇔  (2ax + b)² ≤ b² − 4a(c − B).
        let a = self.a[0][0] as i128 / 2;
        let b = st.lin[0];
        let disc = b * b - 4 * a * (c - bound);
        if disc < 0 {
            return ControlFlow::Continue(());
        }
        let sq = isqrt(disc as u128) as i128;
        match mode {
            Mode::Exact => {
                if sq * sq != disc {
                    return ControlFlow::Continue(());
                }
                let mut roots = vec![];
                for num in [-b - sq, -b + sq] {
                    if num % (2 * a) == 0 {
                        roots.push(num / (2 * a));
                    }
                }
                roots.dedup();
                for x0 in roots {
                    st.x[0] = x0 as i64;
                    f(&st.x, bound)?;
                }
                st.x[0] = 0;
            }
            Mode::All | Mode::Half => {
                let mut lo = div_ceil(-b - sq, 2 * a);
                let hi = div_floor(-b + sq, 2 * a);
                if mode == Mode::Half && zero_above {
                    lo = lo.max(1);
                }
                for x0 in lo..=hi {
                    st.x[0] = x0 as i64;
                    let v = a * x0 * x0 + b * x0 + c;
                    f(&st.x, v)?;
                }
                st.x[0] = 0;
            }
        }
        ControlFlow::Continue(())
    }
}

/// All x ∈ Zʳ with Q(x) = n, sorted lexicographically.
pub fn representations(q: &QuadraticForm, n: u64) -> Vec<Vec<i64>> {
    let (red, u) = reduce_with_transform(q);
    let e = Enumerator::new(&red);
    let mut out = Vec::new();
    let _ = e.walk(n as i128, Mode::Exact, &mut |x, _| {
        out.push(matrix::apply(&u, x));
        ControlFlow::Continue(())
    });
    out.sort();
    out
}

/// Some x with Q(x) = n, if one exists.
pub fn find_representation(q: &QuadraticForm, n: u64) -> Option<Vec<i64>> {
    let (red, u) = reduce_with_transform(q);
    let e = Enumerator::new(&red);
    let mut found = None;
    let _ = e.walk(n as i128, Mode::Exact, &mut |x, _| {
        found = Some(matrix::apply(&u, x));
        ControlFlow::Break(())
    });
    found
}

/// Nonzero vectors with Q(x) ≤ bound, one of each ± pair, in the coordinates of `q`.
pub fn short_vectors(q: &QuadraticForm, bound: u64) -> Vec<(Vec<i64>, u64)> {
    let (red, u) = reduce_with_transform(q);
    let e = Enumerator::new(&red);
    let mut out = Vec::new();
    let _ = e.walk(bound as i128, Mode::Half, &mut |x, v| {
        out.push((matrix::apply(&u, x), v as u64));
        ControlFlow::Continue(())
    });
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::validate_gram;

    #[test]
    fn small_representation_counts() {
        let q = QuadraticForm::diagonal(&[1]).unwrap();
        assert_eq!(representations(&q, 4), vec![vec![-2], vec![2]]);
        let q = validate_gram(vec![vec![2, 0, 1], vec![0, 4, 0], vec![1, 0, 10]]).unwrap();
        assert_eq!(representations(&q, 3).len(), 4);
        for x in representations(&q, 37) {
            assert_eq!(q.value(&x), 37);
        }
    }

    #[test]
    fn half_mode_picks_one_of_each_pair() {
        let q = QuadraticForm::diagonal(&[1, 1]).unwrap();
        let v = short_vectors(&q, 2);
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|(x, n)| q.value(x) as u64 == *n));
    }
}
