//! Small dense integer matrices.

pub type IMat = Vec<Vec<i64>>;

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j]
                    .checked_mul(m[k][k])
                    .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j])?))
                    .expect("determinant overflow");
                m[i][j] = v / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

pub fn to_i128(a: &[Vec<i64>]) -> Vec<Vec<i128>> {
    a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

/// Adjugate matrix (transpose of the cofactor matrix).
pub fn adjugate(a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| a[r][c]).collect())
                .collect();
            let s = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = s * det(&minor);
        }
    }
    adj
}

pub fn mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IMat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    let mut c = vec![vec![0i64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0i128;
            for t in 0..k {
                s += a[i][t] as i128 * b[t][j] as i128;
            }
            c[i][j] = i64::try_from(s).expect("matrix product overflow");
        }
    }
    c
}

pub fn transpose(a: &[Vec<i64>]) -> IMat {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

/// Lᵀ A L.
pub fn congruence(a: &[Vec<i64>], l: &[Vec<i64>]) -> IMat {
    mul(&transpose(l), &mul(a, l))
}

pub fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

/// Inverse of a unimodular integer matrix.
pub fn inverse_unimodular(u: &[Vec<i64>]) -> IMat {
    let a = to_i128(u);
    let d = det(&a);
    assert!(d == 1 || d == -1, "matrix is not unimodular");
    adjugate(&a)
        .into_iter()
        .map(|r| r.into_iter().map(|x| (x * d) as i64).collect())
        .collect()
}

/// A·x for an integer vector.
pub fn apply(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|r| r.iter().zip(x).map(|(&p, &q)| p * q).sum())
        .collect()
}

/// Rank over Q of a list of integer vectors.
pub fn rank(vectors: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rk = 0;
    for c in 0..ncols {
        let Some(p) = (rk..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(rk, p);
        for i in 0..rows.len() {
            if i != rk && rows[i][c] != 0 {
                let (a, b) = (rows[rk][c], rows[i][c]);
                for j in 0..ncols {
                    rows[i][j] = rows[i][j] * a - rows[rk][j] * b;
                }
                let g = rows[i].iter().fold(0i128, |g, &x| crate::arith::gcd(g, x));
                if g > 1 {
                    rows[i].iter_mut().for_each(|x| *x /= g);
                }
            }
        }
        rk += 1;
    }
    rk
}

/// Primitive integer basis of the kernel of a full-row-rank k×n matrix with k = n-1.
pub fn kernel_vector(rows: &[Vec<i64>]) -> Vec<i64> {
    let n = rows[0].len();
    assert_eq!(rows.len(), n - 1);
    // Generalized cross product: signed maximal minors.
    let mut v = vec![0i128; n];
    for (j, vj) in v.iter_mut().enumerate() {
        let minor: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| (0..n).filter(|&c| c != j).map(|c| r[c] as i128).collect())
            .collect();
        let s = if j % 2 == 0 { 1 } else { -1 };
        *vj = s * det(&minor);
    }
    let g = v.iter().fold(0i128, |g, &x| crate::arith::gcd(g, x));
    v.into_iter()
        .map(|x| i64::try_from(x / g.max(1)).expect("kernel overflow"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_adjugate() {
        let a = vec![vec![2i128, 0, 1], vec![0, 4, 0], vec![1, 0, 10]];
        assert_eq!(det(&a), 76);
        let adj = adjugate(&a);
        for i in 0..3 {
            for j in 0..3 {
                let s: i128 = (0..3).map(|k| a[i][k] * adj[k][j]).sum();
                assert_eq!(s, if i == j { 76 } else { 0 });
            }
        }
    }

    #[test]
    fn kernel_is_orthogonal() {
        let rows = vec![vec![1, 2, 3], vec![0, 1, 4]];
        let v = kernel_vector(&rows);
        for r in &rows {
            assert_eq!(r.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>(), 0);
        }
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
    }
}
