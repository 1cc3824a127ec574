//! Hilbert symbols, ε-invariants and anisotropy over Q_p.

use serde::{Deserialize, Serialize};

use crate::arith::{legendre, split_power};
use crate::forms::QuadraticForm;

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    Infinity,
    Prime(u64),
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

fn eps2(u: i128) -> i32 {
    // (u−1)/2 mod 2 for odd u.
    if u.rem_euclid(4) == 1 {
        0
    } else {
        1
    }
}

fn omega2(u: i128) -> i32 {
    // (u²−1)/8 mod 2 for odd u.
    match u.rem_euclid(8) {
        1 | 7 => 0,
        _ => 1,
    }
}

/// (a, b)_v for nonzero integers a, b.
pub fn hilbert_symbol(a: i128, b: i128, place: Place) -> i32 {
    assert!(a != 0 && b != 0, "Hilbert symbol of zero");
    match place {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let (al, u) = split_power(a, 2);
            let (be, v) = split_power(b, 2);
            let e = eps2(u) * eps2(v) + al as i32 * omega2(v) + be as i32 * omega2(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Prime(p) => {
            let p = p as i128;
            let (al, u) = split_power(a, p);
            let (be, v) = split_power(b, p);
            let mut s = 1;
            if (al * be) % 2 == 1 && p % 4 == 3 {
                s = -s;
            }
            if be % 2 == 1 {
                s *= legendre(u, p);
            }
            if al % 2 == 1 {
                s *= legendre(v, p);
            }
            s
        }
    }
}

/// Whether the nonzero integer a is a square in Q_v.
pub fn is_local_square(a: i128, place: Place) -> bool {
    match place {
        Place::Infinity => a > 0,
        Place::Prime(p) => {
            let (k, u) = split_power(a, p as i128);
            if k % 2 == 1 {
                return false;
            }
            if p == 2 {
                u.rem_euclid(8) == 1
            } else {
                legendre(u, p as i128) == 1
            }
        }
    }
}

/// Integers c_i in the square classes of a rational diagonalization Q ≅ Σ c_i y_i².
///
/// With leading minors m_i of the Gram matrix, the i-th coefficient is m_i/(2 m_{i−1}),
/// whose square class is that of 2·m_i·m_{i−1}.
pub fn diagonal_classes(q: &QuadraticForm) -> Vec<i128> {
    let g = q.gram();
    let r = g.len();
    let mut prev: i128 = 1;
    let mut out = Vec::with_capacity(r);
    for k in 1..=r {
        let sub: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| g[i][j] as i128).collect()).collect();
        let m = crate::forms::matrix::det(&sub);
        out.push(reduce_class(2 * m * prev));
        prev = m;
    }
    out
}

/// Strips square factors p^{2k} for small p, keeping magnitudes bounded.
fn reduce_class(mut a: i128) -> i128 {
    for p in [2i128, 3, 5, 7, 11, 13] {
        while a % (p * p) == 0 {
            a /= p * p;
        }
    }
    a
}

/// ε_v(Q) = ∏_{i<j} (c_i, c_j)_v over a diagonalization.
pub fn epsilon_of_diagonal(c: &[i128], place: Place) -> i32 {
    let mut e = 1;
    for i in 0..c.len() {
        for j in i + 1..c.len() {
            e *= hilbert_symbol(c[i], c[j], place);
        }
    }
    e
}

pub fn epsilon_invariant(q: &QuadraticForm, place: Place) -> i32 {
    epsilon_of_diagonal(&diagonal_classes(q), place)
}

/// Square class (as an integer) of the determinant of the diagonalized form.
pub fn determinant_class(q: &QuadraticForm) -> i128 {
    reduce_class(if q.rank() % 2 == 1 { 2 * q.disc() } else { q.disc() })
}

/// Whether Q(x) = 0 has only the trivial solution over Q_v.
pub fn is_anisotropic(q: &QuadraticForm, place: Place) -> bool {
    anisotropic_diagonal(&diagonal_classes(q), determinant_class(q), place)
}

/// Anisotropy of Σ c_i y_i² with determinant square class d.
pub fn anisotropic_diagonal(c: &[i128], d: i128, place: Place) -> bool {
    if let Place::Infinity = place {
        return true;
    }
    let e = epsilon_of_diagonal(c, place);
    match c.len() {
        0 => false,
        1 => true,
        2 => !is_local_square(-d, place),
        3 => e != hilbert_symbol(-1, -d, place),
        4 => is_local_square(d, place) && e == -hilbert_symbol(-1, -1, place),
        _ => false,
    }
}
