//! Escalator trees, truants and critical integers.

pub mod appendix;
pub mod tree;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use appendix::{CONJECTURED_TERNARIES, CRITICAL_INTEGERS, TRUANT_TABLE};
pub use tree::{build_tree, EscalationTree, EscalatorNode, NodeStatus, TreeConfig};

use crate::arith::isqrt;
use crate::error::Result;
use crate::forms::{is_isometric, reduce_with_transform, theta_series, validate_gram, QuadraticForm};

/// The integers a form is asked to represent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum TargetSet {
    #[default]
    OddPositive,
    Positive,
    Explicit(Vec<u64>),
}

impl TargetSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            TargetSet::OddPositive => n % 2 == 1,
            TargetSet::Positive => n >= 1,
            TargetSet::Explicit(v) => v.binary_search(&n).is_ok(),
        }
    }

    /// Members ≤ bound in increasing order.
    pub fn up_to(&self, bound: u64) -> Vec<u64> {
        match self {
            TargetSet::OddPositive => (1..=bound).step_by(2).collect(),
            TargetSet::Positive => (1..=bound).collect(),
            TargetSet::Explicit(v) => v.iter().copied().filter(|&n| n <= bound).collect(),
        }
    }

    /// Normalizes explicit sets (sorted, deduplicated, positive).
    pub fn explicit(mut v: Vec<u64>) -> Self {
        v.retain(|&n| n > 0);
        v.sort_unstable();
        v.dedup();
        TargetSet::Explicit(v)
    }
}

/// Result of a truant search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Truant {
    Found { t: u64 },
    NoneUpTo { bound: u64 },
}

impl Truant {
    pub fn value(&self) -> Option<u64> {
        match self {
            Truant::Found { t } => Some(*t),
            Truant::NoneUpTo { .. } => None,
        }
    }
}

/// Least member of S not represented by Q, searched through one theta series to `bound`.
pub fn truant(q: &QuadraticForm, s: &TargetSet, bound: u64) -> Result<Truant> {
    let th = theta_series(q, bound)?;
    Ok(s.up_to(bound)
        .into_iter()
        .find(|&n| !th.represents(n))
        .map_or(Truant::NoneUpTo { bound }, |t| Truant::Found { t }))
}

/// Members of S up to `bound` that Q fails to represent.
pub fn exceptions(q: &QuadraticForm, s: &TargetSet, bound: u64) -> Result<Vec<u64>> {
    let th = theta_series(q, bound)?;
    Ok(s.up_to(bound).into_iter().filter(|&n| !th.represents(n)).collect())
}

/// Isometry-class invariants used to bucket candidates before exact isometry tests.
fn class_key(q: &QuadraticForm) -> (i128, Vec<u64>) {
    let th = theta_series(q, 24).expect("small theta");
    (q.disc(), th.coeffs)
}

/// Removes isometric duplicates, keeping the first representative of each class.
pub fn dedup_classes(forms: Vec<QuadraticForm>) -> Vec<QuadraticForm> {
    let keys: Vec<(i128, Vec<u64>)> = forms.par_iter().map(class_key).collect();
    let mut buckets: HashMap<(i128, Vec<u64>), Vec<usize>> = HashMap::new();
    let mut keep = Vec::new();
    for (i, key) in keys.into_iter().enumerate() {
        let bucket = buckets.entry(key).or_default();
        if bucket.iter().any(|&j| is_isometric(&forms[j], &forms[i]).is_some()) {
            continue;
        }
        bucket.push(i);
        keep.push(i);
    }
    let mut forms: Vec<Option<QuadraticForm>> = forms.into_iter().map(Some).collect();
    keep.into_iter().map(|i| forms[i].take().unwrap()).collect()
}

/// Lattices spanned by Q and a vector of norm t, one per isometry class.
///
/// The parent is reduced first; a new inner product with basis vector e_i is bounded by
/// Cauchy–Schwarz, |b_i| ≤ 2√(t·Q(e_i)). Degenerate candidates are dropped.
pub fn escalations(q: &QuadraticForm, t: u64) -> Vec<QuadraticForm> {
    dedup_classes(escalation_candidates(q, t))
}

/// Positive-definite Gram matrices [[A, b], [bᵀ, 2t]] before deduplication.
pub fn escalation_candidates(q: &QuadraticForm, t: u64) -> Vec<QuadraticForm> {
    let (red, _) = reduce_with_transform(q);
    let r = red.rank();
    let bounds: Vec<i64> = (0..r)
        .map(|i| {
            let qi = red.gram()[i][i] as u128 / 2;
            isqrt(4 * t as u128 * qi) as i64
        })
        .collect();
    let mut combos: Vec<Vec<i64>> = vec![Vec::new()];
    for &b in &bounds {
        let mut next = Vec::with_capacity(combos.len() * (2 * b as usize + 1));
        for c in &combos {
            for v in -b..=b {
                let mut c2 = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        combos = next;
    }
    combos
        .into_par_iter()
        .filter_map(|b| {
            let mut g: Vec<Vec<i64>> = red.gram().iter().cloned().collect();
            for (i, row) in g.iter_mut().enumerate() {
                row.push(b[i]);
            }
            let mut last = b.clone();
            last.push(2 * t as i64);
            g.push(last);
            validate_gram(g).ok()
        })
        .collect()
}

/// Sorted truants occurring in the tree.
pub fn critical_integers(tree: &EscalationTree) -> Vec<u64> {
    let mut v: Vec<u64> = tree.nodes.iter().filter_map(|n| n.status.truant()).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Ternary escalators with no exception in S up to `check_bound`.
pub fn kaplansky_candidates(tree: &EscalationTree, s: &TargetSet, check_bound: u64) -> Result<Vec<QuadraticForm>> {
    let ternaries: Vec<&EscalatorNode> = tree.nodes.iter().filter(|n| n.dim == 3).collect();
    let res: Vec<Result<Option<QuadraticForm>>> = ternaries
        .par_iter()
        .map(|n| {
            let q = n.form()?;
            Ok(match truant(&q, s, check_bound)? {
                Truant::NoneUpTo { .. } => Some(q),
                Truant::Found { .. } => None,
            })
        })
        .collect();
    let mut out = Vec::new();
    for r in res {
        if let Some(q) = r? {
            out.push(q);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_truants() {
        let s = TargetSet::OddPositive;
        let cases = [("0", 1), ("x^2", 3), ("x^2+2y^2", 5), ("x^2+3y^2+xy", 7), ("x^2+3y^2+4z^2+yz", 11)];
        for (f, t) in cases {
            let q: QuadraticForm = f.parse().unwrap();
            assert_eq!(truant(&q, &s, 1000).unwrap(), Truant::Found { t }, "{f}");
        }
        let q: QuadraticForm = "x^2+y^2+z^2+w^2".parse().unwrap();
        assert_eq!(truant(&q, &TargetSet::Positive, 100).unwrap(), Truant::NoneUpTo { bound: 100 });
    }

    #[test]
    fn binary_escalators() {
        let zero = QuadraticForm::zero();
        let one = escalations(&zero, 1);
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].gram(), &[vec![2]]);
        let bins = escalations(&one[0], 3);
        assert_eq!(bins.len(), 4);
        let mut ts: Vec<u64> = bins
            .iter()
            .map(|b| truant(b, &TargetSet::OddPositive, 100).unwrap().value().unwrap())
            .collect();
        ts.sort_unstable();
        assert_eq!(ts, vec![5, 5, 5, 7]);
        for (i, a) in bins.iter().enumerate() {
            for b in &bins[i + 1..] {
                assert!(is_isometric(a, b).is_none());
            }
            assert!(crate::forms::represents_form(a, &one[0]).is_some());
        }
        // Re-deduplication is idempotent.
        assert_eq!(dedup_classes(bins.clone()).len(), 4);
    }

    #[test]
    fn target_sets() {
        let e = TargetSet::explicit(vec![5, 3, 3, 0, 9]);
        assert_eq!(e.up_to(6), vec![3, 5]);
        assert!(e.contains(9) && !e.contains(4));
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(serde_json::from_str::<TargetSet>(&json).unwrap(), e);
    }
}
