//! Regular ternary data and the residue-class queue for T(x,y,z) + d·w².

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ExceptionReport, Method};
use crate::arith::{is_square, is_squarefree, lcm, valuation};
use crate::error::{Error, Result};
use crate::forms::matrix::{self, IMat};
use crate::forms::{find_representation, represents_form, QuadraticForm};
use crate::local::{locally_missed_classes, LocalRepresentation};

/// Starter list shipped with the crate.
pub const STARTER_DB: &str = include_str!("../../data/regular_ternaries.txt");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularEntry {
    pub form: QuadraticForm,
    pub source: String,
}

/// Ternary forms asserted regular. Regularity is not checked.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularTernaryDB {
    pub entries: Vec<RegularEntry>,
    pub trusted: bool,
}

impl RegularTernaryDB {
    /// Lines `polynomial | source`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (poly, source) = line.split_once('|').unwrap_or((line, "unspecified"));
            let form: QuadraticForm = poly.trim().parse()?;
            if form.rank() != 3 {
                return Err(Error::WrongRank { expected: 3, found: form.rank() });
            }
            entries.push(RegularEntry { form, source: source.trim().to_string() });
        }
        Ok(RegularTernaryDB { entries, trusted: true })
    }

    pub fn starter() -> Self {
        Self::parse(STARTER_DB).expect("bundled data parses")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Limits for the residue queue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueConfig {
    /// Members scanned per class before giving up.
    pub per_class_scan: u64,
    pub max_classes: u64,
}

impl Default for QueueConfig {
    fn default() -> Self {
        QueueConfig { per_class_scan: 1_000_000, max_classes: 1_000_000 }
    }
}

/// T embedded in Q with K ⊕ K^⊥ ≅ T ⊕ ⟨d⟩ locally representing every odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceEmbedding {
    pub t: QuadraticForm,
    pub source: String,
    pub d: u64,
    /// Columns: the image of T's basis, then the generator of K^⊥.
    pub basis: IMat,
}

/// The first database entry nicely embedded in Q.
pub fn find_nice_embedding(q: &QuadraticForm, db: &RegularTernaryDB) -> Result<NiceEmbedding> {
    if q.rank() != 4 {
        return Err(Error::WrongRank { expected: 4, found: q.rank() });
    }
    for e in &db.entries {
        let Some(emb) = represents_form(q, &e.form) else { continue };
        let rows: Vec<Vec<i64>> = (0..3)
            .map(|j| {
                let col: Vec<i64> = emb.matrix.iter().map(|r| r[j]).collect();
                matrix::apply(q.gram(), &col)
            })
            .collect();
        let v = matrix::kernel_vector(&rows);
        let d = q.value(&v) as u64;
        let sum = e.form.direct_sum(&QuadraticForm::diagonal(&[d as i64])?);
        if !locally_missed_classes(&sum).misses_nothing() {
            continue;
        }
        let basis = (0..4).map(|i| emb.matrix[i].iter().copied().chain(std::iter::once(v[i])).collect()).collect();
        return Ok(NiceEmbedding { t: e.form.clone(), source: e.source.clone(), d, basis });
    }
    Err(Error::NoRegularEmbedding)
}

/// Queue outcome for T + d·w²: squarefree odd exceptions and the number of classes processed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueResult {
    pub exceptions: Vec<u64>,
    pub classes_processed: u64,
}

fn stable_modulus(bad: &[u64], m: u64) -> u64 {
    bad.iter().fold(1u64, |acc, &p| {
        let v = valuation(m as i128, p as i128);
        acc * p.pow(v + if p == 2 { 3 } else { 1 })
    })
}

fn holds_squarefree(b: u64, modulus: u64, bad: &[u64]) -> bool {
    bad.iter().all(|&p| p == 2 || modulus % (p * p) != 0 || b % (p * p) != 0)
}

/// Squarefree odd n not represented by T + d·w² for a regular T.
pub fn residue_queue(t: &QuadraticForm, d: u64, cfg: &QueueConfig) -> Result<QueueResult> {
    let lr = LocalRepresentation::new(t);
    let profile = locally_missed_classes(t);
    let bad = lr.bad_primes().to_vec();
    let mut queue: VecDeque<(u64, u64)> = profile.missed_classes().into_iter().map(|a| (a, profile.modulus)).collect();
    let mut exceptions = Vec::new();
    let mut processed = 0u64;
    while let Some((start, modulus)) = queue.pop_front() {
        processed += 1;
        if processed > cfg.max_classes {
            return Err(Error::QueueBudgetExceeded { processed });
        }
        let mut n = start;
        let mut scanned = 0u64;
        let hit = loop {
            if scanned >= cfg.per_class_scan {
                return Err(Error::QueueBudgetExceeded { processed });
            }
            scanned += 1;
            if is_squarefree(n) {
                // Among the hits, the one whose stable class is coarsest.
                let mut best: Option<u64> = None;
                let mut w = 1u64;
                while d * w * w < n {
                    let m = n - d * w * w;
                    if lr.represents(m) {
                        let r = lcm(modulus as i128, stable_modulus(&bad, m) as i128) as u64;
                        if best.map_or(true, |b| r < b) {
                            best = Some(r);
                        }
                        if r == modulus {
                            break;
                        }
                    }
                    w += 1;
                }
                match best {
                    Some(r) => break (n, r),
                    None if n % d == 0 && is_square((n / d) as i128) => {}
                    None => exceptions.push(n),
                }
            }
            n += modulus;
        };
        let (n, refined) = hit;
        for k in 1..refined / modulus {
            let b = n + k * modulus;
            if holds_squarefree(b, refined, &bad) {
                queue.push_back((b, refined));
            }
        }
    }
    exceptions.sort_unstable();
    Ok(QueueResult { exceptions, classes_processed: processed })
}

/// Method 2: nicely embedded regular ternary, residue queue, then direct checks in Q.
pub fn method2(q: &QuadraticForm, db: &RegularTernaryDB, cfg: &QueueConfig) -> Result<ExceptionReport> {
    let start = Instant::now();
    let nice = find_nice_embedding(q, db)?;
    let res = residue_queue(&nice.t, nice.d, cfg)?;
    let mut report = ExceptionReport::new(q, Method::Method2);
    report.matched = Some(format!("{} + {}w^2 ({})", nice.t.to_polynomial(), nice.d, nice.source));
    for n in res.exceptions {
        if find_representation(q, n).is_some() {
            report.stats.direct_hits += 1;
        } else {
            report.exceptions.push(n);
        }
    }
    report.stats.classes_processed = res.classes_processed;
    report.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    report.squarefree_complete = true;
    report.complete = true;
    report.note = Some("squarefree odd integers; regularity of the ternary is trusted input".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::theta_series;

    #[test]
    fn starter_db_parses() {
        let db = RegularTernaryDB::starter();
        assert_eq!(db.entries.len(), 2);
        assert!(db.trusted);
        assert!(RegularTernaryDB::parse("x^2+y^2 | binary").is_err());
    }

    #[test]
    fn seven_w_squared_example() {
        let q: QuadraticForm = "x^2+y^2+yz+2z^2+7w^2".parse().unwrap();
        let nice = find_nice_embedding(&q, &RegularTernaryDB::starter()).unwrap();
        assert_eq!(nice.d, 7);
        let profile = locally_missed_classes(&nice.t);
        let missed: Vec<u64> = profile.missed_classes().iter().map(|a| a % 49).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        assert_eq!(missed, vec![21, 35, 42]);
        let r = method2(&q, &RegularTernaryDB::starter(), &QueueConfig::default()).unwrap();
        assert!(r.exceptions.is_empty());
        assert!(r.stats.classes_processed >= 3);
    }

    #[test]
    fn queue_agrees_with_theta() {
        // T + d·w² for several d: squarefree odd exceptions up to 4000 match enumeration.
        let t: QuadraticForm = "x^2+xy+3y^2+4z^2".parse().unwrap();
        for d in [1u64, 2, 5, 77, 85] {
            let p = t.direct_sum(&QuadraticForm::diagonal(&[d as i64]).unwrap());
            let res = residue_queue(&t, d, &QueueConfig::default()).unwrap();
            let th = theta_series(&p, 4000).unwrap();
            let direct: Vec<u64> = (1..=4000).step_by(2).filter(|&n| is_squarefree(n) && th.get(n) == 0).collect();
            let listed: Vec<u64> = res.exceptions.iter().copied().filter(|&n| n <= 4000).collect();
            assert_eq!(listed, direct, "d = {d}");
        }
    }

    #[test]
    fn scan_budget_is_reported() {
        let t: QuadraticForm = "x^2+xy+3y^2+4z^2".parse().unwrap();
        let cfg = QueueConfig { per_class_scan: 1, max_classes: 10 };
        assert!(matches!(residue_queue(&t, 1_000_001, &cfg), Err(Error::QueueBudgetExceeded { .. })));
    }
}
