//! Cover-accelerated sweeps over candidate streams and intervals, with direct fallback,
//! time budgets and checkpoint files.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cover::{cover_witness, find_split_local_cover, CoverTable, SplitLocalCover};
use super::{ExceptionReport, Method, SweepStats};
use crate::arith::isqrt;
use crate::error::{Error, Result};
use crate::escalation::TargetSet;
use crate::forms::{find_representation, QuadraticForm};

/// Options shared by all sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Cover table precision C: R is tabulated to C·√(largest target), capped by the target.
    pub table_precision: f64,
    /// Cap on the vectors enumerated to build the table.
    pub vector_budget: u64,
    /// Every odd n below this bound is checked along with the candidates.
    pub small_bound: u64,
    pub chunk: usize,
    pub budget: Option<Duration>,
    pub checkpoint: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            table_precision: 4096.0,
            vector_budget: 400_000_000,
            small_bound: 5000,
            chunk: 1 << 15,
            budget: None,
            checkpoint: None,
        }
    }
}

impl SweepConfig {
    pub(crate) fn table_limit(&self, r: &QuadraticForm, max_target: u64) -> u64 {
        let want = ((self.table_precision * (max_target as f64).sqrt()) as u64).min(max_target);
        CoverTable::affordable_limit(r, want, self.vector_budget)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    Cover,
    Direct,
    Missed,
}

/// Representation test for Q through a cover table, then direct enumeration.
pub struct CoverChecker<'a> {
    q: &'a QuadraticForm,
    cover: Option<(&'a SplitLocalCover, CoverTable)>,
}

impl<'a> CoverChecker<'a> {
    pub fn new(q: &'a QuadraticForm, cover: Option<&'a SplitLocalCover>, table_limit: u64) -> Self {
        CoverChecker { q, cover: cover.map(|c| (c, CoverTable::new(&c.r, table_limit))) }
    }

    pub fn table_limit(&self) -> u64 {
        self.cover.as_ref().map_or(0, |c| c.1.limit)
    }

    /// (w, m) from the cover, when it finds n.
    pub fn cover_hit(&self, n: u64) -> Option<(u64, u64)> {
        let (c, t) = self.cover.as_ref()?;
        cover_witness(t, c.d, n)
    }

    fn check(&self, n: u64) -> Outcome {
        if self.cover_hit(n).is_some() {
            Outcome::Cover
        } else if find_representation(self.q, n).is_some() {
            Outcome::Direct
        } else {
            Outcome::Missed
        }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct CheckpointLine {
    through: u64,
    exceptions: Vec<u64>,
    stats: SweepStats,
}

fn read_checkpoint(path: &Path) -> Result<Option<CheckpointLine>> {
    let Ok(f) = File::open(path) else { return Ok(None) };
    let mut last = None;
    for line in BufReader::new(f).lines() {
        let line = line?;
        if let Ok(c) = serde_json::from_str::<CheckpointLine>(&line) {
            last = Some(c);
        }
    }
    Ok(last)
}

fn append_checkpoint(path: &Path, c: &CheckpointLine) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{}", serde_json::to_string(c)?)?;
    Ok(())
}

/// Sweeps an increasing target stream. The result is complete when the stream is exhausted
/// within the budget; otherwise `certified_through` is the last target checked.
pub fn sweep_sorted<I>(checker: &CoverChecker<'_>, targets: I, cfg: &SweepConfig, mut report: ExceptionReport) -> Result<ExceptionReport>
where
    I: IntoIterator<Item = u64>,
{
    let start = Instant::now();
    let mut state = match &cfg.checkpoint {
        Some(p) => read_checkpoint(p)?.unwrap_or_default(),
        None => CheckpointLine::default(),
    };
    let resumed_elapsed = state.stats.elapsed_ms;
    let resume_from = state.through;
    let mut iter = targets.into_iter().skip_while(|&n| n <= resume_from).peekable();
    let chunk = cfg.chunk.max(1);
    let mut complete = true;
    while iter.peek().is_some() {
        if cfg.budget.is_some_and(|b| start.elapsed() > b) {
            complete = false;
            break;
        }
        let batch: Vec<u64> = iter.by_ref().take(chunk * rayon::current_num_threads()).collect();
        let outcomes: Vec<Outcome> = batch.par_iter().with_min_len(chunk).map(|&n| checker.check(n)).collect();
        for (&n, o) in batch.iter().zip(&outcomes) {
            match o {
                Outcome::Cover => state.stats.cover_hits += 1,
                Outcome::Direct => state.stats.direct_hits += 1,
                Outcome::Missed => state.exceptions.push(n),
            }
        }
        state.stats.checked += batch.len() as u64;
        state.through = *batch.last().expect("nonempty batch");
        state.stats.elapsed_ms = resumed_elapsed + start.elapsed().as_millis() as u64;
        if let Some(p) = &cfg.checkpoint {
            append_checkpoint(p, &state)?;
        }
    }
    state.stats.elapsed_ms = resumed_elapsed + start.elapsed().as_millis() as u64;
    report.exceptions = state.exceptions;
    report.certified_through = Some(state.through);
    report.complete = complete;
    report.stats.checked += state.stats.checked;
    report.stats.cover_hits += state.stats.cover_hits;
    report.stats.direct_hits += state.stats.direct_hits;
    report.stats.elapsed_ms += state.stats.elapsed_ms;
    report.stats.table_limit = checker.table_limit();
    Ok(report)
}

/// Exceptions of Q among sorted candidates, with every odd n below `cfg.small_bound` added.
pub fn sweep_candidates(q: &QuadraticForm, cover: &SplitLocalCover, candidates: &[u64], cfg: &SweepConfig) -> Result<ExceptionReport> {
    if !cover.verify(q) {
        return Err(Error::NoCoverFound);
    }
    let mut targets: Vec<u64> = (1..cfg.small_bound).step_by(2).chain(candidates.iter().copied()).collect();
    targets.sort_unstable();
    targets.dedup();
    let max = targets.last().copied().unwrap_or(1);
    let checker = CoverChecker::new(q, Some(cover), cfg.table_limit(&cover.r, max));
    let report = ExceptionReport::new(q, Method::Interval);
    sweep_sorted(&checker, targets, cfg, report)
}

/// Exceptions of Q on S ∩ [lo, hi].
pub fn check_interval(q: &QuadraticForm, lo: u64, hi: u64, s: &TargetSet, cfg: &SweepConfig) -> Result<ExceptionReport> {
    let cover = if q.rank() >= 2 { find_split_local_cover(q).ok() } else { None };
    let limit = cover.as_ref().map_or(0, |c| cfg.table_limit(&c.r, hi));
    let checker = CoverChecker::new(q, cover.as_ref(), limit);
    let mut report = ExceptionReport::new(q, Method::Interval);
    report.cover = cover.clone();
    let targets = (lo.max(1)..=hi).filter(|&n| s.contains(n));
    let mut report = sweep_sorted(&checker, targets, cfg, report)?;
    if report.complete {
        report.certified_through = Some(hi);
    }
    Ok(report)
}

/// Checks every m ≡ 4 (mod 8) with 4 ≤ m ≤ limit for m − w² ∈ S, where 4Q ≅ w² + S after
/// completing the square. Misses are re-checked as n = m/4 directly in Q.
pub fn reformulated_sweep(q: &QuadraticForm, s: &QuadraticForm, limit: u64, cfg: &SweepConfig) -> Result<ExceptionReport> {
    let start = Instant::now();
    let table = CoverTable::new(s, limit);
    let targets: Vec<u64> = (4..=limit).step_by(8).collect();
    let missed: Vec<u64> = targets
        .par_iter()
        .with_min_len(cfg.chunk.max(1))
        .filter(|&&m| {
            let mut w = 0u64;
            let top = isqrt(m as u128) as u64;
            while w <= top {
                if table.contains(m - w * w) {
                    return false;
                }
                w += 1;
            }
            true
        })
        .copied()
        .collect();
    let mut report = ExceptionReport::new(q, Method::Interval);
    report.stats.cover_hits = (targets.len() - missed.len()) as u64;
    for m in missed {
        if find_representation(q, m / 4).is_some() {
            report.stats.direct_hits += 1;
        } else {
            report.exceptions.push(m / 4);
        }
    }
    report.stats.checked = targets.len() as u64;
    report.stats.table_limit = limit;
    report.stats.elapsed_ms = start.elapsed().as_millis() as u64;
    report.certified_through = Some(limit / 4);
    report.complete = true;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::theta_series;

    #[test]
    fn truant_surfaces_as_exception() {
        let q: QuadraticForm = "x^2+2y^2".parse().unwrap();
        let cover = find_split_local_cover(&q).unwrap();
        let cfg = SweepConfig { small_bound: 0, ..Default::default() };
        let r = sweep_candidates(&q, &cover, &[1, 3, 5, 7], &cfg).unwrap();
        assert_eq!(r.exceptions, vec![5, 7]);
        assert!(r.complete);
    }

    #[test]
    fn cover_hits_are_sound() {
        let q: QuadraticForm = "x^2+3y^2+3yz+3yw+5z^2+zw+34w^2".parse().unwrap();
        let cover = find_split_local_cover(&q).unwrap();
        let th = theta_series(&q, 2000).unwrap();
        let checker = CoverChecker::new(&q, Some(&cover), 2000);
        for n in 1..=2000 {
            if let Some((w, m)) = checker.cover_hit(n) {
                assert_eq!(m + cover.d * w * w, n);
                assert!(th.get(n) > 0);
            }
        }
    }

    #[test]
    fn cover_miss_falls_back_to_direct() {
        // A tiny table forces the direct path on targets the form still represents.
        let q: QuadraticForm = "x^2+2y^2+5z^2+xz".parse().unwrap();
        let cover = find_split_local_cover(&q).unwrap();
        let checker = CoverChecker::new(&q, Some(&cover), 1);
        let n = (1..200u64).step_by(2).find(|&n| checker.cover_hit(n).is_none() && find_representation(&q, n).is_some()).unwrap();
        assert_eq!(checker.check(n), Outcome::Direct);
    }

    #[test]
    fn interval_matches_theta() {
        let q: QuadraticForm = "x^2+xy+y^2+3z^2".parse().unwrap();
        let th = theta_series(&q, 3000).unwrap();
        let r = check_interval(&q, 1, 3000, &TargetSet::OddPositive, &SweepConfig::default()).unwrap();
        let expect: Vec<u64> = (1..=3000).step_by(2).filter(|&n| th.get(n) == 0).collect();
        assert_eq!(r.exceptions, expect);
        assert_eq!(r.certified_through, Some(3000));
    }

    #[test]
    fn budget_gives_watermark_and_checkpoint_resumes() {
        let q: QuadraticForm = "x^2+2y^2+5z^2+xz".parse().unwrap();
        let dir = std::env::temp_dir().join(format!("odduniv-ckpt-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let mut cfg = SweepConfig { chunk: 64, budget: Some(Duration::ZERO), checkpoint: Some(dir.clone()), ..Default::default() };
        let partial = check_interval(&q, 1, 20_000, &TargetSet::OddPositive, &cfg).unwrap();
        assert!(!partial.complete);
        cfg.budget = None;
        let full = check_interval(&q, 1, 20_000, &TargetSet::OddPositive, &cfg).unwrap();
        let _ = std::fs::remove_file(&dir);
        let fresh = check_interval(&q, 1, 20_000, &TargetSet::OddPositive, &SweepConfig::default()).unwrap();
        assert!(full.complete);
        assert_eq!(full.exceptions, fresh.exceptions);
        assert_eq!(full.stats.checked, fresh.stats.checked);
    }

    #[test]
    fn reformulation_agrees_with_theta() {
        let q: QuadraticForm = "x^2+3y^2+6z^2+xy+2yz".parse().unwrap();
        let s: QuadraticForm = "11x^2+8xy+24y^2".parse().unwrap();
        let p = QuadraticForm::diagonal(&[1]).unwrap().direct_sum(&s);
        let tq = theta_series(&q, 500).unwrap();
        let tp = theta_series(&p, 2000).unwrap();
        for n in (1..=500).step_by(2) {
            assert_eq!(tq.get(n) > 0, tp.get(4 * n) > 0, "{n}");
        }
        let r = reformulated_sweep(&q, &s, 20_000, &SweepConfig::default()).unwrap();
        assert!(r.exceptions.is_empty());
    }
}
