//! Finite checks that turn bounds into certificates: split local covers and sweeps,
//! universal ternary sublattices, regular ternary residue queues, the analytic candidate
//! sweep and per-form reports.

pub mod cover;
pub mod regular;
pub mod sweep;

use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{cusp_constant_with, CertificateConfig, CuspConstantCertificate, F4Search};
use crate::arith::is_fundamental_discriminant;
use crate::error::{Error, Result};
use crate::escalation::{build_tree, kaplansky_candidates, TargetSet, TreeConfig, CONJECTURED_TERNARIES};
use crate::forms::{is_isometric, represents_form, theta_series, Embedding, QuadraticForm};

pub use cover::{find_split_local_cover, CoverTable, SplitLocalCover};
pub use regular::{find_nice_embedding, method2, residue_queue, NiceEmbedding, QueueConfig, RegularTernaryDB};
pub use sweep::{check_interval, reformulated_sweep, sweep_candidates, CoverChecker, SweepConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "1")]
    Method1,
    #[serde(rename = "2")]
    Method2,
    #[serde(rename = "3")]
    Method3,
    #[serde(rename = "interval")]
    Interval,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    pub checked: u64,
    pub cover_hits: u64,
    pub direct_hits: u64,
    pub classes_processed: u64,
    pub table_limit: u64,
    pub elapsed_ms: u64,
}

/// Odd exceptions of a form and how far they are certified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionReport {
    pub form: String,
    pub method: Method,
    /// Sorted; each verified non-represented by direct enumeration.
    pub exceptions: Vec<u64>,
    /// Every target up to this bound was checked.
    pub certified_through: Option<u64>,
    /// Every odd squarefree integer is covered.
    pub squarefree_complete: bool,
    /// The run finished within its budget.
    pub complete: bool,
    pub matched: Option<String>,
    pub note: Option<String>,
    pub cover: Option<SplitLocalCover>,
    pub certificate: Option<CuspConstantCertificate>,
    pub stats: SweepStats,
}

impl ExceptionReport {
    pub fn new(q: &QuadraticForm, method: Method) -> Self {
        ExceptionReport {
            form: q.to_polynomial(),
            method,
            exceptions: Vec::new(),
            certified_through: None,
            squarefree_complete: false,
            complete: false,
            matched: None,
            note: None,
            cover: None,
            certificate: None,
            stats: SweepStats::default(),
        }
    }

    /// Complete with no exceptions on every odd squarefree integer.
    pub fn certifies_squarefree_odds(&self) -> bool {
        self.complete && self.squarefree_complete && self.exceptions.is_empty()
    }
}

/// The ternaries of the odd-target escalation with no odd exception up to 2¹⁴, with the
/// conjectured ones last.
pub fn kaplansky_ternaries() -> &'static [QuadraticForm] {
    static CELL: OnceLock<Vec<QuadraticForm>> = OnceLock::new();
    CELL.get_or_init(|| {
        let tree = build_tree(&TreeConfig::default(), None).expect("ternary escalation");
        let mut v = kaplansky_candidates(&tree, &TargetSet::OddPositive, 1 << 14).expect("truant search");
        v.sort_by_key(is_conjectured);
        v
    })
}

fn is_conjectured(t: &QuadraticForm) -> bool {
    CONJECTURED_TERNARIES.iter().any(|s| is_isometric(t, &s.parse().expect("static form")).is_some())
}

/// First ternary of `db` embedded in Q.
pub fn method1(q: &QuadraticForm, db: &[QuadraticForm]) -> Option<(QuadraticForm, Embedding)> {
    db.iter().find_map(|t| represents_form(q, t).map(|e| (t.clone(), e)))
}

fn method1_report(q: &QuadraticForm, t: &QuadraticForm) -> ExceptionReport {
    let mut r = ExceptionReport::new(q, Method::Method1);
    r.matched = Some(t.to_polynomial());
    r.complete = true;
    r.squarefree_complete = true;
    r.note = Some(if is_conjectured(t) {
        "contains a ternary sublattice whose odd-universality is conjectural".into()
    } else {
        "contains a ternary sublattice representing every positive odd integer".into()
    });
    r
}

/// Options for [`method3`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Method3Config {
    pub certificate: CertificateConfig,
    pub sweep: SweepConfig,
    /// Only candidates up to this bound are swept; `None` sweeps the whole stream.
    pub candidate_limit: Option<u64>,
}

impl Default for Method3Config {
    fn default() -> Self {
        Method3Config { certificate: CertificateConfig::default(), sweep: SweepConfig::default(), candidate_limit: Some(1_000_000) }
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct StreamCheckpoint {
    processed: u64,
    exceptions: Vec<u64>,
    stats: SweepStats,
}

fn read_stream_checkpoint(path: &std::path::Path) -> Option<StreamCheckpoint> {
    let f = std::fs::File::open(path).ok()?;
    BufReader::new(f).lines().map_while(|l| l.ok()).filter_map(|l| serde_json::from_str(&l).ok()).last()
}

/// Sweeps the F₄ candidates of a certificate in depth-first order, in parallel chunks, with
/// every odd n below the small bound checked first.
fn sweep_f4_stream(
    q: &QuadraticForm,
    cover: &SplitLocalCover,
    search: &F4Search,
    limit: u64,
    cfg: &SweepConfig,
    report: &mut ExceptionReport,
) -> Result<()> {
    let start = Instant::now();
    let checker = CoverChecker::new(q, Some(cover), cfg.table_limit(&cover.r, limit));
    let small = sweep::sweep_sorted(
        &checker,
        (1..cfg.small_bound).step_by(2),
        &SweepConfig { checkpoint: None, budget: None, ..cfg.clone() },
        ExceptionReport::new(q, Method::Method3),
    )?;
    let mut state = cfg.checkpoint.as_deref().and_then(read_stream_checkpoint).unwrap_or_default();
    let skip = state.processed;
    let chunk = cfg.chunk.max(1) * rayon::current_num_threads();
    let mut buf: Vec<u64> = Vec::with_capacity(chunk);
    let mut index = 0u64;
    let mut stopped = false;
    let mut failure: Option<Error> = None;
    let flush = |buf: &mut Vec<u64>, state: &mut StreamCheckpoint| -> Result<()> {
        let misses: Vec<(u64, bool)> = buf
            .par_iter()
            .filter(|&&n| n >= cfg.small_bound)
            .filter(|&&n| checker.cover_hit(n).is_none())
            .map(|&n| (n, crate::forms::find_representation(q, n).is_some()))
            .collect();
        let considered = buf.iter().filter(|&&n| n >= cfg.small_bound).count() as u64;
        state.stats.checked += considered;
        state.stats.cover_hits += considered - misses.len() as u64;
        for (n, hit) in misses {
            if hit {
                state.stats.direct_hits += 1;
            } else {
                state.exceptions.push(n);
            }
        }
        state.processed += buf.len() as u64;
        buf.clear();
        if let Some(p) = &cfg.checkpoint {
            let mut f = OpenOptions::new().create(true).append(true).open(p)?;
            writeln!(f, "{}", serde_json::to_string(&*state)?)?;
        }
        Ok(())
    };
    search.for_each_candidate(limit, |n| {
        index += 1;
        if index <= skip || stopped {
            return;
        }
        buf.push(n);
        if buf.len() == chunk {
            if let Err(e) = flush(&mut buf, &mut state) {
                failure = Some(e);
                stopped = true;
            }
            if cfg.budget.is_some_and(|b| start.elapsed() > b) {
                stopped = true;
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if !stopped && !buf.is_empty() {
        flush(&mut buf, &mut state)?;
    }
    let mut exceptions = small.exceptions;
    exceptions.extend(state.exceptions);
    exceptions.sort_unstable();
    exceptions.dedup();
    report.exceptions = exceptions;
    report.stats = SweepStats {
        checked: small.stats.checked + state.stats.checked,
        cover_hits: small.stats.cover_hits + state.stats.cover_hits,
        direct_hits: small.stats.direct_hits + state.stats.direct_hits,
        classes_processed: 0,
        table_limit: checker.table_limit(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    };
    report.complete = !stopped;
    Ok(())
}

/// Method 3: cusp constant, F₄ threshold, candidate stream and cover sweep.
pub fn method3(q: &QuadraticForm, cfg: &Method3Config) -> Result<ExceptionReport> {
    if q.rank() != 4 {
        return Err(Error::WrongRank { expected: 4, found: q.rank() });
    }
    if !is_fundamental_discriminant(q.disc()) {
        return Err(Error::NonFundamentalDiscriminant(q.disc()));
    }
    let cert = cusp_constant_with(q, &cfg.certificate)?;
    let cover = find_split_local_cover(q)?;
    let search = F4Search::new(cert.f, cert.level, cert.disc);
    let full_max = cert.candidates.map(|s| s.max_candidate);
    let limit = match (cfg.candidate_limit, full_max) {
        (Some(l), Some(m)) => l.min(m),
        (Some(l), None) => l,
        (None, Some(m)) => m,
        (None, None) => search.summary().max_candidate,
    };
    let mut report = ExceptionReport::new(q, Method::Method3);
    sweep_f4_stream(q, &cover, &search, limit, &cfg.sweep, &mut report)?;
    let truncated = cfg.candidate_limit.is_some_and(|l| full_max.map_or(true, |m| l < m));
    if report.complete {
        report.certified_through = Some(limit.max(cfg.sweep.small_bound.saturating_sub(1)));
    }
    report.squarefree_complete = report.complete && !truncated;
    report.complete &= !truncated;
    report.note = Some(if report.squarefree_complete {
        "odd squarefree integers; every candidate with F4(n) <= F swept".into()
    } else {
        format!("candidate stream truncated at {limit}; only candidates up to the watermark are certified")
    });
    report.cover = Some(cover);
    report.certificate = Some(cert);
    Ok(report)
}

/// Options for [`report`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub regular_db: Option<PathBuf>,
    pub queue: QueueConfig,
    pub method3: Method3Config,
    /// Run Method 3 at all.
    pub try_method3: bool,
    /// Fall back to an interval check of the odds up to this bound.
    pub interval_fallback: Option<u64>,
    pub budget: Option<Duration>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            regular_db: None,
            queue: QueueConfig::default(),
            method3: Method3Config::default(),
            try_method3: true,
            interval_fallback: None,
            budget: None,
        }
    }
}

/// Tries Methods 1, 2 and 3 in turn, then the interval fallback when configured.
pub fn report(q: &QuadraticForm, cfg: &ReportConfig) -> Result<ExceptionReport> {
    let mut notes = Vec::new();
    if q.rank() == 4 {
        if let Some((t, _)) = method1(q, kaplansky_ternaries()) {
            return Ok(method1_report(q, &t));
        }
        notes.push("no odd-universal ternary sublattice".to_string());
        let db = match &cfg.regular_db {
            Some(p) => RegularTernaryDB::load(p)?,
            None => RegularTernaryDB::starter(),
        };
        match method2(q, &db, &cfg.queue) {
            Ok(r) => return Ok(r),
            Err(Error::NoRegularEmbedding) => notes.push("no nicely embedded regular ternary in the database".into()),
            Err(e @ Error::QueueBudgetExceeded { .. }) => notes.push(e.to_string()),
            Err(e) => return Err(e),
        }
        if is_fundamental_discriminant(q.disc()) {
            if cfg.try_method3 {
                let mut m3 = cfg.method3.clone();
                if m3.sweep.budget.is_none() {
                    m3.sweep.budget = cfg.budget;
                }
                match method3(q, &m3) {
                    Ok(r) => return Ok(r),
                    Err(e) => notes.push(format!("analytic bound failed: {e}")),
                }
            }
        } else {
            notes.push(format!("discriminant {} is not fundamental, so the analytic bound does not apply", q.disc()));
        }
    } else {
        notes.push(format!("rank {} is outside the quaternary methods", q.rank()));
    }
    if let Some(bound) = cfg.interval_fallback {
        let sweep = SweepConfig { budget: cfg.budget, ..Default::default() };
        let mut r = check_interval(q, 1, bound, &TargetSet::OddPositive, &sweep)?;
        r.note = Some(notes.join("; "));
        return Ok(r);
    }
    notes.push("requires an explicit newform decomposition of the cusp part".into());
    Err(Error::Unresolvable(notes.join("; ")))
}

/// Outcome of the comparison r_Q(p²n) = r_Q(n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub holds: bool,
    /// Least n ≤ n_max with r_Q(p²n) ≠ r_Q(n).
    pub witness: Option<u64>,
}

/// Checks r_Q(p²n) = r_Q(n) for 1 ≤ n ≤ n_max.
pub fn anisotropic_square_scaling_check(q: &QuadraticForm, p: u64, n_max: u64) -> Result<ScalingCheck> {
    if n_max == 0 {
        return Ok(ScalingCheck { holds: true, witness: None });
    }
    let th = theta_series(q, p * p * n_max)?;
    let witness = (1..=n_max).find(|&n| th.get(p * p * n) != th.get(n));
    Ok(ScalingCheck { holds: witness.is_none(), witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_three_ternaries() {
        assert_eq!(kaplansky_ternaries().len(), 23);
    }

    #[test]
    fn form_16451_uses_method1() {
        let q: QuadraticForm = "x^2+xy+xw+3y^2+7z^2+7w^2".parse().unwrap();
        let (t, e) = method1(&q, kaplansky_ternaries()).unwrap();
        assert!(e.verify(&q, &t));
        let r = report(&q, &ReportConfig::default()).unwrap();
        assert_eq!(r.method, Method::Method1);
        assert!(r.certifies_squarefree_odds());
    }

    #[test]
    fn no_small_ternary_means_no_method1() {
        let q: QuadraticForm = "x^2-xz+2y^2+yz-2yw+5z^2+zw+29w^2".parse().unwrap();
        assert!(method1(&q, kaplansky_ternaries()).is_none());
    }

    #[test]
    fn seven_w_squared_uses_method2() {
        let q: QuadraticForm = "x^2+y^2+yz+2z^2+7w^2".parse().unwrap();
        let r = report(&q, &ReportConfig::default()).unwrap();
        assert!(matches!(r.method, Method::Method1 | Method::Method2));
        let m2 = method2(&q, &RegularTernaryDB::starter(), &QueueConfig::default()).unwrap();
        assert!(m2.certifies_squarefree_odds());
    }

    #[test]
    fn form_22145_is_unresolvable() {
        let q: QuadraticForm = "x^2-xz+2y^2+yz-2yw+5z^2+zw+29w^2".parse().unwrap();
        match report(&q, &ReportConfig::default()) {
            Err(Error::Unresolvable(note)) => assert!(note.contains("not fundamental")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn method3_rejects_non_fundamental() {
        let q = QuadraticForm::diagonal(&[1, 1, 1, 1]).unwrap();
        assert!(matches!(method3(&q, &Method3Config::default()), Err(Error::NonFundamentalDiscriminant(_))));
    }

    #[test]
    fn scaling_check() {
        let q: QuadraticForm = "x^2+xy+3y^2+4z^2+33w^2".parse().unwrap();
        assert!(anisotropic_square_scaling_check(&q, 11, 500).unwrap().holds);
        let iso = QuadraticForm::diagonal(&[1, 1, 1, 1]).unwrap();
        let c = anisotropic_square_scaling_check(&iso, 3, 50).unwrap();
        assert_eq!(c.witness, Some(1));
        assert!(anisotropic_square_scaling_check(&iso, 3, 0).unwrap().holds);
    }
}
