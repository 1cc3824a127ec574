//! `odduniv`: theta series, escalation trees, certificates and sweeps from the command line.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use odduniv::analytic::CertificateConfig;
use odduniv::escalation::{build_tree, truant, TargetSet, TreeConfig, Truant, TRUANT_TABLE};
use odduniv::forms::theta_series_with_budget;
use odduniv::local::{Eisenstein, PrimeDensity, DENSITY_CSV_HEADER};
use odduniv::verify::{check_interval, reformulated_sweep, report, ExceptionReport, Method3Config, ReportConfig, SweepConfig};
use odduniv::{arith, Error, QuadraticForm, Result};
use serde_json::{json, Value};

use config::{load_forms, parse_form, CommandKind, FormSource, JobConfig, BUDGET_ENV, SCHEMA_VERSION};

const EXIT_ERROR: u8 = 1;
const EXIT_UNRESOLVABLE: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_CHECK_FAILED: u8 = 4;
const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000_000;

#[derive(Parser)]
#[command(name = "odduniv", version, about = "Odd integers represented by positive-definite quadratic forms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Wall-clock budget for long loops.
    #[arg(long, global = true, env = BUDGET_ENV)]
    budget_seconds: Option<u64>,
    /// Checkpoint file for resumable loops.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,
    /// Regular ternary list, lines `form | source`.
    #[arg(long, global = true)]
    regular_db: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Primary JSONL output (stdout by default).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on enumerated lattice vectors.
    #[arg(long, global = true)]
    enumeration_budget: Option<u64>,
    /// Write the job configuration to this file instead of running it.
    #[arg(long, global = true)]
    write_config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct FormArgs {
    /// Polynomial (x^2+xy+3y^2) or JSON Gram matrix.
    form: Option<String>,
    /// File with one form per line.
    #[arg(long, conflicts_with = "form")]
    forms_file: Option<PathBuf>,
    /// Escalation tree JSONL; use with --layer.
    #[arg(long, conflicts_with_all = ["form", "forms_file"], requires = "layer")]
    tree: Option<PathBuf>,
    #[arg(long)]
    layer: Option<usize>,
}

impl FormArgs {
    fn source(&self) -> Option<FormSource> {
        if let Some(f) = &self.form {
            Some(FormSource::Inline { form: f.clone() })
        } else if let Some(p) = &self.forms_file {
            Some(FormSource::File { path: p.clone() })
        } else {
            self.tree.as_ref().map(|p| FormSource::TreeLayer { path: p.clone(), dim: self.layer.unwrap_or(4) })
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Representation numbers r_Q(0..=B).
    Theta {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, short = 'B', default_value_t = 10)]
        bound: u64,
    },
    /// Escalation tree with per-layer summary.
    Escalate {
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        /// odd or all.
        #[arg(long, default_value = "odd")]
        target: String,
        /// Directory for tree.jsonl and layers.csv.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
    },
    /// Odd-universality report and analytic certificate.
    Certify {
        #[command(flatten)]
        form: FormArgs,
        /// Sweep every F4 candidate.
        #[arg(long)]
        full: bool,
        #[arg(long)]
        candidate_limit: Option<u64>,
        #[arg(long, default_value_t = 15)]
        truncation_factor: u64,
        /// Certificate JSON output.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Recompute the truant of every row of the critical-integer table.
    AppendixCheck {
        /// Alternative table, lines `form | truant`.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Q + (t+1)(y²+z²+w²+v²) + (2t+1)u² misses exactly t up to the bound.
    CriticalCheck {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
    },
    /// Local densities β_p(n) and the Eisenstein coefficient.
    Local {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, short = 'n', value_delimiter = ',', required = true)]
        n: Vec<u64>,
        /// CSV output (n,place,num,den); stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Exceptions on an interval, or the 4n reformulated sweep.
    Sweep {
        #[command(flatten)]
        form: FormArgs,
        #[arg(long, default_value_t = 1)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        #[arg(long, default_value = "odd")]
        target: String,
        /// Binary S with 4Q = w² + S; checks m ≡ 4 (mod 8) up to --hi.
        #[arg(long)]
        reformulated: Option<String>,
    },
    /// Run a saved job configuration.
    Run { config: PathBuf },
}

fn build_config(cli: &Cli) -> Result<JobConfig> {
    let c = &cli.common;
    let mut cfg = match &cli.command {
        Cmd::Run { config } => JobConfig::load(config)?,
        Cmd::Theta { form, bound } => {
            let mut j = JobConfig::new(CommandKind::Theta);
            j.form = form.source();
            j.params.bound = Some(*bound);
            j
        }
        Cmd::Escalate { max_dim, target, dir } => {
            let mut j = JobConfig::new(CommandKind::Escalate);
            j.params.max_dim = Some(*max_dim);
            j.params.target = Some(target.clone());
            j.outputs.dir = Some(dir.clone());
            j
        }
        Cmd::Certify { form, full, candidate_limit, truncation_factor, certificate } => {
            let mut j = JobConfig::new(CommandKind::Certify);
            j.form = form.source();
            j.params.full = *full;
            j.params.candidate_limit = *candidate_limit;
            j.truncation_factor = *truncation_factor;
            j.outputs.certificate = certificate.clone();
            j
        }
        Cmd::AppendixCheck { table } => {
            let mut j = JobConfig::new(CommandKind::AppendixCheck);
            j.params.table = table.clone();
            j
        }
        Cmd::CriticalCheck { form, bound } => {
            let mut j = JobConfig::new(CommandKind::CriticalCheck);
            j.form = form.source();
            j.params.bound = Some(*bound);
            j
        }
        Cmd::Local { form, n, csv } => {
            let mut j = JobConfig::new(CommandKind::Local);
            j.form = form.source();
            j.params.n = n.clone();
            j.outputs.csv = csv.clone();
            j
        }
        Cmd::Sweep { form, lo, hi, target, reformulated } => {
            let mut j = JobConfig::new(CommandKind::Sweep);
            j.form = form.source();
            j.params.lo = Some(*lo);
            j.params.hi = Some(*hi);
            j.params.target = Some(target.clone());
            j.params.reformulated = reformulated.clone();
            j
        }
    };
    if c.budget_seconds.is_some() {
        cfg.budgets.time_seconds = c.budget_seconds;
    }
    if c.enumeration_budget.is_some() {
        cfg.budgets.enumeration = c.enumeration_budget;
    }
    cfg.checkpoint = c.checkpoint.clone().or(cfg.checkpoint);
    cfg.regular_db = c.regular_db.clone().or(cfg.regular_db);
    cfg.jobs = c.jobs.or(cfg.jobs);
    cfg.outputs.jsonl = c.out.clone().or(cfg.outputs.jsonl);
    cfg.validate()?;
    Ok(cfg)
}

/// Primary JSONL lines and a timing sidecar.
struct Sink {
    out: Box<dyn Write>,
    sidecar: Option<BufWriter<File>>,
}

impl Sink {
    fn new(cfg: &JobConfig) -> Result<Self> {
        Ok(match &cfg.outputs.jsonl {
            Some(p) => {
                let side = p.with_extension("timing.jsonl");
                Sink { out: Box::new(BufWriter::new(File::create(p)?)), sidecar: Some(BufWriter::new(File::create(side)?)) }
            }
            None => Sink { out: Box::new(std::io::stdout().lock()), sidecar: None },
        })
    }

    fn emit(&mut self, kind: &str, mut body: Value) -> Result<()> {
        let obj = body.as_object_mut().expect("object body");
        obj.insert("schema".into(), json!(SCHEMA_VERSION));
        obj.insert("kind".into(), json!(kind));
        writeln!(self.out, "{}", serde_json::to_string(&body)?)?;
        Ok(())
    }

    fn timing(&mut self, what: &str, ms: u64) -> Result<()> {
        let line = serde_json::to_string(&json!({ "what": what, "elapsed_ms": ms }))?;
        match &mut self.sidecar {
            Some(w) => writeln!(w, "{line}")?,
            None => eprintln!("{line}"),
        }
        Ok(())
    }

    /// A report with its elapsed time moved to the sidecar.
    fn emit_report(&mut self, mut r: ExceptionReport) -> Result<()> {
        let ms = std::mem::take(&mut r.stats.elapsed_ms);
        self.timing(&r.form, ms)?;
        self.emit("report", serde_json::to_value(&r)?)
    }

    fn finish(&mut self) -> Result<()> {
        self.out.flush()?;
        if let Some(w) = &mut self.sidecar {
            w.flush()?;
        }
        Ok(())
    }
}

fn target_set(name: Option<&str>) -> Result<TargetSet> {
    match name.unwrap_or("odd") {
        "odd" => Ok(TargetSet::OddPositive),
        "all" => Ok(TargetSet::Positive),
        other => Err(Error::Parse(format!("unknown target set {other}"))),
    }
}

fn forms(cfg: &JobConfig) -> Result<Vec<QuadraticForm>> {
    let src = cfg.form.as_ref().ok_or_else(|| Error::Parse("no form given".into()))?;
    load_forms(src)
}

fn budget(cfg: &JobConfig) -> Option<Duration> {
    cfg.budgets.time_seconds.map(Duration::from_secs)
}

fn run(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    match cfg.command {
        CommandKind::Theta => cmd_theta(cfg, sink),
        CommandKind::Escalate => cmd_escalate(cfg, sink),
        CommandKind::Certify => cmd_certify(cfg, sink),
        CommandKind::AppendixCheck => cmd_appendix_check(cfg, sink),
        CommandKind::CriticalCheck => cmd_critical_check(cfg, sink),
        CommandKind::Local => cmd_local(cfg, sink),
        CommandKind::Sweep => cmd_sweep(cfg, sink),
    }
}

fn cmd_theta(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let bound = cfg.params.bound.unwrap_or(10);
    let limit = cfg.budgets.enumeration.unwrap_or(DEFAULT_ENUMERATION_BUDGET);
    for q in forms(cfg)? {
        let th = theta_series_with_budget(&q, bound, limit)?;
        let text: Vec<String> = th.coeffs.iter().map(|c| c.to_string()).collect();
        eprintln!("{}: {}", q.to_polynomial(), text.join(" "));
        sink.emit("theta", json!({ "form": q.to_polynomial(), "bound": bound, "coeffs": th.coeffs }))?;
    }
    Ok(0)
}

fn cmd_escalate(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let tc = TreeConfig {
        target: target_set(cfg.params.target.as_deref())?,
        max_dim: cfg.params.max_dim.unwrap_or(3),
        budget: budget(cfg),
        ..TreeConfig::default()
    };
    let tree = build_tree(&tc, cfg.checkpoint.as_deref())?;
    let dir = cfg.outputs.dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    tree.write_jsonl(BufWriter::new(File::create(dir.join("tree.jsonl"))?))?;
    tree.write_layer_csv(BufWriter::new(File::create(dir.join("layers.csv"))?))?;
    let counts: Vec<usize> = (0..=tc.max_dim).map(|d| tree.layer_count(d)).collect();
    let text: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
    eprintln!("{}", text.join(","));
    let complete = tree.complete_layers > tc.max_dim;
    sink.emit(
        "escalate",
        json!({ "counts": counts, "layers": tree.summaries(), "complete_layers": tree.complete_layers, "complete": complete }),
    )?;
    Ok(if complete { 0 } else { EXIT_INCOMPLETE })
}

fn cmd_certify(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let mut rc = ReportConfig { regular_db: cfg.regular_db.clone(), budget: budget(cfg), ..Default::default() };
    rc.method3 = Method3Config {
        certificate: CertificateConfig { truncation_factor: cfg.truncation_factor, candidate_summary: true },
        sweep: SweepConfig { checkpoint: cfg.checkpoint.clone(), budget: budget(cfg), ..Default::default() },
        candidate_limit: if cfg.params.full { None } else { cfg.params.candidate_limit.or(Method3Config::default().candidate_limit) },
    };
    let mut code = 0u8;
    for q in forms(cfg)? {
        match report(&q, &rc) {
            Ok(r) => {
                if let (Some(path), Some(cert)) = (&cfg.outputs.certificate, &r.certificate) {
                    std::fs::write(path, serde_json::to_string_pretty(cert)? + "\n")?;
                }
                eprintln!(
                    "{}: method {:?}, exceptions {:?}, complete {}",
                    r.form, r.method, r.exceptions, r.complete && r.squarefree_complete
                );
                if !(r.complete && r.squarefree_complete) {
                    code = code.max(EXIT_INCOMPLETE);
                }
                sink.emit_report(r)?;
            }
            Err(Error::Unresolvable(note)) => {
                eprintln!("{}: unresolvable: {note}", q.to_polynomial());
                sink.emit("unresolvable", json!({ "form": q.to_polynomial(), "error": "Unresolvable", "note": note }))?;
                code = code.max(EXIT_UNRESOLVABLE);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(code)
}

fn read_table(cfg: &JobConfig) -> Result<Vec<(String, u64)>> {
    match &cfg.params.table {
        None => Ok(TRUANT_TABLE.iter().map(|(f, t)| (f.to_string(), *t)).collect()),
        Some(p) => std::fs::read_to_string(p)?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(|l| {
                let (f, t) = l.split_once('|').ok_or_else(|| Error::Parse(format!("missing truant in {l}")))?;
                let t: u64 = t.trim().parse().map_err(|_| Error::Parse(format!("bad truant in {l}")))?;
                Ok((f.trim().to_string(), t))
            })
            .collect(),
    }
}

fn cmd_appendix_check(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let mut failed = 0;
    let rows = read_table(cfg)?;
    for (f, stated) in &rows {
        let q = parse_form(f)?;
        let computed = truant(&q, &TargetSet::OddPositive, (2 * stated).max(1000))?.value();
        let pass = computed == Some(*stated);
        failed += usize::from(!pass);
        sink.emit("appendix_row", json!({ "form": f, "stated": stated, "computed": computed, "pass": pass }))?;
    }
    eprintln!("{} of {} rows pass", rows.len() - failed, rows.len());
    Ok(if failed == 0 { 0 } else { EXIT_CHECK_FAILED })
}

/// Q ⊕ ⟨t+1⟩⁴ ⊕ ⟨2t+1⟩.
fn critical_extension(q: &QuadraticForm, t: u64) -> Result<QuadraticForm> {
    let t = t as i64;
    Ok(q.direct_sum(&QuadraticForm::diagonal(&[t + 1, t + 1, t + 1, t + 1, 2 * t + 1])?))
}

fn cmd_critical_check(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let bound = cfg.params.bound.unwrap_or(1000);
    let mut code = 0;
    for q in forms(cfg)? {
        let t = match truant(&q, &TargetSet::OddPositive, bound)? {
            Truant::Found { t } => t,
            Truant::NoneUpTo { .. } => return Err(Error::Parse(format!("{} has no odd truant up to {bound}", q.to_polynomial()))),
        };
        let ext = critical_extension(&q, t)?;
        let sweep = SweepConfig { budget: budget(cfg), ..Default::default() };
        let r = check_interval(&ext, 1, bound, &TargetSet::OddPositive, &sweep)?;
        if !r.complete {
            return Err(Error::BudgetExceeded { certified_through: r.certified_through.unwrap_or(0) });
        }
        let pass = r.exceptions == [t];
        if !pass {
            code = EXIT_CHECK_FAILED;
        }
        eprintln!("{}: truant {t}, extension misses {:?}", q.to_polynomial(), r.exceptions);
        sink.emit(
            "critical_check",
            json!({ "form": q.to_polynomial(), "truant": t, "extension": ext.to_polynomial(), "bound": bound,
                    "exceptions": r.exceptions, "pass": pass }),
        )?;
    }
    Ok(code)
}

fn cmd_local(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let mut csv: Box<dyn Write> = match &cfg.outputs.csv {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(csv, "{DENSITY_CSV_HEADER}")?;
    for q in forms(cfg)? {
        let eis = Eisenstein::new(&q).ok();
        for &n in &cfg.params.n {
            if n == 0 {
                return Err(Error::Parse("n must be positive".into()));
            }
            let mut primes = arith::prime_divisors(2 * q.disc() * n as i128);
            primes.sort_unstable();
            for p in primes {
                let v = PrimeDensity::new(&q, p).density(n);
                writeln!(csv, "{},{},{},{}", n, p, v.numer(), v.denom())?;
            }
            if let Some(e) = &eis {
                let a = e.coefficient(n);
                writeln!(csv, "{},E,{},{}", n, a.numer(), a.denom())?;
            }
        }
    }
    csv.flush()?;
    if cfg.outputs.csv.is_some() {
        sink.emit("local", json!({ "csv": cfg.outputs.csv, "n": cfg.params.n }))?;
    }
    Ok(0)
}

fn cmd_sweep(cfg: &JobConfig, sink: &mut Sink) -> Result<u8> {
    let hi = cfg.params.hi.ok_or_else(|| Error::Parse("--hi is required".into()))?;
    let lo = cfg.params.lo.unwrap_or(1);
    let sweep = SweepConfig { budget: budget(cfg), checkpoint: cfg.checkpoint.clone(), ..Default::default() };
    let mut code = 0;
    for q in forms(cfg)? {
        let r = match &cfg.params.reformulated {
            Some(s) => reformulated_sweep(&q, &parse_form(s)?, hi, &sweep)?,
            None => check_interval(&q, lo, hi, &target_set(cfg.params.target.as_deref())?, &sweep)?,
        };
        eprintln!("{}: exceptions {:?}, certified through {:?}", r.form, r.exceptions, r.certified_through);
        if !r.complete {
            code = EXIT_INCOMPLETE;
        }
        sink.emit_report(r)?;
    }
    Ok(code)
}

fn error_kind(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(p) = &cli.common.write_config {
        return match cfg.save(p) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        };
    }
    if let Some(j) = cfg.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let mut sink = match Sink::new(&cfg) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let result = run(&cfg, &mut sink);
    let code = match result {
        Ok(c) => c,
        Err(e) => {
            let _ = sink.emit("error", json!({ "error": error_kind(&e), "message": e.to_string() }));
            eprintln!("error: {e}");
            match e {
                Error::Unresolvable(_) => EXIT_UNRESOLVABLE,
                Error::BudgetExceeded { .. } => EXIT_INCOMPLETE,
                _ => EXIT_ERROR,
            }
        }
    };
    if let Err(e) = sink.finish() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    ExitCode::from(code)
}

fn fail(e: &Error) -> ExitCode {
    let line = json!({ "schema": SCHEMA_VERSION, "kind": "error", "error": error_kind(e), "message": e.to_string() });
    println!("{line}");
    eprintln!("error: {e}");
    ExitCode::from(EXIT_ERROR)
}
