//! Job configuration shared by every command; the JSON file form mirrors [`JobConfig`].

use std::path::{Path, PathBuf};

use odduniv::{validate_gram, Error, QuadraticForm, Result};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const BUDGET_ENV: &str = "ODDUNIV_BUDGET_SECONDS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Theta,
    Escalate,
    Certify,
    AppendixCheck,
    CriticalCheck,
    Local,
    Sweep,
}

/// Where the forms of a job come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormSource {
    /// A polynomial such as `x^2+xy+3y^2` or a Gram matrix in JSON.
    Inline { form: String },
    /// One form per line.
    File { path: PathBuf },
    /// Nodes of one dimension from an escalation tree JSONL file.
    TreeLayer { path: PathBuf, dim: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub time_seconds: Option<u64>,
    pub memory_mb: Option<u64>,
    pub enumeration: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outputs {
    /// Primary JSONL output; stdout when absent.
    pub jsonl: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub certificate: Option<PathBuf>,
    /// Directory for multi-file outputs.
    pub dir: Option<PathBuf>,
}

/// Command-specific parameters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub bound: Option<u64>,
    pub max_dim: Option<usize>,
    /// "odd" or "all".
    pub target: Option<String>,
    pub lo: Option<u64>,
    pub hi: Option<u64>,
    pub n: Vec<u64>,
    /// Binary S with 4Q = w² + S, for the reformulated sweep.
    pub reformulated: Option<String>,
    /// Sweep the whole F₄ candidate stream.
    pub full: bool,
    pub candidate_limit: Option<u64>,
    /// Appendix table override, lines `form | truant`.
    pub table: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JobConfig {
    pub schema: u32,
    pub command: CommandKind,
    pub form: Option<FormSource>,
    pub budgets: Budgets,
    /// Truncation T = factor·N of the Petersson sum.
    pub truncation_factor: u64,
    pub outputs: Outputs,
    pub checkpoint: Option<PathBuf>,
    pub regular_db: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub params: Params,
}

impl JobConfig {
    pub fn new(command: CommandKind) -> Self {
        JobConfig {
            schema: SCHEMA_VERSION,
            command,
            form: None,
            budgets: Budgets::default(),
            truncation_factor: 15,
            outputs: Outputs::default(),
            checkpoint: None,
            regular_db: None,
            jobs: None,
            params: Params::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.budgets;
        if [b.time_seconds, b.memory_mb, b.enumeration].iter().any(|v| *v == Some(0)) {
            return Err(Error::Parse("budgets must be positive".into()));
        }
        if self.truncation_factor == 0 || self.jobs == Some(0) {
            return Err(Error::Parse("truncation factor and jobs must be positive".into()));
        }
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema {}", self.schema)));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cfg: JobConfig = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// A polynomial, a JSON Gram matrix, or "0" for the zero form.
pub fn parse_form(s: &str) -> Result<QuadraticForm> {
    let s = s.trim();
    if s.starts_with('[') {
        let g: Vec<Vec<i64>> = serde_json::from_str(s)?;
        validate_gram(g)
    } else {
        s.parse()
    }
}

pub fn load_forms(src: &FormSource) -> Result<Vec<QuadraticForm>> {
    match src {
        FormSource::Inline { form } => Ok(vec![parse_form(form)?]),
        FormSource::File { path } => std::fs::read_to_string(path)?
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(parse_form)
            .collect(),
        FormSource::TreeLayer { path, dim } => {
            let text = std::fs::read_to_string(path)?;
            let mut out = Vec::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let node: odduniv::escalation::EscalatorNode = serde_json::from_str(line)?;
                if node.dim == *dim {
                    out.push(node.form()?);
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = JobConfig::new(CommandKind::Sweep);
        cfg.form = Some(FormSource::TreeLayer { path: "tree.jsonl".into(), dim: 4 });
        cfg.budgets = Budgets { time_seconds: Some(60), memory_mb: Some(512), enumeration: Some(1 << 30) };
        cfg.outputs.jsonl = Some("out.jsonl".into());
        cfg.checkpoint = Some("ck.jsonl".into());
        cfg.params = Params { lo: Some(1), hi: Some(99), n: vec![3, 5], reformulated: Some("11x^2+8xy+24y^2".into()), ..Default::default() };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: JobConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn zero_budget_rejected() {
        let mut cfg = JobConfig::new(CommandKind::Theta);
        cfg.budgets.time_seconds = Some(0);
        assert!(cfg.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn file_form_is_lossless(
            time in proptest::option::of(1u64..1_000_000),
            enumeration in proptest::option::of(1u64..u64::MAX),
            factor in 1u64..100,
            jobs in proptest::option::of(1usize..64),
            hi in proptest::option::of(0u64..u64::MAX),
            n in proptest::collection::vec(0u64..1_000_000, 0..5),
            form in "[a-z0-9^+ ]{0,20}",
            full in proptest::bool::ANY,
        ) {
            let mut cfg = JobConfig::new(CommandKind::Certify);
            cfg.form = Some(FormSource::Inline { form });
            cfg.budgets = Budgets { time_seconds: time, memory_mb: None, enumeration };
            cfg.truncation_factor = factor;
            cfg.jobs = jobs;
            cfg.params = Params { hi, n, full, ..Default::default() };
            let dir = std::env::temp_dir().join(format!("odduniv-cfg-{}", std::process::id()));
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join("job.json");
            cfg.save(&path).unwrap();
            proptest::prop_assert_eq!(JobConfig::load(&path).unwrap(), cfg);
        }
    }

    #[test]
    fn gram_json_input() {
        let q = parse_form("[[2,1],[1,2]]").unwrap();
        assert_eq!(q.disc(), 3);
        assert!(matches!(parse_form("[[2,1],[0,2]]"), Err(Error::NotSymmetric { .. })));
    }
}
