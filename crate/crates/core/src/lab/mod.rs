//! Property suites, reports and corpus files for the command-line runner.
//!
//! Every suite is a deterministic function of its [`RunConfig`]: the corpus
//! comes from `ChaCha8Rng::seed_from_u64(seed)` and all checks run in a
//! fixed order on one thread, so two runs differ only in `elapsed_ms`.

mod corpus_files;
mod suites;

pub use corpus_files::{gen_corpus, CorpusSidecar};
pub use suites::run_suite;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown suite {0:?} (expected drazin, operator, structure or all)")]
    UnknownSuite(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl LabError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Drazin,
    Operator,
    Structure,
    All,
}

impl FromStr for Suite {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "drazin" => Ok(Suite::Drazin),
            "operator" => Ok(Suite::Operator),
            "structure" => Ok(Suite::Structure),
            "all" => Ok(Suite::All),
            other => Err(LabError::UnknownSuite(other.to_string())),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Drazin => "drazin",
            Suite::Operator => "operator",
            Suite::Structure => "structure",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Relative residual tolerance for floating-point checks.
    pub tol: f64,
    pub window: usize,
    pub corpus_size: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            tol: 1e-8,
            window: 128,
            corpus_size: 50,
            output: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), LabError> {
        let mut problems = Vec::new();
        if !(self.tol.is_finite() && self.tol > 0.0) {
            problems.push(format!("tol must be positive and finite, got {}", self.tol));
        }
        if self.window < 8 {
            problems.push(format!("window must be at least 8, got {}", self.window));
        }
        if self.corpus_size < 1 {
            problems.push("corpus size must be at least 1".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(LabError::Config(problems.join("; ")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub cases: usize,
    pub skipped: usize,
    pub tol: f64,
    /// Worst value of each named residual over the cases.
    pub residuals: BTreeMap<String, f64>,
    /// The first few failing cases.
    pub failures: Vec<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub config: RunConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl SuiteReport {
    fn new(suite: Suite, config: &RunConfig, records: Vec<CheckRecord>) -> Self {
        let passed = records.iter().filter(|r| r.status == Status::Pass).count();
        Self {
            schema: SCHEMA_VERSION,
            suite: suite.name().to_string(),
            config: config.clone(),
            summary: Summary {
                checks: records.len(),
                passed,
                failed: records.len() - passed,
            },
            records,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn kinds(&self) -> usize {
        self.records.len()
    }

    pub fn record(&self, id: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "suite {}  seed {}  tol {:e}  window {}  corpus {}\n",
            self.suite, c.seed, c.tol, c.window, c.corpus_size
        );
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let residuals: Vec<String> = r.residuals.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
            let _ = writeln!(
                out,
                "{status} {:<40} cases={:<4} {}  [{}]",
                r.id,
                r.cases,
                residuals.join(" "),
                r.anchor
            );
            for f in &r.failures {
                let _ = writeln!(out, "     {f}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(out, "summary: {} checks, {} passed, {} failed", s.checks, s.passed, s.failed);
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| LabError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| LabError::io(path, e))?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

const MAX_LISTED_FAILURES: usize = 8;

/// Accumulates one check kind over many cases.
pub(crate) struct Tally {
    id: String,
    anchor: &'static str,
    tol: f64,
    cases: usize,
    skipped: usize,
    failed: bool,
    residuals: BTreeMap<String, f64>,
    failures: Vec<String>,
    elapsed: Duration,
}

impl Tally {
    pub(crate) fn new(id: &str, anchor: &'static str, tol: f64) -> Self {
        Self {
            id: id.to_string(),
            anchor,
            tol,
            cases: 0,
            skipped: 0,
            failed: false,
            residuals: BTreeMap::new(),
            failures: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn fail(&mut self, case: &str, message: String) {
        self.failed = true;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(format!("{case}: {message}"));
        }
    }

    /// Runs one case; the closure reports named residuals, each compared
    /// with the tally's tolerance, or an error.
    pub(crate) fn case<E: std::fmt::Display>(
        &mut self,
        case: &str,
        f: impl FnOnce() -> Result<Vec<(&'static str, f64)>, E>,
    ) {
        let start = Instant::now();
        let outcome = f();
        self.elapsed += start.elapsed();
        self.cases += 1;
        match outcome {
            Ok(values) => {
                for (name, v) in values {
                    let worst = self.residuals.entry(name.to_string()).or_insert(0.0);
                    // NaN is a failure and is kept visible in the report.
                    if v.is_nan() || v > *worst {
                        *worst = v;
                    }
                    if v.is_nan() || v > self.tol {
                        self.fail(case, format!("{name} = {v:e} exceeds {:e}", self.tol));
                    }
                }
            }
            Err(e) => self.fail(case, e.to_string()),
        }
    }

    pub(crate) fn skip(&mut self) {
        self.skipped += 1;
    }

    pub(crate) fn finish(self) -> CheckRecord {
        CheckRecord {
            status: if self.failed || self.cases == 0 { Status::Fail } else { Status::Pass },
            id: self.id,
            anchor: self.anchor.to_string(),
            cases: self.cases,
            skipped: self.skipped,
            tol: self.tol,
            residuals: self.residuals,
            failures: self.failures,
            elapsed_ms: self.elapsed.as_secs_f64() * 1e3,
        }
    }
}

/// `0.0` when the statement holds, `1.0` otherwise; lets boolean and
/// integer claims share the residual channel with tolerance 0.
pub(crate) fn indicator(holds: bool) -> f64 {
    if holds {
        0.0
    } else {
        1.0
    }
}
