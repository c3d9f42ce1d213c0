//! Experiment configuration in a plain-text `key = value` schema.
//!
//! ```text
//! # comment
//! code = bch:127,113
//! ebno_db = 4.0, 4.5, 5.0
//! algorithm = sgrand:heap,T=50000
//! algorithm = psgrand:n=8,T=50000
//! algorithm = orb:T=50000
//! algorithm = hybrid:T=50000,n=8,budget=50000
//! patterns = linear:50000
//! min_errors = 200
//! max_trials = 1e7
//! seed = 1
//! ```
//!
//! `algorithm` may repeat. Options after the colon are comma separated.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::code::CodeSpec;
use crate::error::{Error, Result};
use crate::psgrand::BatchSchedule;
use crate::sgrand::Backing;

pub const DEFAULT_MIN_ERRORS: u64 = 200;
pub const DEFAULT_MAX_TRIALS: u64 = 10_000_000;
pub const DEFAULT_LATENCY_TRIALS: u64 = 1000;
pub const DEFAULT_WARMUP: u64 = 50;

/// Where ORB-type decoders get their patterns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternSource {
    /// Generate the first `T` patterns under linear γ.
    Linear(usize),
    File(PathBuf),
}

impl FromStr for PatternSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("linear", t)) => Ok(PatternSource::Linear(parse_count(t)? as usize)),
            _ => Ok(PatternSource::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for PatternSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSource::Linear(t) => write!(f, "linear:{t}"),
            PatternSource::File(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlgorithmKind {
    Sgrand {
        backing: Backing,
    },
    Psgrand {
        schedule: BatchSchedule,
        k_max: Option<u64>,
        prune: bool,
        early_term: bool,
        recursion: bool,
        backing: Backing,
    },
    Orb {
        batch: usize,
    },
    Hybrid {
        schedule: BatchSchedule,
        prune: bool,
        early_term: bool,
        recursion: bool,
        backing: Backing,
        orb_batch: usize,
        /// Test budget of the tree phase.
        budget: Option<u64>,
    },
}

/// One decoder under test, with the text it was parsed from as its label.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub label: String,
    pub kind: AlgorithmKind,
    /// Query limit for tree searches; pattern-set size for ORB types.
    pub t: Option<u64>,
}

impl AlgorithmSpec {
    pub fn uses_patterns(&self) -> bool {
        matches!(self.kind, AlgorithmKind::Orb { .. } | AlgorithmKind::Hybrid { .. })
    }
}

/// Accepts plain integers and float notation such as `5e4`.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < u64::MAX as f64 => Ok(v as u64),
        _ => Err(Error::Config(format!("`{s}` is not a non-negative integer"))),
    }
}

fn parse_schedule(s: &str) -> Result<BatchSchedule> {
    let sizes = s
        .split('/')
        .map(|v| parse_count(v).map(|n| n as usize))
        .collect::<Result<Vec<_>>>()?;
    let schedule = if sizes.len() == 1 {
        BatchSchedule::Constant(sizes[0])
    } else {
        BatchSchedule::PerRound(sizes)
    };
    schedule.validate()?;
    Ok(schedule)
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    /// `name[:opt,opt,...]`. Options: `heap`, `array`, `n=8` (or `n=8/4/2`
    /// per round), `kmax=`, `T=`, `budget=`, `no-prune`, `no-early-term`,
    /// `no-recursion`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, opts) = s.split_once(':').unwrap_or((s, ""));
        let mut backing = Backing::Heap;
        let mut schedule = BatchSchedule::default();
        let mut batch_given = false;
        let mut k_max = None;
        let mut t = None;
        let mut budget = None;
        let (mut prune, mut early_term, mut recursion) = (true, true, true);
        for opt in opts.split(',').map(str::trim).filter(|o| !o.is_empty()) {
            match opt.split_once('=') {
                Some(("n", v)) => {
                    schedule = parse_schedule(v)?;
                    batch_given = true;
                }
                Some(("kmax", v)) => k_max = Some(parse_count(v)?),
                Some(("T", v)) => t = Some(parse_count(v)?),
                Some(("budget", v)) => budget = Some(parse_count(v)?),
                Some((k, _)) => return Err(Error::Config(format!("unknown option `{k}` in `{s}`"))),
                None => match opt {
                    "heap" | "array" => backing = opt.parse()?,
                    "no-prune" => prune = false,
                    "no-early-term" => early_term = false,
                    "no-recursion" => recursion = false,
                    _ => return Err(Error::Config(format!("unknown option `{opt}` in `{s}`"))),
                },
            }
        }
        let kind = match name {
            "sgrand" => AlgorithmKind::Sgrand { backing },
            "psgrand" => AlgorithmKind::Psgrand {
                schedule,
                k_max,
                prune,
                early_term,
                recursion,
                backing,
            },
            "orb" => AlgorithmKind::Orb {
                batch: if batch_given { schedule.size(1) } else { 1 },
            },
            "hybrid" => AlgorithmKind::Hybrid {
                orb_batch: schedule.size(1),
                schedule,
                prune,
                early_term,
                recursion,
                backing,
                budget,
            },
            other => return Err(Error::Config(format!("unknown algorithm `{other}`"))),
        };
        if t == Some(0) {
            return Err(Error::Config(format!("`T` must be positive in `{s}`")));
        }
        Ok(AlgorithmSpec {
            label: s.to_string(),
            kind,
            t,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub code: CodeSpec,
    pub ebno_db: Vec<f64>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub patterns: Option<PatternSource>,
    /// Stop a point once every algorithm has this many block errors.
    pub min_errors: u64,
    /// Stop a point after this many trials regardless.
    pub max_trials: u64,
    pub seed: u64,
    /// Transmit uniformly random messages instead of the zero codeword.
    pub random_messages: bool,
    /// Timed decodes per point in latency runs.
    pub latency_trials: u64,
    /// Untimed decodes per algorithm before timing starts.
    pub warmup: u64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(code: CodeSpec, ebno_db: Vec<f64>, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            code,
            ebno_db,
            algorithms,
            patterns: None,
            min_errors: DEFAULT_MIN_ERRORS,
            max_trials: DEFAULT_MAX_TRIALS,
            seed: 1,
            random_messages: false,
            latency_trials: DEFAULT_LATENCY_TRIALS,
            warmup: DEFAULT_WARMUP,
            out: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_trials == 0 {
            return Err(Error::Config("max_trials must be at least 1".into()));
        }
        if self.latency_trials == 0 {
            return Err(Error::Config("latency_trials must be at least 1".into()));
        }
        if self.ebno_db.is_empty() || self.ebno_db.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("ebno_db must list finite values".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithm given".into()));
        }
        for a in &self.algorithms {
            if a.uses_patterns() && a.t.is_none() && self.patterns.is_none() {
                return Err(Error::Config(format!(
                    "`{}` needs `patterns` or a `T=` option",
                    a.label
                )));
            }
        }
        Ok(())
    }
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{s}` is not a boolean"))),
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut code = None;
        let mut ebno = Vec::new();
        let mut algorithms = Vec::new();
        let mut config = ExperimentConfig::new(CodeSpec::Bch { n: 7, k: 4 }, vec![], vec![]);
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "code" => code = Some(value.parse::<CodeSpec>()?),
                "ebno_db" => {
                    for v in value.split(',') {
                        ebno.push(v.trim().parse::<f64>().map_err(|_| {
                            Error::Config(format!("line {}: bad Eb/N0 `{v}`", no + 1))
                        })?);
                    }
                }
                "algorithm" => algorithms.push(value.parse::<AlgorithmSpec>()?),
                "patterns" => config.patterns = Some(value.parse()?),
                "min_errors" => config.min_errors = parse_count(value)?,
                "max_trials" | "trials" => config.max_trials = parse_count(value)?,
                "seed" => config.seed = parse_count(value)?,
                "random_messages" => config.random_messages = parse_bool(value)?,
                "latency_trials" => config.latency_trials = parse_count(value)?,
                "warmup" => config.warmup = parse_count(value)?,
                "out" => config.out = Some(PathBuf::from(value)),
                other => {
                    return Err(Error::Config(format!("line {}: unknown key `{other}`", no + 1)))
                }
            }
        }
        config.code = code.ok_or_else(|| Error::Config("missing `code`".into()))?;
        config.ebno_db = ebno;
        config.algorithms = algorithms;
        config.validate()?;
        Ok(config)
    }
}
