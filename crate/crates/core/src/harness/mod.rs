//! Monte Carlo experiment driver: BLER and query statistics, paired latency
//! measurements and search-cost curves.
//!
//! Every trial derives its noise from `(seed, Eb/N0 index, trial index)`, and
//! all algorithms decode the same realization, so comparisons are paired and
//! results do not depend on the number of workers (`GRAND_WORKERS`).

pub mod config;
pub mod fit;
pub mod metrics;

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

pub use config::{parse_count, AlgorithmKind, AlgorithmSpec, ExperimentConfig, PatternSource};
pub use fit::{polyfit, Fit};
pub use metrics::{emit, from_json, to_csv, to_json, MetricsRow, OutputFormat, METRICS_VERSION};

use crate::bits::BitVec;
use crate::channel::{observe, transmit, ChannelConfig, ReliabilityProfile};
use crate::code::LinearCode;
use crate::decode::{DecodeResult, TraceOptions};
use crate::error::{Error, Result};
use crate::hybrid::{hybrid_decode, HybridOptions};
use crate::orb::{generate_pattern_set, load_pattern_set, orb_decode, AbstractPatternSet, Gamma, OrbOptions};
use crate::psgrand::{psgrand_decode, PsgrandOptions};
use crate::sgrand::{sgrand_decode, sgrand_explore, Backing, SgrandOptions};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "GRAND_WORKERS";

/// Trials simulated between stopping-rule checks.
const CHUNK: u64 = 1024;

/// An algorithm with its pattern set loaded, ready to decode.
#[derive(Debug, Clone)]
pub struct PreparedAlgorithm {
    pub spec: AlgorithmSpec,
    set: Option<Arc<AbstractPatternSet>>,
    set_label: String,
}

/// Per-trial outcome of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub codeword: Option<BitVec>,
    pub zeta: f64,
    pub queries: u64,
    pub rounds: u64,
    pub parity_rows_checked: u64,
    /// Tests spent by the ORB phase of a hybrid decode.
    pub orb_queries: Option<u64>,
}

impl TrialOutcome {
    fn from_result(r: DecodeResult, orb_queries: Option<u64>) -> Self {
        Self {
            codeword: r.codeword,
            zeta: r.zeta,
            queries: r.counters.queries,
            rounds: r.counters.rounds,
            parity_rows_checked: r.counters.parity_rows_checked,
            orb_queries,
        }
    }
}

/// One line of a per-trial log.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: usize,
    pub ebno_db: f64,
    pub trial: u64,
    pub block_error: bool,
    pub queries: u64,
    pub zeta: f64,
}

fn load_set(source: &PatternSource, n: usize, cache: &mut Vec<(PatternSource, Arc<AbstractPatternSet>)>) -> Result<Arc<AbstractPatternSet>> {
    if let Some((_, s)) = cache.iter().find(|(k, _)| k == source) {
        return Ok(s.clone());
    }
    let set = match source {
        PatternSource::Linear(t) => {
            let t = if n < 64 { (*t).min(1usize << n) } else { *t };
            generate_pattern_set(n, t, Gamma::Linear)?
        }
        PatternSource::File(p) => load_pattern_set(p)?,
    };
    set.check_length(n)?;
    let set = Arc::new(set);
    cache.push((source.clone(), set.clone()));
    Ok(set)
}

/// Builds or loads every pattern set the algorithms need.
pub fn prepare(config: &ExperimentConfig, code: &LinearCode) -> Result<Vec<PreparedAlgorithm>> {
    config.validate()?;
    let mut cache = Vec::new();
    config
        .algorithms
        .iter()
        .map(|spec| {
            if !spec.uses_patterns() {
                return Ok(PreparedAlgorithm {
                    spec: spec.clone(),
                    set: None,
                    set_label: "-".into(),
                });
            }
            let (set, label) = match (&config.patterns, spec.t) {
                (Some(src), None) => (load_set(src, code.n(), &mut cache)?, src.to_string()),
                (Some(src), Some(t)) => {
                    let full = load_set(src, code.n(), &mut cache)?;
                    let t = t as usize;
                    if t == full.len() {
                        (full, src.to_string())
                    } else {
                        (Arc::new(full.truncated(t)?), format!("{src}[..{t}]"))
                    }
                }
                (None, Some(t)) => {
                    let src = PatternSource::Linear(t as usize);
                    (load_set(&src, code.n(), &mut cache)?, src.to_string())
                }
                (None, None) => unreachable!("rejected by validate"),
            };
            Ok(PreparedAlgorithm {
                spec: spec.clone(),
                set: Some(set),
                set_label: label,
            })
        })
        .collect()
}

impl PreparedAlgorithm {
    pub fn label(&self) -> &str {
        &self.spec.label
    }

    pub fn pattern_set(&self) -> Option<&AbstractPatternSet> {
        self.set.as_deref()
    }

    pub fn decode(&self, profile: &ReliabilityProfile, code: &LinearCode) -> Result<TrialOutcome> {
        let t = self.spec.t;
        let outcome = match &self.spec.kind {
            AlgorithmKind::Sgrand { backing } => {
                let options = SgrandOptions {
                    backing: *backing,
                    max_queries: t,
                    trace: TraceOptions::off(),
                };
                TrialOutcome::from_result(sgrand_decode(profile, code, &options)?, None)
            }
            AlgorithmKind::Psgrand {
                schedule,
                k_max,
                prune,
                early_term,
                recursion,
                backing,
            } => {
                let options = PsgrandOptions {
                    schedule: schedule.clone(),
                    k_max: *k_max,
                    max_queries: t,
                    prune: *prune,
                    early_term: *early_term,
                    recursion: *recursion,
                    backing: *backing,
                    trace: TraceOptions::off(),
                };
                TrialOutcome::from_result(psgrand_decode(profile, code, &options)?, None)
            }
            AlgorithmKind::Orb { batch } => {
                let options = OrbOptions {
                    max_queries: None,
                    batch: *batch,
                    trace: false,
                };
                let set = self.set.as_deref().expect("prepared");
                TrialOutcome::from_result(orb_decode(profile, code, set, &options)?.result, None)
            }
            AlgorithmKind::Hybrid {
                schedule,
                prune,
                early_term,
                recursion,
                backing,
                orb_batch,
                budget,
            } => {
                let options = HybridOptions {
                    psgrand: PsgrandOptions {
                        schedule: schedule.clone(),
                        k_max: None,
                        max_queries: *budget,
                        prune: *prune,
                        early_term: *early_term,
                        recursion: *recursion,
                        backing: *backing,
                        trace: TraceOptions::off(),
                    },
                    orb_batch: *orb_batch,
                };
                let set = self.set.as_deref().expect("prepared");
                let out = hybrid_decode(profile, code, set, &options)?;
                TrialOutcome::from_result(out.result, Some(out.orb_queries))
            }
        };
        Ok(outcome)
    }
}

/// Seed of the `index`-th Eb/N0 point (splitmix64 finalizer).
pub fn point_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Transmitted codeword and channel output of one trial.
pub fn realize(code: &LinearCode, cfg: &ChannelConfig, trial: u64, random_messages: bool) -> (BitVec, Vec<f64>) {
    let mut rng = cfg.trial_rng(trial);
    let codeword = if random_messages {
        let message = BitVec::from_ones(code.k(), (0..code.k()).filter(|_| rng.random::<bool>()));
        code.encode(&message).expect("message length is k")
    } else {
        BitVec::zeros(code.n())
    };
    let y = transmit(&codeword, cfg, &mut rng);
    (codeword, y)
}

/// Runs `f` on a pool sized by `GRAND_WORKERS`, or rayon's default.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => {
            let threads = parse_count(&v)? as usize;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    trials: u64,
    errors: u64,
    queries: u64,
    rounds: u64,
    rows_checked: u64,
    rows_possible: u64,
    wall_ns: u128,
}

impl Tally {
    fn row(&self, alg: &PreparedAlgorithm, ebno_db: f64, seed: u64, code: &LinearCode) -> MetricsRow {
        let t = self.trials.max(1) as f64;
        MetricsRow {
            format_version: METRICS_VERSION.into(),
            algorithm: alg.label().into(),
            ebno_db,
            trials: self.trials,
            block_errors: self.errors,
            bler: self.errors as f64 / t,
            avg_queries: self.queries as f64 / t,
            avg_rounds: self.rounds as f64 / t,
            avg_fraction_parity_checked: if self.rows_possible == 0 {
                0.0
            } else {
                self.rows_checked as f64 / self.rows_possible as f64
            },
            wall_ns_per_decode: self.wall_ns as f64 / t,
            seed,
            code: code.descriptor().into(),
            pattern_set: alg.set_label.clone(),
        }
    }
}

/// Outcomes of every algorithm on one trial, with per-decode wall time.
type TrialRow = (BitVec, Vec<(TrialOutcome, u128)>);

fn run_trial(
    algorithms: &[PreparedAlgorithm],
    code: &LinearCode,
    cfg: &ChannelConfig,
    trial: u64,
    random_messages: bool,
) -> Result<TrialRow> {
    let (sent, y) = realize(code, cfg, trial, random_messages);
    let profile = observe(&y, cfg);
    let outcomes = algorithms
        .iter()
        .map(|alg| {
            let start = Instant::now();
            let out = alg.decode(&profile, code)?;
            Ok((out, start.elapsed().as_nanos()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((sent, outcomes))
}

/// BLER and work statistics, one row per (algorithm, Eb/N0).
pub fn run_bler(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    Ok(run_bler_logged(config, false)?.0)
}

/// As [`run_bler`], optionally keeping a record of every decode.
pub fn run_bler_logged(config: &ExperimentConfig, log: bool) -> Result<(Vec<MetricsRow>, Vec<TrialRecord>)> {
    config.validate()?;
    let code = LinearCode::build(&config.code)?;
    let algorithms = prepare(config, &code)?;
    let r = code.redundancy() as u64;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (index, &ebno_db) in config.ebno_db.iter().enumerate() {
        let cfg = ChannelConfig::new(ebno_db, code.rate(), point_seed(config.seed, index));
        let mut tallies = vec![Tally::default(); algorithms.len()];
        let mut next = 0u64;
        let done = |t: &[Tally], next: u64| {
            next >= config.max_trials || t.iter().all(|t| t.errors >= config.min_errors)
        };
        while !done(&tallies, next) {
            let end = (next + CHUNK).min(config.max_trials);
            let chunk: Vec<TrialRow> = with_workers(|| {
                (next..end)
                    .into_par_iter()
                    .map(|trial| run_trial(&algorithms, &code, &cfg, trial, config.random_messages))
                    .collect::<Result<Vec<_>>>()
            })??;
            let base = next;
            for (offset, (sent, outcomes)) in chunk.into_iter().enumerate() {
                let trial = base + offset as u64;
                for (a, (out, ns)) in outcomes.into_iter().enumerate() {
                    let tally = &mut tallies[a];
                    let error = out.codeword.as_ref() != Some(&sent);
                    tally.trials += 1;
                    tally.errors += error as u64;
                    tally.queries += out.queries;
                    tally.rounds += out.rounds;
                    tally.rows_checked += out.parity_rows_checked;
                    tally.rows_possible += out.queries * r;
                    tally.wall_ns += ns;
                    if log {
                        records.push(TrialRecord {
                            algorithm: a,
                            ebno_db,
                            trial,
                            block_error: error,
                            queries: out.queries,
                            zeta: out.zeta,
                        });
                    }
                }
                next = trial + 1;
                if done(&tallies, next) {
                    break;
                }
            }
        }
        rows.extend(
            algorithms
                .iter()
                .zip(&tallies)
                .map(|(alg, t)| t.row(alg, ebno_db, config.seed, &code)),
        );
    }
    Ok((rows, records))
}

/// Paired single-threaded timing: every algorithm decodes the same
/// `latency_trials` realizations after `warmup` untimed decodes.
pub fn run_latency(config: &ExperimentConfig) -> Result<Vec<MetricsRow>> {
    config.validate()?;
    let code = LinearCode::build(&config.code)?;
    let algorithms = prepare(config, &code)?;
    let r = code.redundancy() as u64;
    let mut rows = Vec::new();
    for (index, &ebno_db) in config.ebno_db.iter().enumerate() {
        let cfg = ChannelConfig::new(ebno_db, code.rate(), point_seed(config.seed, index));
        let realizations: Vec<(BitVec, ReliabilityProfile)> = (0..config.latency_trials)
            .map(|trial| {
                let (sent, y) = realize(&code, &cfg, trial, config.random_messages);
                (sent, observe(&y, &cfg))
            })
            .collect();
        for alg in &algorithms {
            for (_, profile) in realizations.iter().cycle().take(config.warmup as usize) {
                alg.decode(profile, &code)?;
            }
        }
        // Algorithms take turns on each realization, starting from a rotating
        // position, so drift in machine speed is shared by all of them.
        let mut tallies = vec![Tally::default(); algorithms.len()];
        for (trial, (sent, profile)) in realizations.iter().enumerate() {
            for k in 0..algorithms.len() {
                let i = (trial + k) % algorithms.len();
                let start = Instant::now();
                let out = algorithms[i].decode(profile, &code)?;
                let tally = &mut tallies[i];
                tally.wall_ns += start.elapsed().as_nanos();
                tally.trials += 1;
                tally.errors += (out.codeword.as_ref() != Some(sent)) as u64;
                tally.queries += out.queries;
                tally.rounds += out.rounds;
                tally.rows_checked += out.parity_rows_checked;
                tally.rows_possible += out.queries * r;
            }
        }
        for (alg, tally) in algorithms.iter().zip(&tallies) {
            rows.push(tally.row(alg, ebno_db, config.seed, &code));
        }
    }
    Ok(rows)
}

/// One point of a search-cost curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatencyPoint {
    pub tests: u64,
    pub wall_ns: f64,
}

/// Wall time of serial SGRAND forced to run exactly `t` tests, for each `t`
/// in `tests`. Each point is the mean over `profiles` of the fastest of
/// `reps` repetitions.
pub fn explore_latency(
    profiles: &[ReliabilityProfile],
    code: &LinearCode,
    backing: Backing,
    tests: &[u64],
    reps: usize,
) -> Result<Vec<LatencyPoint>> {
    if profiles.is_empty() || reps == 0 {
        return Err(Error::Config("latency curve needs profiles and repetitions".into()));
    }
    for p in profiles.iter().take(2) {
        sgrand_explore(p, code, backing, tests.iter().copied().max().unwrap_or(1))?;
    }
    // Every repetition sweeps all points, in alternating directions, so a
    // slow stretch of the machine does not land on one point only. Each
    // profile is timed on its own and keeps its fastest run.
    let mut best = vec![vec![f64::INFINITY; profiles.len()]; tests.len()];
    for rep in 0..reps {
        let mut order: Vec<usize> = (0..tests.len()).collect();
        if rep % 2 == 1 {
            order.reverse();
        }
        for i in order {
            for (slot, p) in best[i].iter_mut().zip(profiles) {
                let start = Instant::now();
                sgrand_explore(p, code, backing, tests[i])?;
                *slot = slot.min(start.elapsed().as_nanos() as f64);
            }
        }
    }
    Ok(tests
        .iter()
        .zip(best)
        .map(|(&tests, times)| LatencyPoint {
            tests,
            wall_ns: times.iter().sum::<f64>() / times.len() as f64,
        })
        .collect())
}

/// Channel observations for `count` trials at one Eb/N0.
pub fn sample_profiles(code: &LinearCode, ebno_db: f64, seed: u64, count: u64) -> Vec<ReliabilityProfile> {
    let cfg = ChannelConfig::new(ebno_db, code.rate(), seed);
    (0..count)
        .map(|trial| {
            let (_, y) = realize(code, &cfg, trial, false);
            observe(&y, &cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(algs: &[&str]) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(
            "hamming:7,4".parse().unwrap(),
            vec![2.0, 4.0],
            algs.iter().map(|a| a.parse().unwrap()).collect(),
        );
        c.min_errors = 20;
        c.max_trials = 3000;
        c.seed = 11;
        c
    }

    #[test]
    fn bler_rows_are_consistent() {
        let config = small_config(&["sgrand", "psgrand:n=4", "orb:T=16"]);
        let rows = run_bler(&config).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(r.trials >= 1 && r.trials <= 3000);
            assert_eq!(r.bler, r.block_errors as f64 / r.trials as f64);
            assert!(r.avg_queries >= 1.0);
            assert!(r.avg_fraction_parity_checked > 0.0 && r.avg_fraction_parity_checked <= 1.0);
        }
        // Both ML decoders see the same trials and make the same decisions.
        assert_eq!(rows[0].trials, rows[1].trials);
        assert_eq!(rows[0].block_errors, rows[1].block_errors);
    }

    #[test]
    fn deterministic_up_to_wall_time() {
        let config = small_config(&["sgrand:array", "hybrid:T=32,n=2"]);
        let strip = |mut rows: Vec<MetricsRow>| {
            for r in &mut rows {
                r.wall_ns_per_decode = 0.0;
            }
            to_csv(&rows)
        };
        let a = strip(run_bler(&config).unwrap());
        let b = strip(run_bler(&config).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn stops_at_exact_error_count() {
        let mut config = small_config(&["sgrand"]);
        config.ebno_db = vec![0.0];
        let (rows, log) = run_bler_logged(&config, true).unwrap();
        assert_eq!(rows[0].block_errors, 20);
        assert!(log.last().unwrap().block_error);
        assert_eq!(log.iter().filter(|r| r.block_error).count(), 20);
    }

    #[test]
    fn random_messages_are_codewords() {
        let code = LinearCode::bch(15, 7).unwrap();
        let cfg = ChannelConfig::new(3.0, code.rate(), 4);
        let mut distinct = std::collections::HashSet::new();
        for t in 0..20 {
            let (c, y) = realize(&code, &cfg, t, true);
            assert!(code.is_codeword(&c));
            assert_eq!(y.len(), 15);
            distinct.insert(c);
        }
        assert!(distinct.len() > 5);
    }

    #[test]
    fn latency_rows() {
        let mut config = small_config(&["sgrand", "psgrand:n=2"]);
        config.latency_trials = 50;
        config.warmup = 5;
        let rows = run_latency(&config).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.trials == 50 && r.wall_ns_per_decode > 0.0));
    }

    #[test]
    fn explore_curve_points() {
        let code = LinearCode::bch(31, 21).unwrap();
        let profiles = sample_profiles(&code, 4.0, 3, 2);
        let pts = explore_latency(&profiles, &code, Backing::Heap, &[10, 100], 3).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts[1].wall_ns > 0.0);
    }

    #[test]
    fn point_seeds_differ() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_ne!(point_seed(1, 0), point_seed(2, 0));
    }
}
