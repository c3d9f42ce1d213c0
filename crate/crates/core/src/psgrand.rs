//! Parallel SGRAND: batched best-first search over the EP tree.
//!
//! Each round removes the `n_k` smallest patterns from the frontier, tests
//! them together and inserts their children. The best valid pattern seen so
//! far is kept; the search is certified optimal once every frontier element
//! is heavier than it. Optional accelerations: pruning (drop the frontier on
//! a hit, never insert children heavier than the incumbent), tree recursion
//! for soft weights and syndromes, and the minimum-distance early stop.

use std::cmp::Ordering;

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::code::{LinearCode, Syndrome};
use crate::decode::{DecodeResult, RoundTrace, Termination, TraceOptions, TracedPattern, WorkCounters};
use crate::eptree::{EpTree, ErrorPattern};
use crate::error::{Error, Result};
use crate::sgrand::{AnyFrontier, Backing, Frontier};

/// Batch size per round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BatchSchedule {
    Constant(usize),
    /// Sizes for rounds 1, 2, ...; the last entry repeats.
    PerRound(Vec<usize>),
}

impl BatchSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            BatchSchedule::Constant(n) => *n >= 1,
            BatchSchedule::PerRound(v) => !v.is_empty() && v.iter().all(|&n| n >= 1),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config("batch sizes must be at least 1".into()))
        }
    }

    /// Batch size of 1-based round `k`.
    pub fn size(&self, k: u64) -> usize {
        match self {
            BatchSchedule::Constant(n) => *n,
            BatchSchedule::PerRound(v) => {
                let i = (k.max(1) - 1).min(v.len() as u64 - 1) as usize;
                v[i]
            }
        }
    }
}

impl Default for BatchSchedule {
    fn default() -> Self {
        BatchSchedule::Constant(8)
    }
}

#[derive(Debug, Clone)]
pub struct PsgrandOptions {
    pub schedule: BatchSchedule,
    /// Maximum number of rounds.
    pub k_max: Option<u64>,
    /// Maximum number of tests, including any made before a resume.
    pub max_queries: Option<u64>,
    pub prune: bool,
    pub early_term: bool,
    /// Update soft weights and syndromes from the parent instead of
    /// recomputing them.
    pub recursion: bool,
    pub backing: Backing,
    pub trace: TraceOptions,
}

impl Default for PsgrandOptions {
    fn default() -> Self {
        Self {
            schedule: BatchSchedule::default(),
            k_max: None,
            max_queries: None,
            prune: true,
            early_term: true,
            recursion: true,
            backing: Backing::Heap,
            trace: TraceOptions::off(),
        }
    }
}

impl PsgrandOptions {
    pub fn with_batch(n: usize) -> Self {
        Self {
            schedule: BatchSchedule::Constant(n),
            ..Self::default()
        }
    }

    /// No pruning, recursion or early stop.
    pub fn plain(n: usize) -> Self {
        Self {
            prune: false,
            early_term: false,
            recursion: false,
            ..Self::with_batch(n)
        }
    }
}

/// A search in progress, handed over by another decoder.
#[derive(Debug, Clone, Default)]
pub struct ResumeState {
    /// Frontier patterns; no element may be an ancestor of another.
    pub frontier: Vec<ErrorPattern>,
    pub best: Option<ErrorPattern>,
    /// Work already spent, carried into the result.
    pub counters: WorkCounters,
}

/// Sufficient condition for `e` (valid) to be the ML pattern: its soft
/// weight is at most the sum of the `d_min - w(e)` smallest reliabilities
/// outside its support. The sum is empty when `d_min <= w(e)`.
pub fn early_termination_check(e: &BitVec, profile: &ReliabilityProfile, d_min: usize) -> bool {
    let ell = profile.ell();
    let zeta: f64 = e.iter_ones().map(|i| ell[i]).sum();
    let w = e.count_ones();
    let bound: f64 = profile
        .ranking()
        .iter()
        .filter(|&&i| !e.get(i))
        .take(d_min.saturating_sub(w))
        .map(|&i| ell[i])
        .sum();
    zeta <= bound
}

/// With `strict`, equality does not suffice. Used for a best pattern that was
/// not found in search order, where an untested tie could still win.
fn early_termination_ranked(tree: &EpTree<'_>, e: &ErrorPattern, d_min: usize, strict: bool) -> bool {
    let need = d_min.saturating_sub(e.weight());
    let bound: f64 = tree
        .ranked_ell()
        .iter()
        .enumerate()
        .filter(|(j, _)| !e.ranked_bits().get(*j))
        .take(need)
        .map(|(_, l)| l)
        .sum();
    if strict {
        e.zeta() < bound
    } else {
        e.zeta() <= bound
    }
}

/// Syndromes `H e` of a batch of positional patterns, computed from scratch.
pub fn batch_syndrome(code: &LinearCode, batch: &[BitVec]) -> Vec<Syndrome> {
    batch.iter().map(|e| code.syndrome_unchecked(e)).collect()
}

pub fn psgrand_decode(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    options: &PsgrandOptions,
) -> Result<DecodeResult> {
    let tree = EpTree::new(profile, code)?;
    let state = ResumeState {
        frontier: vec![tree.root()],
        best: None,
        counters: WorkCounters::default(),
    };
    psgrand_resume(&tree, code, state, options)
}

/// Continues a search from `state`.
pub fn psgrand_resume(
    tree: &EpTree<'_>,
    code: &LinearCode,
    state: ResumeState,
    options: &PsgrandOptions,
) -> Result<DecodeResult> {
    options.schedule.validate()?;
    let profile = tree.profile();
    let mut search = Search::new(tree, code, state, options);
    let termination = search.run();
    Ok(DecodeResult::new(
        search.best.as_ref(),
        profile,
        termination,
        search.counters,
        search.trace,
    ))
}

struct Search<'s, 'a> {
    tree: &'s EpTree<'a>,
    code: &'s LinearCode,
    options: &'s PsgrandOptions,
    target: Syndrome,
    frontier: AnyFrontier,
    best: Option<ErrorPattern>,
    counters: WorkCounters,
    trace: Vec<RoundTrace>,
}

impl<'s, 'a> Search<'s, 'a> {
    fn new(
        tree: &'s EpTree<'a>,
        code: &'s LinearCode,
        state: ResumeState,
        options: &'s PsgrandOptions,
    ) -> Self {
        let mut counters = state.counters;
        let target = code.syndrome_unchecked(tree.profile().hard());
        counters.parity_bits += (code.n() * code.redundancy()) as u64;
        let mut frontier = state.frontier;
        if options.prune {
            if let Some(best) = &state.best {
                frontier.retain(|e| e.zeta() <= best.zeta());
            }
        }
        counters.observe_frontier(frontier.len());
        Self {
            tree,
            code,
            options,
            target,
            frontier: AnyFrontier::from_items(options.backing, frontier),
            best: state.best,
            counters,
            trace: Vec::new(),
        }
    }

    fn zeta_min(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |e| e.zeta())
    }

    fn improves(&self, e: &ErrorPattern) -> bool {
        self.best
            .as_ref()
            .is_none_or(|b| e.search_cmp(b) == Ordering::Less)
    }

    fn run(&mut self) -> Termination {
        let d_min = self.code.d_min();
        if self.options.early_term {
            if let Some(best) = &self.best {
                if early_termination_ranked(self.tree, best, d_min, true) {
                    return Termination::EarlyTerminated;
                }
            }
        }
        let k_max = self.options.k_max.unwrap_or(u64::MAX);
        let max_queries = self.options.max_queries.unwrap_or(u64::MAX);
        let r = self.code.redundancy() as u64;
        let n = self.code.n() as u64;
        let mut round = 0u64;

        loop {
            if self.best.is_some() && self.frontier.min_zeta() > self.zeta_min() {
                return Termination::MlCertified;
            }
            if self.frontier.is_empty() {
                return Termination::FrontierExhausted;
            }
            if round >= k_max || self.counters.queries >= max_queries {
                return Termination::QueryLimit;
            }
            round += 1;
            self.counters.rounds += 1;

            let budget = (max_queries - self.counters.queries) as usize;
            let size = self.options.schedule.size(round).min(budget);
            let mut batch = Vec::with_capacity(size);
            while batch.len() < size {
                match self.frontier.pop_min() {
                    Some(e) => batch.push(e),
                    None => break,
                }
            }
            self.counters.queries += batch.len() as u64;
            self.counters.parity_rows_checked += r * batch.len() as u64;

            // Membership tests for the whole batch.
            let valid: Vec<bool> = if self.options.recursion {
                self.counters.parity_bits += r * batch.len() as u64;
                batch.iter().map(|e| *e.syndrome() == self.target).collect()
            } else {
                let positional: Vec<BitVec> =
                    batch.iter().map(|e| e.to_bits(self.tree.profile())).collect();
                self.counters.parity_bits += (n * r + r) * batch.len() as u64;
                batch_syndrome(self.code, &positional)
                    .iter()
                    .map(|s| *s == self.target)
                    .collect()
            };
            let hit = batch
                .iter()
                .zip(&valid)
                .filter(|(_, v)| **v)
                .map(|(e, _)| e)
                .min_by(|a, b| a.search_cmp(b));
            let any_valid = hit.is_some();
            if let Some(hit) = hit {
                if self.improves(hit) {
                    let hit = hit.clone();
                    let stop = self.options.early_term
                        && early_termination_ranked(self.tree, &hit, d_min, false);
                    self.best = Some(hit);
                    if stop {
                        self.record(round, &batch);
                        return Termination::EarlyTerminated;
                    }
                }
            }
            if self.options.prune && any_valid {
                self.frontier.clear();
            }

            let zeta_min = self.zeta_min();
            for e in &batch {
                let tree = self.tree;
                let recursion = self.options.recursion;
                let prune = self.options.prune;
                let counters = &mut self.counters;
                let frontier = &mut self.frontier;
                tree.for_each_child(e, |mut child| {
                    if recursion {
                        counters.zeta_additions += 1;
                        counters.parity_bits += r;
                    } else {
                        child.zeta = tree.zeta_ranked_direct(&child.ranked);
                        counters.zeta_additions += n;
                    }
                    if !(prune && child.zeta > zeta_min) {
                        frontier.push(child);
                    }
                });
            }
            self.counters.observe_frontier(self.frontier.len());
            self.record(round, &batch);
        }
    }

    fn record(&mut self, round: u64, batch: &[ErrorPattern]) {
        if !self.options.trace.rounds {
            return;
        }
        let profile = self.tree.profile();
        self.trace.push(RoundTrace {
            round,
            batch: batch.iter().map(|e| TracedPattern::of(e, profile)).collect(),
            tau: self.frontier.min_zeta(),
            zeta_min: self.zeta_min(),
            queries: self.counters.queries,
            frontier_len: self.frontier.len(),
            frontier: self.options.trace.frontier_snapshots.then(|| {
                self.frontier
                    .sorted()
                    .iter()
                    .map(|e| TracedPattern::of(e, profile))
                    .collect()
            }),
        });
    }
}
