//! Result types shared by every decoder.

use std::fmt;

use serde::Serialize;

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::eptree::ErrorPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The first valid pattern in search order was returned.
    ValidFound,
    /// The search proved no untested pattern can beat the result.
    MlCertified,
    /// The result met the minimum-distance sufficient condition.
    EarlyTerminated,
    /// Every pattern reachable by the search was tested without a hit.
    FrontierExhausted,
    /// The query or round budget ran out first.
    QueryLimit,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ValidFound => "valid_found",
            Termination::MlCertified => "ml_certified",
            Termination::EarlyTerminated => "early_terminated",
            Termination::FrontierExhausted => "frontier_exhausted",
            Termination::QueryLimit => "query_limit",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Operation counts accumulated during one decode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WorkCounters {
    /// Codebook membership tests.
    pub queries: u64,
    /// Search rounds (one per query for serial decoders).
    pub rounds: u64,
    /// Floating-point additions spent on soft weights.
    pub zeta_additions: u64,
    /// Parity bits computed or combined while forming syndromes.
    pub parity_bits: u64,
    /// Parity-check rows evaluated by row-sequential tests.
    pub parity_rows_checked: u64,
    /// Largest frontier size observed.
    pub frontier_peak: u64,
}

impl WorkCounters {
    pub fn add(&mut self, other: &WorkCounters) {
        self.queries += other.queries;
        self.rounds += other.rounds;
        self.zeta_additions += other.zeta_additions;
        self.parity_bits += other.parity_bits;
        self.parity_rows_checked += other.parity_rows_checked;
        self.frontier_peak = self.frontier_peak.max(other.frontier_peak);
    }

    #[inline]
    pub(crate) fn observe_frontier(&mut self, len: usize) {
        self.frontier_peak = self.frontier_peak.max(len as u64);
    }
}

/// A pattern as recorded in traces: positional bits and soft weight.
#[derive(Debug, Clone, PartialEq)]
pub struct TracedPattern {
    pub bits: BitVec,
    pub zeta: f64,
}

impl TracedPattern {
    pub(crate) fn of(e: &ErrorPattern, profile: &ReliabilityProfile) -> Self {
        Self {
            bits: e.to_bits(profile),
            zeta: e.zeta(),
        }
    }
}

/// State after one search round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub round: u64,
    /// Patterns tested this round, in selection order.
    pub batch: Vec<TracedPattern>,
    /// Minimum soft weight left in the frontier (`inf` when empty).
    pub tau: f64,
    /// Soft weight of the best valid pattern so far (`inf` when none).
    pub zeta_min: f64,
    /// Cumulative queries.
    pub queries: u64,
    pub frontier_len: usize,
    /// Frontier contents in search order, when snapshots are requested.
    pub frontier: Option<Vec<TracedPattern>>,
}

#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub codeword: Option<BitVec>,
    /// Positional error pattern `e*` with `codeword = hard xor e*`.
    pub error_pattern: Option<BitVec>,
    /// `zeta(e*)`, or `inf` when nothing was found.
    pub zeta: f64,
    pub termination: Termination,
    pub counters: WorkCounters,
    pub trace: Vec<RoundTrace>,
}

impl DecodeResult {
    pub(crate) fn new(
        best: Option<&ErrorPattern>,
        profile: &ReliabilityProfile,
        termination: Termination,
        counters: WorkCounters,
        trace: Vec<RoundTrace>,
    ) -> Self {
        let error_pattern = best.map(|e| e.to_bits(profile));
        let codeword = error_pattern.as_ref().map(|e| profile.hard() ^ e);
        Self {
            codeword,
            error_pattern,
            zeta: best.map_or(f64::INFINITY, |e| e.zeta()),
            termination,
            counters,
            trace,
        }
    }

    pub fn found(&self) -> bool {
        self.codeword.is_some()
    }
}

/// Trace recording switches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceOptions {
    pub rounds: bool,
    pub frontier_snapshots: bool,
}

impl TraceOptions {
    pub fn off() -> Self {
        Self::default()
    }

    pub fn rounds() -> Self {
        Self {
            rounds: true,
            frontier_snapshots: false,
        }
    }

    pub fn full() -> Self {
        Self {
            rounds: true,
            frontier_snapshots: true,
        }
    }
}
