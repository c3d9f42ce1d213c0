//! Serial SGRAND: best-first traversal of the EP tree, testing one pattern
//! at a time until the first valid codeword.

mod frontier;

pub use frontier::{AnyFrontier, ArrayFrontier, Backing, Frontier, HeapFrontier};

use crate::channel::ReliabilityProfile;
use crate::code::LinearCode;
use crate::decode::{DecodeResult, RoundTrace, Termination, TraceOptions, TracedPattern, WorkCounters};
use crate::eptree::{EpTree, ErrorPattern};
use crate::error::Result;

#[derive(Debug, Clone, Copy, Default)]
pub struct SgrandOptions {
    pub backing: Backing,
    /// Abandon after this many tests.
    pub max_queries: Option<u64>,
    pub trace: TraceOptions,
}

/// Inserts the children of a just-popped pattern.
pub fn frontier_step<F: Frontier + ?Sized>(
    tree: &EpTree<'_>,
    frontier: &mut F,
    popped: &ErrorPattern,
    counters: &mut WorkCounters,
) {
    tree.for_each_child(popped, |child| {
        counters.zeta_additions += 1;
        frontier.push(child);
    });
    counters.observe_frontier(frontier.len());
}

/// Yields every error pattern in non-decreasing soft weight (ties in
/// colexicographic rank order).
pub struct EpGenerator<'t, 'a> {
    tree: &'t EpTree<'a>,
    frontier: AnyFrontier,
    pending: Option<ErrorPattern>,
    counters: WorkCounters,
}

impl<'t, 'a> EpGenerator<'t, 'a> {
    pub fn new(tree: &'t EpTree<'a>, backing: Backing) -> Self {
        let mut frontier = AnyFrontier::new(backing);
        frontier.push(tree.root());
        Self {
            tree,
            frontier,
            pending: None,
            counters: WorkCounters::default(),
        }
    }

    pub fn frontier(&self) -> &AnyFrontier {
        &self.frontier
    }

    pub fn counters(&self) -> &WorkCounters {
        &self.counters
    }

    /// Expands the last yielded pattern so the frontier reflects the state
    /// after its test. Called implicitly by `next`.
    pub fn settle(&mut self) {
        if let Some(prev) = self.pending.take() {
            frontier_step(self.tree, &mut self.frontier, &prev, &mut self.counters);
        }
    }
}

impl Iterator for EpGenerator<'_, '_> {
    type Item = ErrorPattern;

    fn next(&mut self) -> Option<ErrorPattern> {
        self.settle();
        let e = self.frontier.pop_min()?;
        self.pending = Some(e.clone());
        Some(e)
    }
}

/// Decodes by testing patterns in soft-weight order and returning the first
/// whose flip yields a codeword. Each test checks parity rows one at a time
/// and stops at the first unsatisfied row.
pub fn sgrand_decode(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    options: &SgrandOptions,
) -> Result<DecodeResult> {
    run(profile, code, options, true)
}

/// Runs exactly `tests` pattern tests (fewer only if the tree is exhausted),
/// ignoring validity. Used to measure search cost as a function of the
/// number of tests.
pub fn sgrand_explore(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    backing: Backing,
    tests: u64,
) -> Result<WorkCounters> {
    let options = SgrandOptions {
        backing,
        max_queries: Some(tests),
        trace: TraceOptions::off(),
    };
    Ok(run(profile, code, &options, false)?.counters)
}

fn run(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    options: &SgrandOptions,
    stop_on_valid: bool,
) -> Result<DecodeResult> {
    let tree = EpTree::new(profile, code)?;
    let mut generator = EpGenerator::new(&tree, options.backing);
    let limit = options.max_queries.unwrap_or(u64::MAX);
    let n = code.n() as u64;
    let mut counters = WorkCounters::default();
    let mut trace = Vec::new();

    let termination = loop {
        if counters.queries >= limit {
            break Termination::QueryLimit;
        }
        let Some(e) = generator.next() else {
            break Termination::FrontierExhausted;
        };
        counters.queries += 1;
        counters.rounds += 1;
        let word = profile.hard() ^ &e.to_bits(profile);
        let (valid, rows) = code.check_rows_sequential(&word);
        counters.parity_rows_checked += rows as u64;
        counters.parity_bits += rows as u64 * n;
        if valid && stop_on_valid {
            if options.trace.rounds {
                generator.settle();
                trace.push(round_trace(&generator, &e, e.zeta(), &counters, profile, options.trace));
            }
            let mut total = counters;
            total.add(generator.counters());
            return Ok(DecodeResult::new(
                Some(&e),
                profile,
                Termination::ValidFound,
                total,
                trace,
            ));
        }
        if options.trace.rounds {
            generator.settle();
            trace.push(round_trace(&generator, &e, f64::INFINITY, &counters, profile, options.trace));
        }
    };
    generator.settle();
    counters.add(generator.counters());
    Ok(DecodeResult::new(None, profile, termination, counters, trace))
}

fn round_trace(
    generator: &EpGenerator<'_, '_>,
    tested: &ErrorPattern,
    zeta_min: f64,
    counters: &WorkCounters,
    profile: &ReliabilityProfile,
    options: TraceOptions,
) -> RoundTrace {
    let frontier = generator.frontier();
    RoundTrace {
        round: counters.rounds,
        batch: vec![TracedPattern::of(tested, profile)],
        tau: frontier.min_zeta(),
        zeta_min,
        queries: counters.queries,
        frontier_len: frontier.len(),
        frontier: options.frontier_snapshots.then(|| {
            frontier
                .sorted()
                .iter()
                .map(|e| TracedPattern::of(e, profile))
                .collect()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitVec;

    fn repetition4() -> LinearCode {
        LinearCode::parse_matrix("4 1\n1100\n0110\n0011\n", "rep4".into()).unwrap()
    }

    fn example_profile(hard: &str) -> ReliabilityProfile {
        ReliabilityProfile::new(vec![1.2, 2.1, 0.8, 3.4], BitVec::parse(hard).unwrap()).unwrap()
    }

    fn strings(v: &[TracedPattern]) -> Vec<String> {
        v.iter().map(|t| t.bits.to_string()).collect()
    }

    #[test]
    fn four_bit_frontier_evolution() {
        // 0110 is two flips from both codewords of the length-4 repetition
        // code, so none of the first five patterns is valid.
        let profile = example_profile("0110");
        let code = repetition4();
        for backing in [Backing::Heap, Backing::Array] {
            let options = SgrandOptions {
                backing,
                max_queries: Some(5),
                trace: TraceOptions::full(),
            };
            let result = sgrand_decode(&profile, &code, &options).unwrap();
            assert_eq!(result.termination, Termination::QueryLimit);
            assert_eq!(result.counters.queries, 5);
            let tested: Vec<String> = result.trace.iter().map(|r| r.batch[0].bits.to_string()).collect();
            assert_eq!(tested, ["0000", "0010", "1000", "1010", "0100"]);
            let zetas: Vec<f64> = result.trace.iter().map(|r| r.batch[0].zeta).collect();
            for (z, want) in zetas.iter().zip([0.0, 0.8, 1.2, 2.0, 2.1]) {
                assert!((z - want).abs() < 1e-12);
            }
            let frontiers: Vec<Vec<String>> = result
                .trace
                .iter()
                .map(|r| strings(r.frontier.as_ref().unwrap()))
                .collect();
            assert_eq!(frontiers[0], ["0010"]);
            assert_eq!(frontiers[1], ["1000", "1010"]);
            assert_eq!(frontiers[2], ["1010", "0100", "1100"]);
            assert_eq!(frontiers[3], ["0100", "0110", "1100", "1110"]);
            assert_eq!(frontiers[4], ["0110", "1100", "0001", "1110", "0101"]);
        }
    }

    #[test]
    fn finds_first_valid_in_order() {
        // Only 0100 (soft weight 2.1) lies within two flips of 1111 early on.
        let profile = example_profile("1011");
        let result = sgrand_decode(&profile, &repetition4(), &SgrandOptions::default()).unwrap();
        assert_eq!(result.termination, Termination::ValidFound);
        assert_eq!(result.error_pattern.unwrap().to_string(), "0100");
        assert_eq!(result.codeword.unwrap().to_string(), "1111");
        assert_eq!(result.counters.queries, 5);
        assert!((result.zeta - 2.1).abs() < 1e-12);
    }

    #[test]
    fn noiseless_returns_immediately() {
        let code = LinearCode::bch(15, 7).unwrap();
        let w = code.encode(&BitVec::parse("1011001").unwrap()).unwrap();
        let profile = ReliabilityProfile::new(vec![3.0; 15], w.clone()).unwrap();
        let result = sgrand_decode(&profile, &code, &SgrandOptions::default()).unwrap();
        assert_eq!(result.counters.queries, 1);
        assert_eq!(result.zeta, 0.0);
        assert_eq!(result.codeword.unwrap(), w);
        assert!(result.error_pattern.unwrap().is_zero());
    }

    #[test]
    fn explore_runs_exact_number_of_tests() {
        let code = LinearCode::bch(31, 21).unwrap();
        let ell: Vec<f64> = (0..31).map(|i| 0.1 + i as f64 * 0.37 % 2.0).collect();
        let profile = ReliabilityProfile::new(ell, BitVec::zeros(31)).unwrap();
        for backing in [Backing::Heap, Backing::Array] {
            let c = sgrand_explore(&profile, &code, backing, 300).unwrap();
            assert_eq!(c.queries, 300);
            // Every test checks at least one row.
            assert!(c.parity_rows_checked >= 300);
        }
    }

    #[test]
    fn generator_exhausts_tree() {
        let code = repetition4();
        let profile = example_profile("0000");
        let tree = EpTree::new(&profile, &code).unwrap();
        let all: Vec<ErrorPattern> = EpGenerator::new(&tree, Backing::Heap).collect();
        assert_eq!(all.len(), 16);
        for w in all.windows(2) {
            assert!(w[0].zeta() <= w[1].zeta());
        }
    }
}
