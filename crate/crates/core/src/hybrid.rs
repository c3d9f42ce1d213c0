//! Hybrid enhanced ORBGRAND: an ORB pass over a fixed pattern set, then
//! parallel SGRAND resumed from the envelope of the tested prefix.
//!
//! Because every prefix of a γ-ordered set is a root-containing subtree of
//! the EP tree, the envelope (children of tested nodes that were not tested
//! themselves) is a valid best-first frontier: each untested pattern lies in
//! exactly one envelope member's subtree.

use std::collections::HashSet;

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::code::LinearCode;
use crate::decode::{DecodeResult, TracedPattern, WorkCounters};
use crate::eptree::{parent_ranked, positional_to_ranked, EpTree, ErrorPattern};
use crate::error::{Error, Result};
use crate::orb::{orb_phase, AbstractPatternSet, OrbOptions};
use crate::psgrand::{psgrand_resume, PsgrandOptions, ResumeState};

/// Frontier handed from the ORB phase to the tree search.
#[derive(Debug, Clone, Default)]
pub struct Envelope {
    pub members: Vec<ErrorPattern>,
}

impl Envelope {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Envelope of an arbitrary tested set `e0` (positional patterns). Fails if
/// `e0` is not a subtree containing the root.
pub fn compute_envelope(e0: &[BitVec], tree: &EpTree<'_>) -> Result<Envelope> {
    let ranking = tree.profile().ranking();
    let ranked: Vec<BitVec> = e0.iter().map(|e| positional_to_ranked(e, ranking)).collect();
    let members: HashSet<&BitVec> = ranked.iter().collect();
    if !members.contains(&BitVec::zeros(tree.n())) {
        return Err(Error::PatternSet("tested set lacks the root".into()));
    }
    for e in &ranked {
        if let Some(p) = parent_ranked(e) {
            if !members.contains(&p) {
                return Err(Error::PatternSet(format!(
                    "tested set is not a subtree: parent of {} missing",
                    e
                )));
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for e in &ranked {
        let node = tree.node_from_ranked(e.clone());
        for child in tree.children(&node) {
            if !members.contains(child.ranked_bits()) && seen.insert(child.ranked_bits().clone()) {
                out.push(child);
            }
        }
    }
    Ok(Envelope { members: out })
}

/// Envelope of the first `tested` members of `set`, using the set's
/// precomputed child links. Linear in `tested`.
pub fn envelope_of_prefix(
    set: &AbstractPatternSet,
    tested: usize,
    tree: &EpTree<'_>,
    counters: &mut WorkCounters,
) -> Envelope {
    let n = tree.n();
    let r = tree.redundancy() as u64;
    let mut members = Vec::new();
    for t in 0..tested {
        let p = set.pattern(t);
        let links = set.child_indices(t);
        let (left, right) = match p.last() {
            None => (Some(vec![0u16]), None),
            Some(&top) if (top as usize) + 1 < n => {
                let mut left = p.to_vec();
                *left.last_mut().unwrap() = top + 1;
                let mut right = p.to_vec();
                right.push(top + 1);
                (Some(left), Some(right))
            }
            Some(_) => (None, None),
        };
        for (slot, child) in [left, right].into_iter().enumerate() {
            let Some(child) = child else { continue };
            if links[slot].is_some_and(|c| c < tested) {
                continue;
            }
            counters.zeta_additions += child.len() as u64;
            counters.parity_bits += r * child.len() as u64;
            let bits = BitVec::from_ones(n, child.iter().map(|&j| j as usize));
            members.push(tree.node_from_ranked(bits));
        }
    }
    Envelope { members }
}

#[derive(Debug, Clone)]
pub struct HybridOptions {
    /// Settings of the resumed tree search. Its `max_queries` bounds the
    /// tests of the second phase alone.
    pub psgrand: PsgrandOptions,
    /// Batch size of the ORB phase, for round accounting.
    pub orb_batch: usize,
}

impl Default for HybridOptions {
    fn default() -> Self {
        Self {
            psgrand: PsgrandOptions::default(),
            orb_batch: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HybridOutcome {
    pub result: DecodeResult,
    pub orb_queries: u64,
    pub envelope_len: usize,
    /// Patterns tested by the ORB phase, when tracing.
    pub orb_tested: Vec<TracedPattern>,
}

pub fn hybrid_decode(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    set: &AbstractPatternSet,
    options: &HybridOptions,
) -> Result<HybridOutcome> {
    let tree = EpTree::new(profile, code)?;
    let orb_options = OrbOptions {
        max_queries: None,
        batch: options.orb_batch,
        trace: options.psgrand.trace.rounds,
    };
    let phase1 = orb_phase(&tree, code, set, &orb_options)?;
    let mut counters = phase1.result.counters;
    let best = phase1
        .result
        .error_pattern
        .as_ref()
        .map(|e| tree.node_from_bits(e));
    let envelope = envelope_of_prefix(set, phase1.tested, &tree, &mut counters);
    let envelope_len = envelope.len();
    let state = ResumeState {
        frontier: envelope.members,
        best,
        counters,
    };
    let mut phase2 = options.psgrand.clone();
    phase2.max_queries = phase2
        .max_queries
        .map(|q| q.saturating_add(phase1.result.counters.queries));
    let result = psgrand_resume(&tree, code, state, &phase2)?;
    Ok(HybridOutcome {
        result,
        orb_queries: phase1.result.counters.queries,
        envelope_len,
        orb_tested: phase1
            .result
            .trace
            .into_iter()
            .flat_map(|r| r.batch)
            .collect(),
    })
}
