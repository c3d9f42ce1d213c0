//! ORB-type GRAND with γ-ordered pattern sets.
//!
//! An abstract pattern flips rank positions: index `j` (0-based) stands for
//! the `(j+1)`-th least reliable position. At run time the ranking maps it to
//! codeword positions. Abstract patterns are exactly the rank-ordered bits
//! used by the EP tree, so set members can be linked to their tree parents
//! and children once, offline.

mod generate;
mod io;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

pub use generate::generate_pattern_set;
pub use io::{load_pattern_set, save_pattern_set, FORMAT_VERSION, ORDER_NAME};

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::code::{LinearCode, Syndrome};
use crate::decode::{DecodeResult, RoundTrace, Termination, TracedPattern, WorkCounters};
use crate::eptree::{ranked_to_positional, EpTree, ErrorPattern};
use crate::error::{Error, Result};

/// Rank weights `γ_1 <= γ_2 <= ... <= γ_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gamma {
    /// `γ_i = i`, the original ORBGRAND order.
    Linear,
    Explicit(Vec<u64>),
}

impl Gamma {
    pub fn weights(&self, n: usize) -> Result<Vec<u64>> {
        match self {
            Gamma::Linear => Ok((1..=n as u64).collect()),
            Gamma::Explicit(w) => {
                if w.len() != n {
                    return Err(Error::PatternSet(format!(
                        "gamma has {} entries for length {n}",
                        w.len()
                    )));
                }
                if w.iter().any(|&g| g == 0) {
                    return Err(Error::PatternSet("gamma entries must be positive".into()));
                }
                if w.windows(2).any(|p| p[0] > p[1]) {
                    return Err(Error::PatternSet("gamma must be non-decreasing".into()));
                }
                Ok(w.clone())
            }
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Linear => f.write_str("linear"),
            Gamma::Explicit(w) => {
                f.write_str("list:")?;
                for (i, g) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{g}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Gamma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "linear" {
            return Ok(Gamma::Linear);
        }
        let list = s
            .strip_prefix("list:")
            .ok_or_else(|| Error::Parse(format!("unknown gamma '{s}'")))?;
        list.split(',')
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad gamma entry '{v}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Gamma::Explicit)
    }
}

const NONE: u32 = u32::MAX;

/// Ordered list of abstract patterns with precomputed tree links.
#[derive(Debug, Clone)]
pub struct AbstractPatternSet {
    n: usize,
    gamma: Gamma,
    weights: Vec<u64>,
    offsets: Vec<u32>,
    indices: Vec<u16>,
    /// Index of each pattern's tree parent within the set.
    parent: Vec<u32>,
    /// Indices of the `[first-or-left, right]` tree children within the set.
    children: Vec<[u32; 2]>,
}

impl AbstractPatternSet {
    /// Builds a set from flat storage and checks every invariant.
    pub fn from_parts(n: usize, gamma: Gamma, offsets: Vec<u32>, indices: Vec<u16>) -> Result<Self> {
        gamma.weights(n)?;
        if offsets.first() != Some(&0)
            || offsets.windows(2).any(|w| w[0] > w[1])
            || *offsets.last().unwrap() as usize != indices.len()
        {
            return Err(Error::PatternSet("inconsistent pattern offsets".into()));
        }
        if indices.iter().any(|&i| i as usize >= n) {
            return Err(Error::PatternSet(format!("rank index out of range for n={n}")));
        }
        let set = Self::from_parts_unchecked(n, gamma, offsets, indices);
        set.validate()?;
        Ok(set)
    }

    pub(crate) fn from_parts_unchecked(
        n: usize,
        gamma: Gamma,
        offsets: Vec<u32>,
        indices: Vec<u16>,
    ) -> Self {
        let weights = gamma.weights(n).expect("validated gamma");
        let len = offsets.len() - 1;
        let mut set = Self {
            n,
            gamma,
            weights,
            offsets,
            indices,
            parent: vec![NONE; len],
            children: vec![[NONE; 2]; len],
        };
        set.link();
        set
    }

    fn link(&mut self) {
        let mut lookup: HashMap<&[u16], u32> = HashMap::with_capacity(self.len());
        for t in 0..self.len() {
            lookup.entry(self.pattern(t)).or_insert(t as u32);
        }
        let mut parents = vec![NONE; self.len()];
        let mut children = vec![[NONE; 2]; self.len()];
        let mut scratch = Vec::new();
        for t in 0..self.len() {
            let p = self.pattern(t);
            let Some((slot, parent)) = parent_indices(p, &mut scratch) else {
                continue;
            };
            if let Some(&pi) = lookup.get(parent) {
                parents[t] = pi;
                if children[pi as usize][slot] == NONE {
                    children[pi as usize][slot] = t as u32;
                }
            }
        }
        self.parent = parents;
        self.children = children;
    }

    /// Checks ordering, well-formedness, uniqueness and that every prefix
    /// is a root-containing subtree.
    pub fn validate(&self) -> Result<()> {
        if self.is_empty() || !self.pattern(0).is_empty() {
            return Err(Error::PatternSet("first pattern must be all-zero".into()));
        }
        let mut seen: HashMap<&[u16], usize> = HashMap::with_capacity(self.len());
        let mut prev_weight = 0;
        for t in 0..self.len() {
            let p = self.pattern(t);
            if p.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::PatternSet(format!("pattern {t} is not strictly increasing")));
            }
            if let Some(first) = seen.insert(p, t) {
                return Err(Error::PatternSet(format!("pattern {t} repeats pattern {first}")));
            }
            let w = self.gamma_weight(t);
            if w < prev_weight {
                return Err(Error::PatternSet(format!("pattern {t} breaks the weight order")));
            }
            prev_weight = w;
            if t > 0 && (self.parent[t] == NONE || self.parent[t] as usize >= t) {
                return Err(Error::PatternSet(format!(
                    "pattern {t} appears before its tree parent"
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gamma(&self) -> &Gamma {
        &self.gamma
    }

    /// Sorted 0-based rank indices of pattern `t`.
    #[inline]
    pub fn pattern(&self, t: usize) -> &[u16] {
        &self.indices[self.offsets[t] as usize..self.offsets[t + 1] as usize]
    }

    pub fn ranked_bits(&self, t: usize) -> BitVec {
        BitVec::from_ones(self.n, self.pattern(t).iter().map(|&j| j as usize))
    }

    pub fn gamma_weight(&self, t: usize) -> u64 {
        self.pattern(t).iter().map(|&j| self.weights[j as usize]).sum()
    }

    /// Index of pattern `t`'s tree parent, `None` for the root.
    pub fn parent_index(&self, t: usize) -> Option<usize> {
        (self.parent[t] != NONE).then_some(self.parent[t] as usize)
    }

    /// Indices of pattern `t`'s tree children present in the set.
    pub fn child_indices(&self, t: usize) -> [Option<usize>; 2] {
        self.children[t].map(|c| (c != NONE).then_some(c as usize))
    }

    /// The first `t` patterns.
    pub fn truncated(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.len() {
            return Err(Error::PatternSet(format!(
                "cannot take {t} of {} patterns",
                self.len()
            )));
        }
        let offsets = self.offsets[..=t].to_vec();
        let indices = self.indices[..offsets[t] as usize].to_vec();
        Ok(Self::from_parts_unchecked(self.n, self.gamma.clone(), offsets, indices))
    }

    pub fn check_length(&self, n: usize) -> Result<()> {
        if self.n == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: n,
                got: self.n,
            })
        }
    }
}

/// Tree parent of a sorted index list, with the child slot it occupies.
fn parent_indices<'a>(p: &[u16], scratch: &'a mut Vec<u16>) -> Option<(usize, &'a [u16])> {
    let (&top, rest) = p.split_last()?;
    scratch.clear();
    scratch.extend_from_slice(rest);
    if top == 0 {
        return Some((0, scratch));
    }
    if rest.last() == Some(&(top - 1)) {
        Some((1, scratch))
    } else {
        scratch.push(top - 1);
        Some((0, scratch))
    }
}

/// Concrete patterns in set order: `e_{r_i} = ẽ_i`.
pub fn permute_patterns(set: &AbstractPatternSet, ranking: &[usize]) -> Vec<BitVec> {
    (0..set.len())
        .map(|t| ranked_to_positional(&set.ranked_bits(t), ranking))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct OrbOptions {
    /// Stop after this many tests even if the set is longer.
    pub max_queries: Option<u64>,
    /// Patterns evaluated per round (for round accounting only; the
    /// stopping index is always the first valid one in list order).
    pub batch: usize,
    pub trace: bool,
}

impl Default for OrbOptions {
    fn default() -> Self {
        Self {
            max_queries: None,
            batch: 1,
            trace: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbOutcome {
    pub result: DecodeResult,
    /// Length of the tested prefix.
    pub tested: usize,
}

pub fn orb_decode(
    profile: &ReliabilityProfile,
    code: &LinearCode,
    set: &AbstractPatternSet,
    options: &OrbOptions,
) -> Result<OrbOutcome> {
    let tree = EpTree::new(profile, code)?;
    orb_phase(&tree, code, set, options)
}

/// Tests set members in order until the first valid one.
pub(crate) fn orb_phase(
    tree: &EpTree<'_>,
    code: &LinearCode,
    set: &AbstractPatternSet,
    options: &OrbOptions,
) -> Result<OrbOutcome> {
    set.check_length(code.n())?;
    let profile = tree.profile();
    let r = code.redundancy() as u64;
    let mut counters = WorkCounters::default();
    let target = code.syndrome_unchecked(profile.hard());
    counters.parity_bits += code.n() as u64 * r;

    let limit = options
        .max_queries
        .map_or(set.len(), |q| (q as usize).min(set.len()));
    let mut found = None;
    let mut tested = 0;
    for t in 0..limit {
        tested = t + 1;
        let p = set.pattern(t);
        let mut s = Syndrome::zero(code.redundancy());
        for &j in p {
            s ^= tree.ranked_column(j as usize);
        }
        counters.parity_bits += r * p.len().max(1) as u64;
        if s == target {
            found = Some(t);
            break;
        }
    }
    counters.queries = tested as u64;
    counters.parity_rows_checked = tested as u64 * r;
    let batch = options.batch.max(1);
    counters.rounds = tested.div_ceil(batch) as u64;

    let best: Option<ErrorPattern> = found.map(|t| {
        counters.zeta_additions += set.pattern(t).len() as u64;
        tree.node_from_ranked(set.ranked_bits(t))
    });
    let termination = if best.is_some() {
        Termination::ValidFound
    } else if set.n() < 64 && tested as u64 == 1u64 << set.n() {
        Termination::FrontierExhausted
    } else {
        Termination::QueryLimit
    };

    let trace = if options.trace {
        (0..tested)
            .collect::<Vec<_>>()
            .chunks(batch)
            .enumerate()
            .map(|(k, chunk)| {
                let end = chunk[chunk.len() - 1] + 1;
                RoundTrace {
                    round: k as u64 + 1,
                    batch: chunk
                        .iter()
                        .map(|&t| {
                            let ranked = set.ranked_bits(t);
                            TracedPattern {
                                zeta: tree.zeta_ranked_direct(&ranked),
                                bits: ranked_to_positional(&ranked, profile.ranking()),
                            }
                        })
                        .collect(),
                    tau: f64::NAN,
                    zeta_min: if found.is_some_and(|f| f < end) {
                        best.as_ref().unwrap().zeta()
                    } else {
                        f64::INFINITY
                    },
                    queries: end as u64,
                    frontier_len: 0,
                    frontier: None,
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(OrbOutcome {
        result: DecodeResult::new(best.as_ref(), profile, termination, counters, trace),
        tested,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repetition4() -> LinearCode {
        LinearCode::parse_matrix("4 1\n1100\n0110\n0011\n", "rep4".into()).unwrap()
    }

    #[test]
    fn small_set_permutation() {
        let set = generate_pattern_set(4, 5, Gamma::Linear).unwrap();
        let concrete = permute_patterns(&set, &[2, 0, 1, 3]);
        let s: Vec<String> = concrete.iter().map(|b| b.to_string()).collect();
        assert_eq!(s, ["0000", "0010", "1000", "0100", "1010"]);
    }

    #[test]
    fn identity_and_inverse_permutation() {
        let set = generate_pattern_set(6, 40, Gamma::Linear).unwrap();
        let identity: Vec<usize> = (0..6).collect();
        let same = permute_patterns(&set, &identity);
        for (t, b) in same.iter().enumerate() {
            assert_eq!(*b, set.ranked_bits(t));
        }
        let r = [4, 0, 5, 2, 1, 3];
        let mut inverse = [0; 6];
        for (i, &p) in r.iter().enumerate() {
            inverse[p] = i;
        }
        for (t, b) in permute_patterns(&set, &r).iter().enumerate() {
            let back = BitVec::from_ones(6, b.iter_ones().map(|i| inverse[i]));
            assert_eq!(back, set.ranked_bits(t));
        }
    }

    #[test]
    fn small_set_stops_at_fourth_pattern() {
        // Hard decision 1011: only 0100 (and 1011) reach the codeword 1111.
        let profile =
            ReliabilityProfile::new(vec![1.2, 2.1, 0.8, 3.4], BitVec::parse("1011").unwrap())
                .unwrap();
        let set = generate_pattern_set(4, 6, Gamma::Linear).unwrap();
        let out = orb_decode(&profile, &repetition4(), &set, &OrbOptions::default()).unwrap();
        assert_eq!(out.tested, 4);
        assert_eq!(out.result.counters.queries, 4);
        assert_eq!(out.result.error_pattern.unwrap().to_string(), "0100");
        assert!((out.result.zeta - 2.1).abs() < 1e-12);
    }

    #[test]
    fn codeword_input_stops_at_first() {
        let code = LinearCode::bch(15, 11).unwrap();
        let profile = ReliabilityProfile::new(vec![1.0; 15], BitVec::zeros(15)).unwrap();
        let set = generate_pattern_set(15, 100, Gamma::Linear).unwrap();
        let out = orb_decode(&profile, &code, &set, &OrbOptions::default()).unwrap();
        assert_eq!(out.tested, 1);
        assert_eq!(out.result.zeta, 0.0);
    }

    #[test]
    fn never_valid_uses_whole_set() {
        let profile =
            ReliabilityProfile::new(vec![1.2, 2.1, 0.8, 3.4], BitVec::parse("0110").unwrap())
                .unwrap();
        let set = generate_pattern_set(4, 5, Gamma::Linear).unwrap();
        let out = orb_decode(&profile, &repetition4(), &set, &OrbOptions::default()).unwrap();
        assert_eq!(out.result.counters.queries, 5);
        assert!(!out.result.found());
        assert_eq!(out.result.termination, Termination::QueryLimit);
    }

    #[test]
    fn length_mismatch() {
        let set = generate_pattern_set(5, 5, Gamma::Linear).unwrap();
        let profile = ReliabilityProfile::new(vec![1.0; 4], BitVec::zeros(4)).unwrap();
        assert!(orb_decode(&profile, &repetition4(), &set, &OrbOptions::default()).is_err());
    }

    #[test]
    fn links_match_tree_parents() {
        let set = generate_pattern_set(12, 3000, Gamma::Linear).unwrap();
        for t in 1..set.len() {
            let p = set.parent_index(t).unwrap();
            let expected = crate::eptree::parent_ranked(&set.ranked_bits(t)).unwrap();
            assert_eq!(set.ranked_bits(p), expected);
            assert!(set.child_indices(p).contains(&Some(t)));
        }
        assert_eq!(set.parent_index(0), None);
    }

    #[test]
    fn validate_rejects_broken_sets() {
        // Child listed before its parent.
        let bad = AbstractPatternSet::from_parts(4, Gamma::Linear, vec![0, 0, 2, 3], vec![0, 1, 0]);
        assert!(bad.is_err());
        // Weight order broken.
        let bad = AbstractPatternSet::from_parts(4, Gamma::Linear, vec![0, 0, 1, 2], vec![1, 0]);
        assert!(bad.is_err());
        let ok = AbstractPatternSet::from_parts(4, Gamma::Linear, vec![0, 0, 1, 2], vec![0, 1]);
        assert!(ok.is_ok());
    }

    #[test]
    fn gamma_parsing() {
        assert_eq!("linear".parse::<Gamma>().unwrap(), Gamma::Linear);
        let g: Gamma = "list:1,2,2".parse().unwrap();
        assert_eq!(g.to_string(), "list:1,2,2");
        assert!("quadratic".parse::<Gamma>().is_err());
        assert!(Gamma::Explicit(vec![0, 1]).weights(2).is_err());
    }
}
