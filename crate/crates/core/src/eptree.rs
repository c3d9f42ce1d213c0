//! The error-pattern (EP) tree.
//!
//! For a ranking `r` that sorts reliabilities ascending, the root is the
//! all-zero pattern, its single child flips `r_1`, and a node whose highest
//! ranked flip is at depth `j* < n` has a left child that moves that flip to
//! `r_{j*+1}` and a right child that adds `r_{j*+1}`. Every pattern in
//! `F_2^n` appears exactly once, and soft weights never decrease from parent
//! to child.
//!
//! Nodes store their bits in *rank order*: bit `j` (0-based) is the flip of
//! position `r_{j+1}`. The positional pattern is recovered with
//! [`ErrorPattern::to_bits`]. Depth `j*` is reported 1-based as usual; the
//! 0-based/1-based boundary does not leave this module.

use std::cmp::Ordering;

use arrayvec::ArrayVec;

use crate::bits::BitVec;
use crate::channel::ReliabilityProfile;
use crate::code::{LinearCode, Syndrome};
use crate::error::{Error, Result};

/// One node of the EP tree with its cached soft weight, depth and syndrome.
#[derive(Clone, Debug)]
pub struct ErrorPattern {
    pub(crate) ranked: BitVec,
    pub(crate) zeta: f64,
    pub(crate) depth: usize,
    pub(crate) syndrome: Syndrome,
}

impl ErrorPattern {
    /// Soft weight: sum of reliabilities over flipped positions.
    #[inline]
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// `j*`: 1-based rank of the highest flipped position, 0 for the root.
    #[inline]
    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub fn syndrome(&self) -> &Syndrome {
        &self.syndrome
    }

    /// Bits in rank order.
    #[inline]
    pub fn ranked_bits(&self) -> &BitVec {
        &self.ranked
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.ranked.count_ones()
    }

    #[inline]
    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    /// The pattern over codeword positions.
    pub fn to_bits(&self, profile: &ReliabilityProfile) -> BitVec {
        ranked_to_positional(&self.ranked, profile.ranking())
    }

    /// Total search order: soft weight, then the colexicographic order of the
    /// rank-ordered bits. A child always compares greater than its parent.
    #[inline]
    pub fn search_cmp(&self, other: &ErrorPattern) -> Ordering {
        self.zeta
            .total_cmp(&other.zeta)
            .then_with(|| self.ranked.cmp_colex(&other.ranked))
    }
}

pub fn ranked_to_positional(ranked: &BitVec, ranking: &[usize]) -> BitVec {
    BitVec::from_ones(ranked.len(), ranked.iter_ones().map(|j| ranking[j]))
}

pub fn positional_to_ranked(bits: &BitVec, ranking: &[usize]) -> BitVec {
    BitVec::from_ones(
        bits.len(),
        (0..ranking.len()).filter(|&j| bits.get(ranking[j])),
    )
}

/// `zeta(e) = sum of ell_i over i with e_i = 1`, computed from scratch.
pub fn zeta_direct(bits: &BitVec, profile: &ReliabilityProfile) -> f64 {
    bits.iter_ones().map(|i| profile.ell()[i]).sum()
}

/// Parent of a rank-ordered pattern, or `None` for the root.
pub fn parent_ranked(ranked: &BitVec) -> Option<BitVec> {
    let top = ranked.last_one()?;
    let mut parent = ranked.clone();
    parent.set(top, false);
    if top > 0 && !ranked.get(top - 1) {
        // Left child: the parent had its top flip one rank lower.
        parent.set(top - 1, true);
    }
    Some(parent)
}

/// Which side of its parent a node hangs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildKind {
    /// The single child of the root.
    First,
    Left,
    Right,
}

/// Side of a rank-ordered pattern relative to its parent; `None` for the root.
pub fn child_kind(ranked: &BitVec) -> Option<ChildKind> {
    let top = ranked.last_one()?;
    Some(if top == 0 {
        ChildKind::First
    } else if ranked.get(top - 1) {
        ChildKind::Right
    } else {
        ChildKind::Left
    })
}

/// Per-received-word view of the tree: reliabilities and parity-check
/// columns permuted into rank order so child updates are O(1).
#[derive(Debug, Clone)]
pub struct EpTree<'a> {
    profile: &'a ReliabilityProfile,
    ranked_ell: Vec<f64>,
    /// `ell[r_{j+2}] - ell[r_{j+1}]`, never negative.
    ell_step: Vec<f64>,
    ranked_columns: Vec<Syndrome>,
    /// `h(r_{j+1}) xor h(r_{j+2})`.
    column_pairs: Vec<Syndrome>,
    redundancy: usize,
}

impl<'a> EpTree<'a> {
    pub fn new(profile: &'a ReliabilityProfile, code: &LinearCode) -> Result<Self> {
        if profile.n() != code.n() {
            return Err(Error::LengthMismatch {
                expected: code.n(),
                got: profile.n(),
            });
        }
        let ranking = profile.ranking();
        let ranked_ell: Vec<f64> = ranking.iter().map(|&i| profile.ell()[i]).collect();
        let ell_step = ranked_ell.windows(2).map(|w| w[1] - w[0]).collect();
        let ranked_columns: Vec<Syndrome> =
            ranking.iter().map(|&i| code.column(i).clone()).collect();
        let column_pairs = ranked_columns
            .windows(2)
            .map(|w| {
                let mut s = w[0].clone();
                s ^= &w[1];
                s
            })
            .collect();
        Ok(Self {
            profile,
            ranked_ell,
            ell_step,
            ranked_columns,
            column_pairs,
            redundancy: code.redundancy(),
        })
    }

    pub fn profile(&self) -> &'a ReliabilityProfile {
        self.profile
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.ranked_ell.len()
    }

    pub fn redundancy(&self) -> usize {
        self.redundancy
    }

    /// Reliabilities in ascending order.
    pub fn ranked_ell(&self) -> &[f64] {
        &self.ranked_ell
    }

    /// Parity-check column of the position with 0-based rank `j`.
    #[inline]
    pub fn ranked_column(&self, j: usize) -> &Syndrome {
        &self.ranked_columns[j]
    }

    pub fn root(&self) -> ErrorPattern {
        ErrorPattern {
            ranked: BitVec::zeros(self.n()),
            zeta: 0.0,
            depth: 0,
            syndrome: Syndrome::zero(self.redundancy),
        }
    }

    /// Children of `e` in `[left, right]` order (a single child for the root,
    /// none for a leaf), with soft weight and syndrome updated from the
    /// parent's cached values.
    pub fn children(&self, e: &ErrorPattern) -> ArrayVec<ErrorPattern, 2> {
        let mut out = ArrayVec::new();
        self.for_each_child(e, |c| out.push(c));
        out
    }

    #[inline]
    pub fn for_each_child(&self, e: &ErrorPattern, mut f: impl FnMut(ErrorPattern)) {
        let n = self.n();
        match e.depth {
            0 => {
                let mut ranked = e.ranked.clone();
                ranked.set(0, true);
                f(ErrorPattern {
                    ranked,
                    zeta: self.ranked_ell[0],
                    depth: 1,
                    syndrome: self.ranked_columns[0].clone(),
                });
            }
            d if d >= n => {}
            d => {
                // 0-based rank of the current top flip is d - 1.
                let top = d - 1;
                let next = d;
                let mut left = e.ranked.clone();
                left.set(top, false);
                left.set(next, true);
                let mut left_syndrome = e.syndrome.clone();
                left_syndrome ^= &self.column_pairs[top];
                f(ErrorPattern {
                    ranked: left,
                    zeta: e.zeta + self.ell_step[top],
                    depth: d + 1,
                    syndrome: left_syndrome,
                });

                let mut right = e.ranked.clone();
                right.set(next, true);
                let mut right_syndrome = e.syndrome.clone();
                right_syndrome ^= &self.ranked_columns[next];
                f(ErrorPattern {
                    ranked: right,
                    zeta: e.zeta + self.ranked_ell[next],
                    depth: d + 1,
                    syndrome: right_syndrome,
                });
            }
        }
    }

    /// Materializes a node from rank-ordered bits, computing everything
    /// from scratch.
    pub fn node_from_ranked(&self, ranked: BitVec) -> ErrorPattern {
        debug_assert_eq!(ranked.len(), self.n());
        let zeta = self.zeta_ranked_direct(&ranked);
        let syndrome = self.syndrome_ranked_direct(&ranked);
        let depth = ranked.last_one().map_or(0, |j| j + 1);
        ErrorPattern {
            ranked,
            zeta,
            depth,
            syndrome,
        }
    }

    /// Materializes a node from a positional pattern.
    pub fn node_from_bits(&self, bits: &BitVec) -> ErrorPattern {
        self.node_from_ranked(positional_to_ranked(bits, self.profile.ranking()))
    }

    pub fn zeta_ranked_direct(&self, ranked: &BitVec) -> f64 {
        ranked.iter_ones().map(|j| self.ranked_ell[j]).sum()
    }

    pub fn syndrome_ranked_direct(&self, ranked: &BitVec) -> Syndrome {
        let mut s = Syndrome::zero(self.redundancy);
        for j in ranked.iter_ones() {
            s ^= &self.ranked_columns[j];
        }
        s
    }

    /// The node's parent, recomputed from scratch.
    pub fn parent(&self, e: &ErrorPattern) -> Option<ErrorPattern> {
        parent_ranked(&e.ranked).map(|p| self.node_from_ranked(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{observe, transmit, ChannelConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn four_bit() -> (ReliabilityProfile, LinearCode) {
        let profile =
            ReliabilityProfile::new(vec![1.2, 2.1, 0.8, 3.4], BitVec::zeros(4)).unwrap();
        // Any 4-bit code works for tree shape; syndromes are checked separately.
        let code = LinearCode::parse_matrix("4 1\n1100\n0110\n0011\n", "rep4".into()).unwrap();
        (profile, code)
    }

    fn bits(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    #[test]
    fn root_is_zero() {
        let (p, c) = four_bit();
        let tree = EpTree::new(&p, &c).unwrap();
        let root = tree.root();
        assert_eq!(root.to_bits(&p).to_string(), "0000");
        assert_eq!(root.zeta(), 0.0);
        assert_eq!(root.depth(), 0);
        assert!(root.syndrome().is_zero());
        let kids = tree.children(&root);
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].to_bits(&p).to_string(), "0010");
        assert!((kids[0].zeta() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn children_of_0010() {
        let (p, c) = four_bit();
        let tree = EpTree::new(&p, &c).unwrap();
        let node = tree.node_from_bits(&bits("0010"));
        let kids = tree.children(&node);
        assert_eq!(kids[0].to_bits(&p).to_string(), "1000");
        assert!((kids[0].zeta() - 1.2).abs() < 1e-12);
        assert_eq!(kids[1].to_bits(&p).to_string(), "1010");
        assert!((kids[1].zeta() - 2.0).abs() < 1e-12);
        assert!(kids.iter().all(|k| k.depth() == 2));
    }

    #[test]
    fn children_of_0110() {
        let (p, c) = four_bit();
        let tree = EpTree::new(&p, &c).unwrap();
        let node = tree.node_from_bits(&bits("0110"));
        assert!((node.zeta() - 2.9).abs() < 1e-12);
        let kids = tree.children(&node);
        assert_eq!(kids[0].to_bits(&p).to_string(), "0011");
        assert!((kids[0].zeta() - 4.2).abs() < 1e-12);
        assert_eq!(kids[1].to_bits(&p).to_string(), "0111");
        assert!((kids[1].zeta() - 6.3).abs() < 1e-12);
    }

    #[test]
    fn leaf_has_no_children() {
        let (p, c) = four_bit();
        let tree = EpTree::new(&p, &c).unwrap();
        // Position 4 is rank 4, the last one.
        let leaf = tree.node_from_bits(&bits("0001"));
        assert_eq!(leaf.depth(), 4);
        assert!(tree.children(&leaf).is_empty());
    }

    #[test]
    fn zeta_direct_examples() {
        let (p, _) = four_bit();
        assert_eq!(zeta_direct(&bits("0000"), &p), 0.0);
        assert!((zeta_direct(&bits("0100"), &p) - 2.1).abs() < 1e-12);
        assert!((zeta_direct(&bits("1010"), &p) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parent_inverts_children() {
        let (p, c) = four_bit();
        let tree = EpTree::new(&p, &c).unwrap();
        let mut stack = vec![tree.root()];
        while let Some(node) = stack.pop() {
            for kid in tree.children(&node) {
                assert_eq!(parent_ranked(kid.ranked_bits()).as_ref(), Some(node.ranked_bits()));
                stack.push(kid);
            }
        }
        assert!(parent_ranked(&BitVec::zeros(4)).is_none());
    }

    fn traverse_all(tree: &EpTree<'_>) -> Vec<ErrorPattern> {
        let mut out = Vec::new();
        let mut stack = vec![tree.root()];
        while let Some(node) = stack.pop() {
            tree.for_each_child(&node, |c| stack.push(c));
            out.push(node);
        }
        out
    }

    #[test]
    fn complete_and_unique_for_small_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=12usize {
            let ell: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
            let profile = ReliabilityProfile::new(ell, BitVec::zeros(n)).unwrap();
            // Identity-like parity checks just to size syndromes.
            let rows = (0..n.saturating_sub(1).max(1))
                .map(|i| BitVec::from_ones(n.max(2), [i, (i + 1) % n.max(2)]))
                .collect::<Vec<_>>();
            if n < 2 {
                continue;
            }
            let code = LinearCode::from_parity_check(n, rows, Some(1), "t".into()).unwrap();
            let tree = EpTree::new(&profile, &code).unwrap();
            let nodes = traverse_all(&tree);
            assert_eq!(nodes.len(), 1 << n);
            let distinct: HashSet<BitVec> = nodes.iter().map(|e| e.to_bits(&profile)).collect();
            assert_eq!(distinct.len(), 1 << n);
        }
    }

    #[test]
    fn recursion_matches_direct_computation() {
        let code = LinearCode::bch(127, 106).unwrap();
        let cfg = ChannelConfig::new(4.0, code.rate(), 77);
        let mut checked = 0usize;
        let mut trial = 0u64;
        while checked < 100_000 {
            let mut rng = cfg.trial_rng(trial);
            trial += 1;
            let y = transmit(&BitVec::zeros(127), &cfg, &mut rng);
            let profile = observe(&y, &cfg);
            let tree = EpTree::new(&profile, &code).unwrap();
            // Random root-to-leaf walks.
            for _ in 0..40 {
                let mut node = tree.root();
                loop {
                    let kids = tree.children(&node);
                    if kids.is_empty() || rng.random_bool(0.03) {
                        break;
                    }
                    let pick = rng.random_range(0..kids.len());
                    let kid = kids[pick].clone();
                    assert!(kid.search_cmp(&node) == Ordering::Greater);
                    assert_eq!(kid.depth(), node.depth() + 1);
                    let positional = kid.to_bits(&profile);
                    assert!((kid.zeta() - zeta_direct(&positional, &profile)).abs() < 1e-9);
                    assert_eq!(kid.syndrome(), &code.syndrome(&positional).unwrap());
                    let top = profile.ranking()[kid.depth() - 1];
                    assert!(positional.get(top));
                    node = kid;
                    checked += 1;
                }
            }
        }
    }

    #[test]
    fn child_zeta_strictly_exceeds_parent_with_positive_reliabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10;
        let ell: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..3.0)).collect();
        let profile = ReliabilityProfile::new(ell, BitVec::zeros(n)).unwrap();
        let code = LinearCode::bch(15, 11).unwrap();
        let rows: Vec<BitVec> = code.rows().iter().map(|r| BitVec::from_ones(n, r.iter_ones().filter(|&i| i < n))).collect();
        let code = LinearCode::from_parity_check(n, rows, Some(1), "short".into()).unwrap();
        let tree = EpTree::new(&profile, &code).unwrap();
        for node in traverse_all(&tree) {
            for kid in tree.children(&node) {
                assert!(kid.zeta() > node.zeta());
            }
        }
    }

    #[test]
    fn length_mismatch_rejected() {
        let profile = ReliabilityProfile::new(vec![1.0; 5], BitVec::zeros(5)).unwrap();
        let code = LinearCode::bch(7, 4).unwrap();
        assert!(EpTree::new(&profile, &code).is_err());
    }
}
