use std::collections::HashSet;

use grand::bits::BitVec;
use grand::channel::ReliabilityProfile;
use grand::code::LinearCode;
use grand::eptree::{parent_ranked, positional_to_ranked, ranked_to_positional, zeta_direct, EpTree};
use grand::sgrand::{Backing, EpGenerator};
use proptest::prelude::*;

fn profile_strategy(n: usize) -> impl Strategy<Value = ReliabilityProfile> {
    (
        prop::collection::vec(0.01f64..10.0, n),
        prop::collection::vec(any::<bool>(), n),
    )
        .prop_map(|(ell, hard)| {
            let hard = BitVec::from_ones(hard.len(), (0..hard.len()).filter(|&i| hard[i]));
            ReliabilityProfile::new(ell, hard).unwrap()
        })
}

fn bits_strategy(n: usize) -> impl Strategy<Value = BitVec> {
    prop::collection::vec(any::<bool>(), n)
        .prop_map(|v| BitVec::from_ones(v.len(), (0..v.len()).filter(|&i| v[i])))
}

proptest! {
    #[test]
    fn node_state_matches_direct_computation(
        (profile, e) in profile_strategy(15).prop_flat_map(|p| (Just(p), bits_strategy(15)))
    ) {
        let code = LinearCode::bch(15, 7).unwrap();
        let tree = EpTree::new(&profile, &code).unwrap();
        let node = tree.node_from_bits(&e);
        prop_assert!((node.zeta() - zeta_direct(&e, &profile)).abs() < 1e-9);
        prop_assert_eq!(node.syndrome(), &code.syndrome(&e).unwrap());
        prop_assert_eq!(node.weight(), e.count_ones());
        prop_assert_eq!(&node.to_bits(&profile), &e);
    }

    #[test]
    fn children_link_back_and_grow(
        (profile, e) in profile_strategy(15).prop_flat_map(|p| (Just(p), bits_strategy(15)))
    ) {
        let code = LinearCode::bch(15, 7).unwrap();
        let tree = EpTree::new(&profile, &code).unwrap();
        let node = tree.node_from_bits(&e);
        for child in tree.children(&node) {
            prop_assert!(child.zeta() > node.zeta());
            prop_assert_eq!(child.depth(), node.depth() + 1);
            let direct = tree.node_from_ranked(child.ranked_bits().clone());
            prop_assert!((child.zeta() - direct.zeta()).abs() < 1e-9);
            prop_assert_eq!(child.syndrome(), direct.syndrome());
            let parent = parent_ranked(child.ranked_bits());
            prop_assert_eq!(parent.as_ref(), Some(node.ranked_bits()));
        }
        match tree.parent(&node) {
            Some(p) => {
                let siblings = tree.children(&p);
                prop_assert!(siblings.iter().any(|c| c.ranked_bits() == node.ranked_bits()));
            }
            None => prop_assert!(node.is_root()),
        }
    }

    #[test]
    fn rank_maps_invert(
        (profile, e) in profile_strategy(20).prop_flat_map(|p| (Just(p), bits_strategy(20)))
    ) {
        let ranked = positional_to_ranked(&e, profile.ranking());
        prop_assert_eq!(ranked_to_positional(&ranked, profile.ranking()), e);
    }

    #[test]
    fn monotone_relabeling_keeps_ranking(profile in profile_strategy(12), scale in 0.1f64..5.0) {
        let warped: Vec<f64> = profile.ell().iter().map(|l| scale * l.powi(3) + 0.5).collect();
        let other = ReliabilityProfile::new(warped, profile.hard().clone()).unwrap();
        prop_assert_eq!(other.ranking(), profile.ranking());
    }
}

#[test]
fn traversal_covers_every_pattern_once() {
    let mut seen = HashSet::new();
    for n in [2usize, 3, 6, 10] {
        let ell: Vec<f64> = (0..n).map(|i| 0.3 + ((i * 7) % 5) as f64).collect();
        let profile = ReliabilityProfile::new(ell, BitVec::zeros(n)).unwrap();
        let code = LinearCode::from_parity_check(n, vec![BitVec::from_ones(n, 0..n)], None, "parity".into()).unwrap();
        let tree = EpTree::new(&profile, &code).unwrap();
        seen.clear();
        let mut last = f64::NEG_INFINITY;
        for e in EpGenerator::new(&tree, Backing::Heap) {
            assert!(e.zeta() >= last);
            last = e.zeta();
            assert!(seen.insert(e.ranked_bits().clone()));
        }
        assert_eq!(seen.len(), 1 << n);
    }
}
