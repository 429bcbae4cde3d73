//! Merkle routines checked against a naive full-tree builder.

mod common;

use common::{oracle_branch, oracle_root};
use pos_relay::ssz_merkle::{
    branch_for, gindex_concat, hash_node, merkleize, verify_branch, Digest, MerkleBranch,
};
use proptest::prelude::*;

fn digests(raw: &[[u8; 32]]) -> Vec<Digest> {
    raw.iter().copied().map(Digest).collect()
}

fn hex32(s: &str) -> Digest {
    Digest::from_hex(s).unwrap()
}

#[test]
fn hash_node_matches_reference_vectors() {
    // Reference values from an independent SHA-256 implementation.
    let a = Digest(std::array::from_fn(|i| i as u8));
    let b = Digest(std::array::from_fn(|i| 32 + i as u8));
    assert_eq!(
        hash_node(&a, &b),
        hex32("0xfdeab9acf3710362bd2658cdc9a29e8f9c757fcf9811603a8c447cd1d9151108")
    );
    assert_eq!(
        hash_node(&b, &a),
        hex32("0x84e4bd6ca2af96412fdc62fe44d4e9709cdc31933081a62486a48a154b582d53")
    );
}

#[test]
fn three_chunks_in_four_leaf_tree() {
    let c = [
        hex32("0x6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d"),
        hex32("0x4bf5122f344554c53bde2ebb8cd2b7e3d1600ad631c385a5d7cce23c7785459a"),
        hex32("0xdbc1b4c900ffe48d575b5da5c638040125f65db0fe3e24494b76ea986457d986"),
    ];
    let expected = hex32("0x7ee5fcde741ff935e2c5fee3f08c8761b800957f20035d9d5dac2897f942a5eb");
    assert_eq!(merkleize(&c, 4).unwrap(), expected);
    assert_eq!(
        expected,
        hash_node(&hash_node(&c[0], &c[1]), &hash_node(&c[2], &Digest::ZERO))
    );
}

#[test]
fn gindex_concat_matches_tree_enumeration() {
    // Walk explicit left/right paths and compare with concatenation.
    fn walk(path: &[bool]) -> u64 {
        path.iter().fold(1u64, |g, right| 2 * g + *right as u64)
    }
    let paths: Vec<Vec<bool>> = (0..4)
        .flat_map(|len| {
            (0..1u32 << len)
                .map(move |bits| (0..len).map(|i| bits >> (len - 1 - i) & 1 == 1).collect())
        })
        .collect();
    for outer in &paths {
        for inner in &paths {
            let joined: Vec<bool> = outer.iter().chain(inner).copied().collect();
            assert_eq!(gindex_concat(walk(outer), walk(inner)), walk(&joined));
        }
    }
    assert_eq!(gindex_concat(3, 2), 6);
}

fn tree_strategy() -> impl Strategy<Value = (Vec<[u8; 32]>, usize)> {
    (0u32..=8).prop_flat_map(|depth| {
        let limit = 1usize << depth;
        (
            prop::collection::vec(any::<[u8; 32]>(), 0..=limit),
            Just(limit),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn merkle_routines_agree_with_oracle((raw, limit) in tree_strategy(), pick in any::<prop::sample::Index>()) {
        let chunks = digests(&raw);
        let root = merkleize(&chunks, limit).unwrap();
        prop_assert_eq!(root.0, oracle_root(&raw, limit));

        let index = pick.index(limit);
        let branch = branch_for(&chunks, limit, index).unwrap();
        prop_assert_eq!(branch.gindex, (limit + index) as u64);
        let expected: Vec<Digest> = digests(&oracle_branch(&raw, limit, index));
        prop_assert_eq!(&branch.nodes, &expected);

        let leaf = chunks.get(index).copied().unwrap_or(Digest::ZERO);
        prop_assert!(verify_branch(&leaf, &branch, &root).unwrap());

        for node in 0..branch.nodes.len() {
            let mut bad = branch.clone();
            bad.nodes[node].0[(node * 7) % 32] ^= 0x80;
            prop_assert!(!verify_branch(&leaf, &bad, &root).unwrap());
        }
    }

    #[test]
    fn every_leaf_round_trips((raw, limit) in tree_strategy()) {
        let chunks = digests(&raw);
        let root = merkleize(&chunks, limit).unwrap();
        for (i, leaf) in chunks.iter().enumerate() {
            let branch = branch_for(&chunks, limit, i).unwrap();
            prop_assert!(verify_branch(leaf, &branch, &root).unwrap());
        }
    }

    #[test]
    fn appending_changes_root_unless_zero((raw, limit) in tree_strategy(), extra in any::<[u8; 32]>()) {
        prop_assume!(raw.len() < limit);
        let chunks = digests(&raw);
        let mut longer = chunks.clone();
        longer.push(Digest(extra));
        let same = merkleize(&chunks, limit).unwrap() == merkleize(&longer, limit).unwrap();
        prop_assert_eq!(same, extra == [0u8; 32]);
        let mut zero_padded = chunks.clone();
        zero_padded.push(Digest::ZERO);
        prop_assert_eq!(merkleize(&chunks, limit).unwrap(), merkleize(&zero_padded, limit).unwrap());
    }

    #[test]
    fn wrong_length_branches_are_malformed(gindex in 1u64..1 << 20, extra in 1usize..3) {
        let depth = 63 - gindex.leading_zeros() as usize;
        let branch = MerkleBranch::new(vec![Digest::ZERO; depth + extra], gindex);
        prop_assert!(verify_branch(&Digest::ZERO, &branch, &Digest::ZERO).is_err());
    }
}

#[test]
fn sixteen_leaf_mutation_sweep() {
    let raw: Vec<[u8; 32]> = (0..16u8).map(|i| [i.wrapping_mul(37); 32]).collect();
    let chunks = digests(&raw);
    let root = merkleize(&chunks, 16).unwrap();
    for index in 0..16 {
        let branch = branch_for(&chunks, 16, index).unwrap();
        for node in 0..branch.nodes.len() {
            for byte in 0..32 {
                let mut bad = branch.clone();
                bad.nodes[node].0[byte] ^= 1;
                assert!(!verify_branch(&chunks[index], &bad, &root).unwrap());
            }
        }
    }
}

#[test]
fn merkleize_is_deterministic() {
    let raw: Vec<[u8; 32]> = (0..100u8).map(|i| [i; 32]).collect();
    let chunks = digests(&raw);
    assert_eq!(
        merkleize(&chunks, 128).unwrap(),
        merkleize(&chunks, 128).unwrap()
    );
}
