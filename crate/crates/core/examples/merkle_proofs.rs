//! Merkleize a handful of chunks, prove one of them and compose generalized
//! indices across two trees.
//!
//!     cargo run --example merkle_proofs

use pos_relay::ssz_merkle::{
    branch_for, gindex_concat, merkleize, verify_branch, zero_hash, Digest,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chunks: Vec<Digest> = (1..=5u64).map(Digest::from_u64).collect();
    let root = merkleize(&chunks, 8)?;
    println!("root of 5 chunks padded to 8: {root}");

    let branch = branch_for(&chunks, 8, 3)?;
    println!(
        "leaf 3 sits at gindex {} (depth {})",
        branch.gindex,
        branch.depth()
    );
    for (level, node) in branch.nodes.iter().enumerate() {
        println!("  sibling at level {level}: {node}");
    }
    println!("verifies: {}", verify_branch(&chunks[3], &branch, &root)?);

    let mut forged = branch.clone();
    forged.nodes[1].0[0] ^= 1;
    println!(
        "with one flipped bit: {}",
        verify_branch(&chunks[3], &forged, &root)?
    );

    // Empty subtrees collapse to precomputed zero hashes.
    let empty = merkleize(&[], 8)?;
    assert_eq!(empty, zero_hash(3));
    println!("empty tree of 8 leaves: {empty}");

    // Field 4 of a container whose root is itself leaf 1 of an outer tree.
    println!("gindex_concat(9, 12) = {}", gindex_concat(9, 12));
    Ok(())
}
