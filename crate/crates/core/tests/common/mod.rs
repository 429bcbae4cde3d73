//! Brute-force Merkle tree builder that shares no code with the library.

use sha2::{Digest as _, Sha256};

/// Every level of the padded tree, leaves first.
pub fn oracle_levels(chunks: &[[u8; 32]], limit: usize) -> Vec<Vec<[u8; 32]>> {
    let mut level: Vec<[u8; 32]> = chunks.to_vec();
    level.resize(limit, [0u8; 32]);
    let mut levels = vec![level];
    while levels.last().unwrap().len() > 1 {
        let next = levels
            .last()
            .unwrap()
            .chunks(2)
            .map(|pair| {
                let mut h = Sha256::new();
                h.update(pair[0]);
                h.update(pair[1]);
                h.finalize().into()
            })
            .collect();
        levels.push(next);
    }
    levels
}

pub fn oracle_root(chunks: &[[u8; 32]], limit: usize) -> [u8; 32] {
    oracle_levels(chunks, limit).last().unwrap()[0]
}

pub fn oracle_branch(chunks: &[[u8; 32]], limit: usize, index: usize) -> Vec<[u8; 32]> {
    let levels = oracle_levels(chunks, limit);
    (0..levels.len() - 1)
        .map(|d| levels[d][(index >> d) ^ 1])
        .collect()
}
