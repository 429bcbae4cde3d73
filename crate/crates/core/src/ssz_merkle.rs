//! Binary Merkle trees in the SSZ style: SHA-256 nodes, zero-padded leaves,
//! generalized-index addressing and branch verification.
//!
//! Generalized indices put the root at 1 and the children of `i` at `2i` and
//! `2i + 1`, so a leaf `index` in a tree of `limit` leaves lives at
//! `limit + index`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::encoding;

/// Maximum tree depth for which zero-subtree roots are precomputed.
const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MerkleError {
    #[error("{count} chunks exceed limit {limit}")]
    LimitExceeded { count: usize, limit: usize },
    #[error("limit {0} is not a power of two")]
    BadLimit(usize),
    #[error("leaf index {index} out of range for limit {limit}")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("branch has {nodes} nodes but gindex {gindex} needs {expected}")]
    MalformedBranch {
        nodes: usize,
        gindex: u64,
        expected: usize,
    },
}

/// A 32-byte tree node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    /// Little-endian integer packed into the low bytes of a chunk.
    pub fn from_u64(value: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&value.to_le_bytes());
        Digest(bytes)
    }

    pub fn to_hex(&self) -> String {
        encoding::to_hex(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self, String> {
        encoding::from_hex_fixed(s).map(Digest)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl From<[u8; 32]> for Digest {
    fn from(bytes: [u8; 32]) -> Self {
        Digest(bytes)
    }
}

impl Serialize for Digest {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Digest {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Digest::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

/// Sibling path from a leaf up to the root, plus the leaf's generalized index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MerkleBranch {
    pub nodes: Vec<Digest>,
    pub gindex: u64,
}

impl MerkleBranch {
    pub fn new(nodes: Vec<Digest>, gindex: u64) -> Self {
        Self { nodes, gindex }
    }

    /// Number of hashes a verification of this branch performs.
    pub fn depth(&self) -> usize {
        self.nodes.len()
    }

    fn check_shape(&self) -> Result<(), MerkleError> {
        let expected = gindex_depth(self.gindex);
        match expected {
            Some(expected) if expected == self.nodes.len() => Ok(()),
            _ => Err(MerkleError::MalformedBranch {
                nodes: self.nodes.len(),
                gindex: self.gindex,
                expected: expected.unwrap_or(0),
            }),
        }
    }
}

/// `floor(log2(gindex))`, or `None` for the invalid index 0.
pub fn gindex_depth(gindex: u64) -> Option<usize> {
    (gindex != 0).then(|| 63 - gindex.leading_zeros() as usize)
}

pub fn hash_node(left: &Digest, right: &Digest) -> Digest {
    let mut hasher = Sha256::new();
    hasher.update(left.0);
    hasher.update(right.0);
    Digest(hasher.finalize().into())
}

/// Root of an all-zero subtree of the given depth.
pub fn zero_hash(depth: usize) -> Digest {
    static ZERO_HASHES: OnceLock<Vec<Digest>> = OnceLock::new();
    ZERO_HASHES.get_or_init(|| {
        let mut hashes = Vec::with_capacity(MAX_DEPTH + 1);
        hashes.push(Digest::ZERO);
        for d in 0..MAX_DEPTH {
            let below = hashes[d];
            hashes.push(hash_node(&below, &below));
        }
        hashes
    })[depth]
}

fn limit_depth(limit: usize) -> Result<usize, MerkleError> {
    if limit == 0 || !limit.is_power_of_two() {
        return Err(MerkleError::BadLimit(limit));
    }
    Ok(limit.trailing_zeros() as usize)
}

/// Root of the tree over `chunks` zero-padded to `limit` leaves.
pub fn merkleize(chunks: &[Digest], limit: usize) -> Result<Digest, MerkleError> {
    merkleize_counted(chunks, limit).map(|(root, _)| root)
}

/// Like [`merkleize`], also returning how many node hashes were computed.
/// Fully zero subtrees come from the precomputed table and are not counted.
pub fn merkleize_counted(chunks: &[Digest], limit: usize) -> Result<(Digest, u64), MerkleError> {
    let depth = limit_depth(limit)?;
    if chunks.len() > limit {
        return Err(MerkleError::LimitExceeded {
            count: chunks.len(),
            limit,
        });
    }
    if chunks.is_empty() {
        return Ok((zero_hash(depth), 0));
    }

    let mut hashes = 0u64;
    let mut layer = chunks.to_vec();
    for level in 0..depth {
        let pad = zero_hash(level);
        layer = layer
            .chunks(2)
            .map(|pair| {
                hashes += 1;
                hash_node(&pair[0], pair.get(1).unwrap_or(&pad))
            })
            .collect();
    }
    Ok((layer[0], hashes))
}

/// Sibling path proving leaf `index` of the tree over `chunks`.
pub fn branch_for(
    chunks: &[Digest],
    limit: usize,
    index: usize,
) -> Result<MerkleBranch, MerkleError> {
    let depth = limit_depth(limit)?;
    if chunks.len() > limit {
        return Err(MerkleError::LimitExceeded {
            count: chunks.len(),
            limit,
        });
    }
    if index >= limit {
        return Err(MerkleError::IndexOutOfRange { index, limit });
    }

    let mut nodes = Vec::with_capacity(depth);
    let mut layer = chunks.to_vec();
    let mut position = index;
    for level in 0..depth {
        let pad = zero_hash(level);
        let sibling = position ^ 1;
        nodes.push(layer.get(sibling).copied().unwrap_or(pad));
        layer = layer
            .chunks(2)
            .map(|pair| hash_node(&pair[0], pair.get(1).unwrap_or(&pad)))
            .collect();
        position >>= 1;
    }
    Ok(MerkleBranch::new(nodes, (limit + index) as u64))
}

/// Folds `leaf` up through `branch` and compares against `root`.
pub fn verify_branch(
    leaf: &Digest,
    branch: &MerkleBranch,
    root: &Digest,
) -> Result<bool, MerkleError> {
    branch.check_shape()?;
    let computed = branch
        .nodes
        .iter()
        .enumerate()
        .fold(*leaf, |node, (depth, sibling)| {
            if (branch.gindex >> depth) & 1 == 1 {
                hash_node(sibling, &node)
            } else {
                hash_node(&node, sibling)
            }
        });
    Ok(&computed == root)
}

/// Generalized index of `inner` (relative to the subtree rooted at `outer`)
/// expressed relative to the outer root.
pub fn gindex_concat(outer: u64, inner: u64) -> u64 {
    let inner_depth = gindex_depth(inner).expect("inner gindex must be >= 1");
    (outer << inner_depth) | (inner ^ (1u64 << inner_depth))
}
