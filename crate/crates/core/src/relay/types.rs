use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bls_sig::{PublicKey, Signature, PUBLIC_KEY_LEN, SIGNATURE_LEN};
use crate::ssz_merkle::{branch_for, merkleize_counted, Digest, MerkleBranch};

/// Leaves in both the header and the state container trees.
const CONTAINER_LIMIT: usize = 8;

pub const HEADER_BYTES: u64 = 112;
pub const STATE_BYTES: u64 = 8 * 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeaconBlockHeader {
    pub slot: u64,
    pub proposer_index: u64,
    pub parent_root: Digest,
    pub state_root: Digest,
    pub body_root: Digest,
}

impl BeaconBlockHeader {
    pub fn chunks(&self) -> [Digest; 5] {
        [
            Digest::from_u64(self.slot),
            Digest::from_u64(self.proposer_index),
            self.parent_root,
            self.state_root,
            self.body_root,
        ]
    }

    pub fn hash_tree_root(&self) -> Digest {
        self.hash_tree_root_counted().0
    }

    pub(crate) fn hash_tree_root_counted(&self) -> (Digest, u64) {
        merkleize_counted(&self.chunks(), CONTAINER_LIMIT).expect("fixed container shape")
    }
}

/// Eight-field stand-in for the beacon state. Only the fields the relay
/// proves against are meaningful; the rest pad the tree to eight leaves.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimBeaconState {
    pub slot: u64,
    pub finalized_root: Digest,
    pub finalized_slot: u64,
    pub current_committee_root: Digest,
    pub next_committee_root: Digest,
    pub history_root: Digest,
    pub reserved_a: Digest,
    pub reserved_b: Digest,
}

impl SimBeaconState {
    /// Leaves in tree order; leaf `i` sits at generalized index `8 + i`.
    pub fn leaves(&self) -> [Digest; 8] {
        [
            Digest::from_u64(self.slot),
            self.finalized_root,
            Digest::from_u64(self.finalized_slot),
            self.current_committee_root,
            self.next_committee_root,
            self.history_root,
            self.reserved_a,
            self.reserved_b,
        ]
    }

    pub fn hash_tree_root(&self) -> Digest {
        self.hash_tree_root_counted().0
    }

    pub(crate) fn hash_tree_root_counted(&self) -> (Digest, u64) {
        merkleize_counted(&self.leaves(), CONTAINER_LIMIT).expect("fixed container shape")
    }

    /// Proof for the leaf at `gindex` (8..16).
    pub fn branch(&self, gindex: u64) -> MerkleBranch {
        assert!(
            (8..16).contains(&gindex),
            "gindex {gindex} is not a state leaf"
        );
        branch_for(&self.leaves(), CONTAINER_LIMIT, (gindex - 8) as usize)
            .expect("leaf index within container")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncCommittee {
    pub pubkeys: Vec<PublicKey>,
}

impl SyncCommittee {
    pub fn new(pubkeys: Vec<PublicKey>) -> Self {
        Self { pubkeys }
    }

    pub fn len(&self) -> usize {
        self.pubkeys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pubkeys.is_empty()
    }

    /// Each key is split over two chunks: bytes 0..32, then bytes 32..48
    /// followed by 16 zero bytes.
    pub fn chunks(&self) -> Vec<Digest> {
        let mut chunks = Vec::with_capacity(2 * self.pubkeys.len());
        for pk in &self.pubkeys {
            let bytes = pk.as_bytes();
            let mut low = [0u8; 32];
            low.copy_from_slice(&bytes[..32]);
            let mut high = [0u8; 32];
            high[..PUBLIC_KEY_LEN - 32].copy_from_slice(&bytes[32..]);
            chunks.push(Digest(low));
            chunks.push(Digest(high));
        }
        chunks
    }

    pub fn root(&self) -> Digest {
        self.root_counted().0
    }

    pub(crate) fn root_counted(&self) -> (Digest, u64) {
        let chunks = self.chunks();
        let limit = chunks.len().max(1).next_power_of_two();
        merkleize_counted(&chunks, limit).expect("limit covers chunk count")
    }
}

/// Which committee members contributed to an aggregate signature.
/// Serialized as a string of `0`/`1` characters, member 0 first.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ParticipationBits(pub Vec<bool>);

impl ParticipationBits {
    pub fn first_n(size: usize, n: usize) -> Self {
        Self((0..size).map(|i| i < n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> u64 {
        participation_count(self)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn packed_len(&self) -> u64 {
        self.0.len().div_ceil(8) as u64
    }
}

pub fn participation_count(bits: &ParticipationBits) -> u64 {
    bits.0.iter().filter(|b| **b).count() as u64
}

impl fmt::Debug for ParticipationBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "ParticipationBits({s})")
    }
}

impl Serialize for ParticipationBits {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        serializer.serialize_str(&s)
    }
}

impl<'de> Deserialize<'de> for ParticipationBits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!(
                    "participation bit must be 0 or 1, got {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(ParticipationBits)
    }
}

/// Everything a relayer submits to advance the relay by one finalized header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayUpdate {
    pub finalized_header: BeaconBlockHeader,
    pub finalized_state: SimBeaconState,
    pub latest_header: BeaconBlockHeader,
    /// Proves the finalized header's root inside the latest header's state.
    pub finality_branch: MerkleBranch,
    pub participation_bits: ParticipationBits,
    pub aggregate_signature: Signature,
    pub next_committee: Option<SyncCommittee>,
    /// Proves the next committee's root inside the finalized state.
    pub next_committee_branch: Option<MerkleBranch>,
    /// Signing committee keys, required when the relay only stores roots.
    pub resubmitted_committee: Option<SyncCommittee>,
}

fn branch_bytes(branch: &MerkleBranch) -> u64 {
    32 * branch.nodes.len() as u64 + 8
}

impl RelayUpdate {
    /// Calldata size of the update in its packed binary form.
    pub fn payload_bytes(&self) -> u64 {
        let committee_bytes = |c: &SyncCommittee| PUBLIC_KEY_LEN as u64 * c.len() as u64;
        2 * HEADER_BYTES
            + STATE_BYTES
            + branch_bytes(&self.finality_branch)
            + self.participation_bits.packed_len()
            + SIGNATURE_LEN as u64
            + self.next_committee.as_ref().map_or(0, committee_bytes)
            + self.next_committee_branch.as_ref().map_or(0, branch_bytes)
            + self
                .resubmitted_committee
                .as_ref()
                .map_or(0, committee_bytes)
    }

    /// Copy without the resubmitted keys, as sent to a key-storing relay.
    pub fn without_resubmission(&self) -> Self {
        Self {
            resubmitted_committee: None,
            ..self.clone()
        }
    }
}

/// Trusted starting point: a header, its full state and both committees it
/// references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub header: BeaconBlockHeader,
    pub state: SimBeaconState,
    pub current_committee: SyncCommittee,
    pub next_committee: SyncCommittee,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bls_sig::keygen;
    use crate::ssz_merkle::{hash_node, verify_branch};

    fn header() -> BeaconBlockHeader {
        BeaconBlockHeader {
            slot: 5,
            proposer_index: 3,
            parent_root: Digest([1; 32]),
            state_root: Digest([2; 32]),
            body_root: Digest([3; 32]),
        }
    }

    #[test]
    fn header_root_by_hand() {
        let h = header();
        let c = h.chunks();
        let z = Digest::ZERO;
        let expected = hash_node(
            &hash_node(&hash_node(&c[0], &c[1]), &hash_node(&c[2], &c[3])),
            &hash_node(&hash_node(&c[4], &z), &hash_node(&z, &z)),
        );
        assert_eq!(h.hash_tree_root(), expected);
    }

    #[test]
    fn state_branches_verify() {
        let state = SimBeaconState {
            slot: 40,
            finalized_root: Digest([4; 32]),
            next_committee_root: Digest([6; 32]),
            ..Default::default()
        };
        let root = state.hash_tree_root();
        for g in 8..16u64 {
            let leaf = state.leaves()[(g - 8) as usize];
            assert!(verify_branch(&leaf, &state.branch(g), &root).unwrap());
        }
    }

    #[test]
    fn committee_chunking() {
        let (_, pk) = keygen(&[1; 32]);
        let committee = SyncCommittee::new(vec![pk.clone()]);
        let chunks = committee.chunks();
        assert_eq!(&chunks[0].0[..], &pk.as_bytes()[..32]);
        assert_eq!(&chunks[1].0[..16], &pk.as_bytes()[32..]);
        assert_eq!(&chunks[1].0[16..], &[0u8; 16]);
        assert_eq!(committee.root(), hash_node(&chunks[0], &chunks[1]));
    }

    #[test]
    fn participation_bits_json() {
        let bits = ParticipationBits::first_n(6, 4);
        let json = serde_json::to_string(&bits).unwrap();
        assert_eq!(json, "\"111100\"");
        let back: ParticipationBits = serde_json::from_str(&json).unwrap();
        assert_eq!(back, bits);
        assert!(serde_json::from_str::<ParticipationBits>("\"1102\"").is_err());
        assert_eq!(participation_count(&ParticipationBits::first_n(512, 0)), 0);
        assert_eq!(
            participation_count(&ParticipationBits::first_n(512, 512)),
            512
        );
    }
}
