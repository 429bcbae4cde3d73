use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::RelayConfig;
use super::error::RelayError;
use super::types::{BeaconBlockHeader, Snapshot, SyncCommittee};
use crate::ssz_merkle::Digest;

/// Whether the relay keeps full committee keys or only their roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StorageMode {
    Store,
    NoStore,
}

impl FromStr for StorageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "store" => Ok(StorageMode::Store),
            "no-store" | "nostore" => Ok(StorageMode::NoStore),
            other => Err(format!(
                "unknown storage mode {other:?} (expected store or no-store)"
            )),
        }
    }
}

impl fmt::Display for StorageMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StorageMode::Store => "store",
            StorageMode::NoStore => "no-store",
        })
    }
}

/// Committee material held by the relay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum CommitteeStore {
    Store {
        trusted: SyncCommittee,
        trusted_next: SyncCommittee,
    },
    NoStore {
        trusted_root: Digest,
        trusted_next_root: Digest,
    },
}

impl CommitteeStore {
    pub fn mode(&self) -> StorageMode {
        match self {
            CommitteeStore::Store { .. } => StorageMode::Store,
            CommitteeStore::NoStore { .. } => StorageMode::NoStore,
        }
    }

    /// `(trusted, trusted_next)` roots; recomputed from keys in store mode.
    pub fn roots(&self) -> (Digest, Digest) {
        match self {
            CommitteeStore::Store {
                trusted,
                trusted_next,
            } => (trusted.root(), trusted_next.root()),
            CommitteeStore::NoStore {
                trusted_root,
                trusted_next_root,
            } => (*trusted_root, *trusted_next_root),
        }
    }
}

/// The relay's trust anchor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayState {
    pub current_header: BeaconBlockHeader,
    pub committees: CommitteeStore,
    pub config: RelayConfig,
}

impl RelayState {
    pub fn mode(&self) -> StorageMode {
        self.committees.mode()
    }

    /// Canonical JSON form; byte-identical for equal states.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("relay state always serializes");
        s.push('\n');
        s
    }
}

/// Anchors a relay at a snapshot after checking that the supplied state and
/// committees are the ones the header commits to.
pub fn initialize(
    snapshot: &Snapshot,
    mode: StorageMode,
    config: RelayConfig,
) -> Result<RelayState, RelayError> {
    config.validate().map_err(RelayError::InvalidConfig)?;
    if snapshot.state.hash_tree_root() != snapshot.header.state_root {
        return Err(RelayError::StateRootMismatch);
    }
    for (label, committee, expected) in [
        (
            "current",
            &snapshot.current_committee,
            snapshot.state.current_committee_root,
        ),
        (
            "next",
            &snapshot.next_committee,
            snapshot.state.next_committee_root,
        ),
    ] {
        if committee.len() as u64 != config.committee_size {
            return Err(RelayError::CommitteeMismatch(format!(
                "{label} committee has {} keys, expected {}",
                committee.len(),
                config.committee_size
            )));
        }
        if committee.root() != expected {
            return Err(RelayError::CommitteeMismatch(format!(
                "{label} committee keys do not match the state's committee root"
            )));
        }
    }

    let committees = match mode {
        StorageMode::Store => CommitteeStore::Store {
            trusted: snapshot.current_committee.clone(),
            trusted_next: snapshot.next_committee.clone(),
        },
        StorageMode::NoStore => CommitteeStore::NoStore {
            trusted_root: snapshot.state.current_committee_root,
            trusted_next_root: snapshot.state.next_committee_root,
        },
    };
    Ok(RelayState {
        current_header: snapshot.header.clone(),
        committees,
        config,
    })
}
