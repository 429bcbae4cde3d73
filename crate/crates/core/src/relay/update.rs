//! Update verification and the state transition.
//!
//! Three headers take part in every update: the relay's current header, the
//! finalized header being installed and the latest header carrying the
//! committee signature. Depending on which sync-committee periods they fall
//! into, the signature is checked against the trusted or the trusted-next
//! committee, and the committees rotate only when the finalized header
//! itself has moved into the next period.

use super::config::{compute_period, meets_threshold, RelayConfig};
use super::error::RelayError;
use super::state::{CommitteeStore, RelayState};
use super::types::{participation_count, BeaconBlockHeader, RelayUpdate, SyncCommittee};
use crate::bls_sig::{fast_aggregate_verify, PublicKey};
use crate::cost::{committee_key_words, CostMeter};
use crate::ssz_merkle::{verify_branch, Digest, MerkleBranch, MerkleError};

/// Words for the stored header: five fields, one word each.
pub const HEADER_WORDS: u64 = 5;
/// Words for the two committee references (roots, or slot pointers when the
/// keys themselves are stored).
pub const COMMITTEE_REF_WORDS: u64 = 2;

/// Committee that must have signed the latest header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommitteeRole {
    Trusted,
    TrustedNext,
}

pub fn select_signing_committee(
    state: &RelayState,
    latest_slot: u64,
) -> Result<CommitteeRole, RelayError> {
    let current = compute_period(state.current_header.slot, &state.config);
    let latest = compute_period(latest_slot, &state.config);
    if latest == current {
        Ok(CommitteeRole::Trusted)
    } else if latest == current + 1 {
        Ok(CommitteeRole::TrustedNext)
    } else if latest > current + 1 {
        Err(RelayError::PeriodGap { current, latest })
    } else {
        Err(RelayError::NonMonotonic {
            current: state.current_header.slot,
            finalized: latest_slot,
            latest: latest_slot,
        })
    }
}

/// Checks that `branch` proves `finalized_root` at the configured finality
/// position inside `latest.state_root`.
pub fn verify_finality_link(
    latest: &BeaconBlockHeader,
    finalized_root: &Digest,
    branch: &MerkleBranch,
    config: &RelayConfig,
) -> Result<bool, MerkleError> {
    let valid = verify_branch(finalized_root, branch, &latest.state_root)?;
    Ok(valid && branch.gindex == config.finalized_root_gindex)
}

/// Verifies `update` against `state` and returns the successor state.
/// `state` is never modified; `meter` is reset and then records the work done.
pub fn apply_update(
    state: &RelayState,
    update: &RelayUpdate,
    meter: &mut CostMeter,
) -> Result<RelayState, RelayError> {
    meter.reset();
    meter.payload_bytes = update.payload_bytes();
    let config = &state.config;
    let size = config.committee_size;
    let current = &state.current_header;
    let finalized = &update.finalized_header;
    let latest = &update.latest_header;

    if update.participation_bits.len() as u64 != size {
        return Err(RelayError::MalformedUpdate(format!(
            "{} participation bits for a committee of {size}",
            update.participation_bits.len()
        )));
    }
    meter.storage_words_read += HEADER_WORDS + COMMITTEE_REF_WORDS;

    if finalized.slot <= current.slot || latest.slot < finalized.slot {
        return Err(RelayError::NonMonotonic {
            current: current.slot,
            finalized: finalized.slot,
            latest: latest.slot,
        });
    }
    if let Some(window) = config.trusting_window {
        if latest.slot - current.slot > window {
            return Err(RelayError::Expired {
                current: current.slot,
                latest: latest.slot,
                window,
            });
        }
    }

    let role = select_signing_committee(state, latest.slot)?;

    let count = participation_count(&update.participation_bits);
    if !meets_threshold(count, config) {
        return Err(RelayError::InsufficientParticipation { count, size });
    }

    let signers = signing_committee(state, update, role, meter)?;

    let (latest_root, hashes) = latest.hash_tree_root_counted();
    meter.sha256_calls += hashes;
    let keys: Vec<&PublicKey> = update
        .participation_bits
        .iter()
        .zip(&signers.pubkeys)
        .filter_map(|(bit, pk)| bit.then_some(pk))
        .collect();
    meter.point_additions += keys.len() as u64 - 1;
    meter.pairing_checks += 1;
    meter.sha256_calls += 1;
    let signature_ok = fast_aggregate_verify(
        &keys,
        &latest_root,
        &config.domain,
        &update.aggregate_signature,
    )
    .unwrap_or(false);
    if !signature_ok {
        return Err(RelayError::SignatureInvalid);
    }

    let (finalized_root, hashes) = finalized.hash_tree_root_counted();
    meter.sha256_calls += hashes;
    meter.sha256_calls += update.finality_branch.depth() as u64;
    let final_ok = verify_finality_link(latest, &finalized_root, &update.finality_branch, config)
        .unwrap_or(false);
    if !final_ok {
        return Err(RelayError::FinalityProofInvalid);
    }

    let (state_root, hashes) = update.finalized_state.hash_tree_root_counted();
    meter.sha256_calls += hashes;
    if state_root != finalized.state_root {
        return Err(RelayError::StateRootMismatch);
    }

    let current_period = compute_period(current.slot, config);
    let rotates = compute_period(finalized.slot, config) == current_period + 1;
    let committees = if rotates {
        rotate_committees(state, update, meter)?
    } else {
        state.committees.clone()
    };

    meter.storage_words_written += HEADER_WORDS + COMMITTEE_REF_WORDS;
    Ok(RelayState {
        current_header: finalized.clone(),
        committees,
        config: config.clone(),
    })
}

/// Keys for `role`, taken from storage or from the resubmitted committee
/// after checking it against the stored root.
fn signing_committee<'a>(
    state: &'a RelayState,
    update: &'a RelayUpdate,
    role: CommitteeRole,
    meter: &mut CostMeter,
) -> Result<&'a SyncCommittee, RelayError> {
    let size = state.config.committee_size;
    match &state.committees {
        CommitteeStore::Store {
            trusted,
            trusted_next,
        } => {
            meter.storage_words_read += committee_key_words(size);
            Ok(match role {
                CommitteeRole::Trusted => trusted,
                CommitteeRole::TrustedNext => trusted_next,
            })
        }
        CommitteeStore::NoStore {
            trusted_root,
            trusted_next_root,
        } => {
            let committee = update.resubmitted_committee.as_ref().ok_or_else(|| {
                RelayError::CommitteeMismatch("signing committee keys were not resubmitted".into())
            })?;
            if committee.len() as u64 != size {
                return Err(RelayError::CommitteeMismatch(format!(
                    "resubmitted committee has {} keys, expected {size}",
                    committee.len()
                )));
            }
            let (root, hashes) = committee.root_counted();
            meter.sha256_calls += hashes;
            let expected = match role {
                CommitteeRole::Trusted => trusted_root,
                CommitteeRole::TrustedNext => trusted_next_root,
            };
            if &root != expected {
                return Err(RelayError::CommitteeMismatch(
                    "resubmitted keys do not match the stored committee root".into(),
                ));
            }
            Ok(committee)
        }
    }
}

/// Checks the incoming committee and builds the rotated committee store.
fn rotate_committees(
    state: &RelayState,
    update: &RelayUpdate,
    meter: &mut CostMeter,
) -> Result<CommitteeStore, RelayError> {
    let config = &state.config;
    let (Some(next), Some(branch)) = (&update.next_committee, &update.next_committee_branch) else {
        return Err(RelayError::MissingNextCommittee);
    };
    if next.len() as u64 != config.committee_size {
        return Err(RelayError::CommitteeProofInvalid);
    }
    let (next_root, hashes) = next.root_counted();
    meter.sha256_calls += hashes + branch.depth() as u64;
    let proven = branch.gindex == config.next_committee_gindex
        && verify_branch(&next_root, branch, &update.finalized_header.state_root).unwrap_or(false);
    if !proven {
        return Err(RelayError::CommitteeProofInvalid);
    }

    let stored_next_root = match &state.committees {
        CommitteeStore::Store { trusted_next, .. } => {
            let (root, hashes) = trusted_next.root_counted();
            meter.sha256_calls += hashes;
            root
        }
        CommitteeStore::NoStore {
            trusted_next_root, ..
        } => *trusted_next_root,
    };
    if update.finalized_state.current_committee_root != stored_next_root {
        return Err(RelayError::CommitteeMismatch(
            "finalized state's current committee is not the trusted next committee".into(),
        ));
    }

    Ok(match &state.committees {
        CommitteeStore::Store { trusted_next, .. } => {
            meter.storage_words_written += committee_key_words(config.committee_size);
            CommitteeStore::Store {
                trusted: trusted_next.clone(),
                trusted_next: next.clone(),
            }
        }
        CommitteeStore::NoStore {
            trusted_next_root, ..
        } => CommitteeStore::NoStore {
            trusted_root: *trusted_next_root,
            trusted_next_root: next_root,
        },
    })
}

impl RelayState {
    /// Commits `update` if it verifies; leaves `self` untouched otherwise.
    pub fn try_apply(
        &mut self,
        update: &RelayUpdate,
        meter: &mut CostMeter,
    ) -> Result<(), RelayError> {
        *self = apply_update(self, update, meter)?;
        Ok(())
    }

    pub fn period(&self) -> u64 {
        compute_period(self.current_header.slot, &self.config)
    }
}
