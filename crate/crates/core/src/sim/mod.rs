//! Deterministic beacon-chain simulator.
//!
//! Builds a fully populated chain (one header per slot) whose states commit
//! to the sampled sync committees and to a finalized checkpoint two epochs
//! back, then crafts signed relay updates and adversarial variants of them.

mod craft;
mod export;
mod tamper;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::bls_sig::{keygen, PublicKey, SecretKey};
use crate::relay::{
    compute_period, BeaconBlockHeader, RelayConfig, SimBeaconState, Snapshot, SyncCommittee,
};
use crate::ssz_merkle::{hash_node, Digest};

pub use craft::{admissible_latest_slots, craft_update, craft_update_at, UpdateCase};
pub use export::{ChainExport, ChainFile, CommitteeFile, SecretsFile, SlotRecord};
pub use tamper::{tamper, TamperKind, Tampering};

/// Epochs between a block and the checkpoint it finalizes.
pub const FINALITY_LAG_EPOCHS: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{count} validators cannot fill a committee of {committee_size}")]
    TooFewValidators { count: usize, committee_size: u64 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("slot {slot} is outside the chain (0..{len})")]
    SlotOutOfRange { slot: u64, len: u64 },
    #[error("case {case} cannot be realized from anchor slot {anchor}")]
    CaseUnrealizable { case: u8, anchor: u64 },
    #[error("tampering not applicable: {0}")]
    NotApplicable(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("malformed chain export: {0}")]
    Format(String),
}

pub struct Validator {
    pub seed: [u8; 32],
    pub secret: SecretKey,
    pub public: PublicKey,
}

/// Committee sampled for one period, with the validator indices it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCommittee {
    pub indices: Vec<usize>,
    pub committee: SyncCommittee,
    pub root: Digest,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimSlot {
    pub header: BeaconBlockHeader,
    pub state: SimBeaconState,
    pub root: Digest,
}

/// A generated chain. Committees cover one period more than the headers so
/// that every state can reference its next committee.
pub struct SimChain {
    pub seed: u64,
    pub config: RelayConfig,
    pub num_periods: u64,
    pub validators: Vec<Validator>,
    pub committees: Vec<PeriodCommittee>,
    pub slots: Vec<SimSlot>,
}

fn derive(label: &str, seed: u64, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    hasher.update(seed.to_le_bytes());
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

/// Seed of validator `index` in a chain built from `seed`.
pub fn validator_seed(seed: u64, index: u64) -> [u8; 32] {
    derive("pos-relay/validator", seed, index)
}

/// Key that belongs to no validator of the chain, for adversarial updates.
pub fn outsider_key(seed: u64, index: u64) -> (SecretKey, PublicKey) {
    keygen(&derive("pos-relay/outsider", seed, index))
}

/// Seeded partial Fisher-Yates selection of `size` distinct validators.
fn sample_committee(seed: u64, period: u64, validator_count: usize, size: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::from_seed(derive("pos-relay/committee", seed, period));
    let mut indices: Vec<usize> = (0..validator_count).collect();
    let (chosen, _) = indices.partial_shuffle(&mut rng, size);
    chosen.to_vec()
}

/// Slot of the checkpoint finalized as of `slot`.
pub fn finalized_checkpoint(slot: u64, config: &RelayConfig) -> u64 {
    config.epoch(slot).saturating_sub(FINALITY_LAG_EPOCHS) * config.slots_per_epoch
}

pub fn build_chain(
    seed: u64,
    config: RelayConfig,
    num_periods: u64,
    validator_count: usize,
) -> Result<SimChain, SimError> {
    config.validate().map_err(SimError::InvalidParameters)?;
    if num_periods == 0 {
        return Err(SimError::InvalidParameters(
            "num_periods must be at least 1".into(),
        ));
    }
    let size = config.committee_size as usize;
    if validator_count < size {
        return Err(SimError::TooFewValidators {
            count: validator_count,
            committee_size: config.committee_size,
        });
    }

    let validators: Vec<Validator> = (0..validator_count as u64)
        .map(|i| {
            let seed = validator_seed(seed, i);
            let (secret, public) = keygen(&seed);
            Validator {
                seed,
                secret,
                public,
            }
        })
        .collect();

    let committees: Vec<PeriodCommittee> = (0..=num_periods)
        .map(|period| {
            let indices = sample_committee(seed, period, validator_count, size);
            let committee = SyncCommittee::new(
                indices
                    .iter()
                    .map(|&i| validators[i].public.clone())
                    .collect(),
            );
            let root = committee.root();
            PeriodCommittee {
                indices,
                committee,
                root,
            }
        })
        .collect();

    let slot_count = num_periods * config.slots_per_period();
    let mut slots: Vec<SimSlot> = Vec::with_capacity(slot_count as usize);
    for slot in 0..slot_count {
        let period = compute_period(slot, &config) as usize;
        let finalized_slot = finalized_checkpoint(slot, &config);
        let (finalized_root, parent_root, history_root) = match slots.last() {
            None => (Digest::ZERO, Digest::ZERO, Digest::ZERO),
            Some(prev) => (
                slots[finalized_slot as usize].root,
                prev.root,
                hash_node(&prev.state.history_root, &prev.root),
            ),
        };
        let state = SimBeaconState {
            slot,
            finalized_root,
            finalized_slot,
            current_committee_root: committees[period].root,
            next_committee_root: committees[period + 1].root,
            history_root,
            reserved_a: Digest::ZERO,
            reserved_b: Digest::ZERO,
        };
        let proposer = u64::from_le_bytes(
            derive("pos-relay/proposer", seed, slot)[..8]
                .try_into()
                .expect("8 bytes"),
        ) % validator_count as u64;
        let header = BeaconBlockHeader {
            slot,
            proposer_index: proposer,
            parent_root,
            state_root: state.hash_tree_root(),
            body_root: Digest(derive("pos-relay/body", seed, slot)),
        };
        let root = header.hash_tree_root();
        slots.push(SimSlot {
            header,
            state,
            root,
        });
    }

    Ok(SimChain {
        seed,
        config,
        num_periods,
        validators,
        committees,
        slots,
    })
}

impl SimChain {
    pub fn slot_count(&self) -> u64 {
        self.slots.len() as u64
    }

    pub fn period_of(&self, slot: u64) -> u64 {
        compute_period(slot, &self.config)
    }

    pub fn get(&self, slot: u64) -> Result<&SimSlot, SimError> {
        self.slots
            .get(slot as usize)
            .ok_or(SimError::SlotOutOfRange {
                slot,
                len: self.slot_count(),
            })
    }

    pub fn committee(&self, period: u64) -> &PeriodCommittee {
        &self.committees[period as usize]
    }

    /// Secret key of committee member `position` in `period`.
    pub fn member_secret(&self, period: u64, position: usize) -> &SecretKey {
        &self.validators[self.committee(period).indices[position]].secret
    }

    /// First slot of `period`.
    pub fn period_start(&self, period: u64) -> u64 {
        period * self.config.slots_per_period()
    }
}

/// Initialization material at `slot`.
pub fn snapshot(chain: &SimChain, slot: u64) -> Result<Snapshot, SimError> {
    let entry = chain.get(slot)?;
    let period = chain.period_of(slot);
    Ok(Snapshot {
        header: entry.header.clone(),
        state: entry.state.clone(),
        current_committee: chain.committee(period).committee.clone(),
        next_committee: chain.committee(period + 1).committee.clone(),
    })
}
