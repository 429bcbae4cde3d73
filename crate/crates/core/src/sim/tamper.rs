use std::fmt;

use rand::Rng;

use super::craft::{assemble_update, sign_as_committee};
use super::{outsider_key, SimChain, SimError};
use crate::bls_sig::SIGNATURE_LEN;
use crate::relay::{
    meets_threshold, BeaconBlockHeader, ParticipationBits, RelayUpdate, SyncCommittee,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TamperKind {
    FlipSignatureByte,
    SwapSigner,
    UnderParticipate,
    BadFinalityBranch,
    BadNextCommittee,
    WrongCommitteeKeys,
    SkipPeriod,
}

impl TamperKind {
    pub const ALL: [TamperKind; 7] = [
        TamperKind::FlipSignatureByte,
        TamperKind::SwapSigner,
        TamperKind::UnderParticipate,
        TamperKind::BadFinalityBranch,
        TamperKind::BadNextCommittee,
        TamperKind::WrongCommitteeKeys,
        TamperKind::SkipPeriod,
    ];

    /// Name of the relay error this tampering must provoke.
    pub fn expected_error(self) -> &'static str {
        match self {
            TamperKind::FlipSignatureByte | TamperKind::SwapSigner => "SignatureInvalid",
            TamperKind::UnderParticipate => "InsufficientParticipation",
            TamperKind::BadFinalityBranch => "FinalityProofInvalid",
            TamperKind::BadNextCommittee => "CommitteeProofInvalid",
            TamperKind::WrongCommitteeKeys => "CommitteeMismatch",
            TamperKind::SkipPeriod => "PeriodGap",
        }
    }

    /// Whether the kind only applies to updates that carry a next committee.
    pub fn needs_transition(self) -> bool {
        matches!(
            self,
            TamperKind::BadNextCommittee | TamperKind::WrongCommitteeKeys
        )
    }
}

impl fmt::Display for TamperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            TamperKind::FlipSignatureByte => "FLIP_SIGNATURE_BYTE",
            TamperKind::SwapSigner => "SWAP_SIGNER",
            TamperKind::UnderParticipate => "UNDER_PARTICIPATE",
            TamperKind::BadFinalityBranch => "BAD_FINALITY_BRANCH",
            TamperKind::BadNextCommittee => "BAD_NEXT_COMMITTEE",
            TamperKind::WrongCommitteeKeys => "WRONG_COMMITTEE_KEYS",
            TamperKind::SkipPeriod => "SKIP_PERIOD",
        })
    }
}

/// One concrete mutation of an honest update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tampering {
    /// XOR `mask` (non-zero) into signature byte `index`.
    FlipSignatureByte { index: usize, mask: u8 },
    /// Replace the signature share of the `position`-th participant with one
    /// from a key outside the committee; the bits still claim the member.
    SwapSigner { position: usize },
    /// Re-sign with only the first `count` members, `count` below threshold.
    UnderParticipate { count: usize },
    /// Flip bit `bit` of byte `byte` in finality-branch node `node`.
    BadFinalityBranch { node: usize, byte: usize, bit: u8 },
    /// Replace next-committee key `position` with an outsider key.
    BadNextCommittee { position: usize },
    /// Forge the finalized state so it names a committee with key
    /// `position` replaced, then re-link and re-sign the headers with the
    /// real signing committee. Every proof checks out, but the committee the
    /// finalized state claims is active is not the one the relay trusts.
    WrongCommitteeKeys { position: usize },
    /// Move the latest header `periods` (at least 2) periods forward.
    SkipPeriod { periods: u64 },
}

impl Tampering {
    pub fn kind(&self) -> TamperKind {
        match self {
            Tampering::FlipSignatureByte { .. } => TamperKind::FlipSignatureByte,
            Tampering::SwapSigner { .. } => TamperKind::SwapSigner,
            Tampering::UnderParticipate { .. } => TamperKind::UnderParticipate,
            Tampering::BadFinalityBranch { .. } => TamperKind::BadFinalityBranch,
            Tampering::BadNextCommittee { .. } => TamperKind::BadNextCommittee,
            Tampering::WrongCommitteeKeys { .. } => TamperKind::WrongCommitteeKeys,
            Tampering::SkipPeriod { .. } => TamperKind::SkipPeriod,
        }
    }

    /// Random parameters for `kind` suited to `update`.
    pub fn random<R: Rng>(
        kind: TamperKind,
        rng: &mut R,
        update: &RelayUpdate,
        committee_size: u64,
    ) -> Self {
        let size = committee_size as usize;
        match kind {
            TamperKind::FlipSignatureByte => Tampering::FlipSignatureByte {
                index: rng.gen_range(0..SIGNATURE_LEN),
                mask: rng.gen_range(1..=u8::MAX),
            },
            TamperKind::SwapSigner => Tampering::SwapSigner {
                position: rng.gen_range(0..update.participation_bits.count() as usize),
            },
            TamperKind::UnderParticipate => {
                // Largest count still below two thirds.
                let max_bad = (2 * committee_size).div_ceil(3) - 1;
                Tampering::UnderParticipate {
                    count: rng.gen_range(0..=max_bad as usize),
                }
            }
            TamperKind::BadFinalityBranch => Tampering::BadFinalityBranch {
                node: rng.gen_range(0..update.finality_branch.nodes.len().max(1)),
                byte: rng.gen_range(0..32),
                bit: rng.gen_range(0..8),
            },
            TamperKind::BadNextCommittee => Tampering::BadNextCommittee {
                position: rng.gen_range(0..size),
            },
            TamperKind::WrongCommitteeKeys => Tampering::WrongCommitteeKeys {
                position: rng.gen_range(0..size),
            },
            TamperKind::SkipPeriod => Tampering::SkipPeriod { periods: 2 },
        }
    }
}

fn replace_key(committee: &SyncCommittee, position: usize, seed: u64) -> SyncCommittee {
    let mut keys = committee.pubkeys.clone();
    let (_, outsider) = outsider_key(seed, position as u64);
    let len = keys.len();
    keys[position % len] = outsider;
    SyncCommittee::new(keys)
}

/// Returns a mutated copy of `update`; the original is left as is.
pub fn tamper(
    update: &RelayUpdate,
    tampering: Tampering,
    chain: &SimChain,
) -> Result<RelayUpdate, SimError> {
    let config = &chain.config;
    let size = config.committee_size as usize;
    let signing_period = chain.period_of(update.latest_header.slot);
    let mut out = update.clone();
    match tampering {
        Tampering::FlipSignatureByte { index, mask } => {
            if mask == 0 {
                return Err(SimError::NotApplicable("mask must be non-zero".into()));
            }
            out.aggregate_signature.0[index % SIGNATURE_LEN] ^= mask;
        }
        Tampering::SwapSigner { position } => {
            let participants: Vec<usize> = update
                .participation_bits
                .iter()
                .enumerate()
                .filter_map(|(i, bit)| bit.then_some(i))
                .collect();
            if participants.is_empty() {
                return Err(SimError::NotApplicable("no participants to swap".into()));
            }
            let victim = participants[position % participants.len()];
            let (outsider, _) = outsider_key(chain.seed, victim as u64);
            out.aggregate_signature = sign_as_committee(
                chain,
                signing_period,
                &update.participation_bits,
                &update.latest_header,
                Some((victim, &outsider)),
            );
        }
        Tampering::UnderParticipate { count } => {
            if count > size || meets_threshold(count as u64, config) {
                return Err(SimError::NotApplicable(format!(
                    "{count} of {size} is not below the participation threshold"
                )));
            }
            out.participation_bits = ParticipationBits::first_n(size, count);
            out.aggregate_signature = sign_as_committee(
                chain,
                signing_period,
                &out.participation_bits,
                &update.latest_header,
                None,
            );
        }
        Tampering::BadFinalityBranch { node, byte, bit } => {
            let nodes = &mut out.finality_branch.nodes;
            if nodes.is_empty() {
                return Err(SimError::NotApplicable("finality branch is empty".into()));
            }
            let len = nodes.len();
            nodes[node % len].0[byte % 32] ^= 1 << (bit % 8);
        }
        Tampering::BadNextCommittee { position } => {
            let next = update.next_committee.as_ref().ok_or_else(|| {
                SimError::NotApplicable("update carries no next committee".into())
            })?;
            out.next_committee = Some(replace_key(next, position, chain.seed));
        }
        Tampering::WrongCommitteeKeys { position } => {
            if update.next_committee.is_none() {
                return Err(SimError::NotApplicable(
                    "update carries no next committee".into(),
                ));
            }
            let latest = chain.get(update.latest_header.slot)?;
            if latest.header != update.latest_header {
                return Err(SimError::NotApplicable(
                    "latest header is not from this chain".into(),
                ));
            }
            let claimed = chain.committee(chain.period_of(update.finalized_header.slot));
            let wrong = replace_key(&claimed.committee, position, chain.seed);

            let mut finalized_state = update.finalized_state.clone();
            finalized_state.current_committee_root = wrong.root();
            let finalized_header = BeaconBlockHeader {
                state_root: finalized_state.hash_tree_root(),
                ..update.finalized_header.clone()
            };
            let mut latest_state = latest.state.clone();
            latest_state.finalized_root = finalized_header.hash_tree_root();
            let latest_header = BeaconBlockHeader {
                state_root: latest_state.hash_tree_root(),
                ..update.latest_header.clone()
            };
            out = assemble_update(
                chain,
                &finalized_header,
                &finalized_state,
                &latest_header,
                &latest_state,
                update.participation_bits.clone(),
                true,
            )?;
            out.resubmitted_committee = update.resubmitted_committee.clone();
        }
        Tampering::SkipPeriod { periods } => {
            if periods < 2 {
                return Err(SimError::NotApplicable(
                    "a skip of fewer than two periods is not a gap".into(),
                ));
            }
            let latest_slot = update.latest_header.slot + periods * config.slots_per_period();
            let latest = chain.get(latest_slot).map_err(|_| {
                SimError::NotApplicable(format!("chain ends before slot {latest_slot}"))
            })?;
            let finalized = chain.get(latest.state.finalized_slot)?;
            out = assemble_update(
                chain,
                &finalized.header,
                &finalized.state,
                &latest.header,
                &latest.state,
                update.participation_bits.clone(),
                true,
            )?;
            if update.resubmitted_committee.is_none() {
                out.resubmitted_committee = None;
            }
        }
    }
    Ok(out)
}
