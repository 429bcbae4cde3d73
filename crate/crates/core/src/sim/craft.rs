use super::{finalized_checkpoint, SimChain, SimError};
use crate::bls_sig::{aggregate_signatures, sign, Signature, SIGNATURE_LEN};
use crate::relay::{
    BeaconBlockHeader, ParticipationBits, RelayUpdate, SimBeaconState, SyncCommittee,
};

/// Period pattern of an update relative to the relay's current header in
/// period `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpdateCase {
    /// Finalized and latest headers both in `p`.
    SamePeriod = 1,
    /// Finalized header in `p`, latest header in `p + 1`.
    LatestInNext = 2,
    /// Finalized and latest headers both in `p + 1`; committees rotate.
    Transition = 3,
}

impl UpdateCase {
    pub const ALL: [UpdateCase; 3] = [
        UpdateCase::SamePeriod,
        UpdateCase::LatestInNext,
        UpdateCase::Transition,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(UpdateCase::SamePeriod),
            2 => Some(UpdateCase::LatestInNext),
            3 => Some(UpdateCase::Transition),
            _ => None,
        }
    }

    fn periods(self, anchor_period: u64) -> (u64, u64) {
        match self {
            UpdateCase::SamePeriod => (anchor_period, anchor_period),
            UpdateCase::LatestInNext => (anchor_period, anchor_period + 1),
            UpdateCase::Transition => (anchor_period + 1, anchor_period + 1),
        }
    }
}

/// Latest-header slots that realize `case` for a relay anchored at `anchor`.
pub fn admissible_latest_slots(chain: &SimChain, case: UpdateCase, anchor: u64) -> Vec<u64> {
    let (want_finalized, want_latest) = case.periods(chain.period_of(anchor));
    (anchor + 1..chain.slot_count())
        .filter(|&latest| {
            let finalized = finalized_checkpoint(latest, &chain.config);
            finalized > anchor
                && chain.period_of(finalized) == want_finalized
                && chain.period_of(latest) == want_latest
        })
        .collect()
}

/// Honest update of the requested case, using the furthest admissible
/// latest header and the first `participation` committee members.
pub fn craft_update(
    chain: &SimChain,
    case_id: u8,
    anchor_slot: u64,
    participation: usize,
) -> Result<RelayUpdate, SimError> {
    let case = UpdateCase::from_id(case_id)
        .ok_or_else(|| SimError::InvalidParameters(format!("unknown case {case_id}")))?;
    chain.get(anchor_slot)?;
    let latest = admissible_latest_slots(chain, case, anchor_slot)
        .last()
        .copied()
        .ok_or(SimError::CaseUnrealizable {
            case: case_id,
            anchor: anchor_slot,
        })?;
    craft_update_at(chain, anchor_slot, latest, participation)
}

/// Honest update whose latest header is at `latest_slot`. The finalized
/// header is whatever that header's state finalizes. The next committee is
/// attached whenever the finalized header lies past the anchor's period.
pub fn craft_update_at(
    chain: &SimChain,
    anchor_slot: u64,
    latest_slot: u64,
    participation: usize,
) -> Result<RelayUpdate, SimError> {
    chain.get(anchor_slot)?;
    let latest = chain.get(latest_slot)?;
    let finalized = chain.get(latest.state.finalized_slot)?;
    let attach_next = chain.period_of(finalized.header.slot) > chain.period_of(anchor_slot);
    assemble_update(
        chain,
        &finalized.header,
        &finalized.state,
        &latest.header,
        &latest.state,
        ParticipationBits::first_n(chain.config.committee_size as usize, participation),
        attach_next,
    )
}

/// Builds and signs an update from explicit headers and states. The signing
/// committee is the one of the latest header's period.
pub(super) fn assemble_update(
    chain: &SimChain,
    finalized_header: &BeaconBlockHeader,
    finalized_state: &SimBeaconState,
    latest_header: &BeaconBlockHeader,
    latest_state: &SimBeaconState,
    participation_bits: ParticipationBits,
    attach_next: bool,
) -> Result<RelayUpdate, SimError> {
    let config = &chain.config;
    if participation_bits.len() as u64 != config.committee_size {
        return Err(SimError::InvalidParameters(format!(
            "{} participation bits for a committee of {}",
            participation_bits.len(),
            config.committee_size
        )));
    }
    let signing_period = chain.period_of(latest_header.slot);
    let next_period = chain.period_of(finalized_header.slot) + 1;
    let aggregate_signature = sign_as_committee(
        chain,
        signing_period,
        &participation_bits,
        latest_header,
        None,
    );

    let (next_committee, next_committee_branch) =
        if attach_next && (next_period as usize) < chain.committees.len() {
            (
                Some(chain.committee(next_period).committee.clone()),
                Some(finalized_state.branch(config.next_committee_gindex)),
            )
        } else {
            (None, None)
        };

    Ok(RelayUpdate {
        finalized_header: finalized_header.clone(),
        finalized_state: finalized_state.clone(),
        latest_header: latest_header.clone(),
        finality_branch: latest_state.branch(config.finalized_root_gindex),
        participation_bits,
        aggregate_signature,
        next_committee,
        next_committee_branch,
        resubmitted_committee: Some(signing_committee(chain, signing_period)),
    })
}

fn signing_committee(chain: &SimChain, period: u64) -> SyncCommittee {
    chain.committee(period).committee.clone()
}

/// Compressed encoding of the G2 identity, used when nobody signs.
pub(super) fn empty_signature() -> Signature {
    let mut bytes = [0u8; SIGNATURE_LEN];
    bytes[0] = 0xc0;
    Signature(bytes)
}

/// Aggregate of each participating member's signature over `header`.
/// `substitute` replaces one member's signature with another key's.
pub(super) fn sign_as_committee(
    chain: &SimChain,
    period: u64,
    bits: &ParticipationBits,
    header: &BeaconBlockHeader,
    substitute: Option<(usize, &crate::bls_sig::SecretKey)>,
) -> Signature {
    let message = header.hash_tree_root();
    let domain = &chain.config.domain;
    let sigs: Vec<Signature> = bits
        .iter()
        .enumerate()
        .filter(|(_, bit)| *bit)
        .map(|(position, _)| {
            let sk = match substitute {
                Some((p, sk)) if p == position => sk,
                _ => chain.member_secret(period, position),
            };
            sign(sk, &message, domain)
        })
        .collect();
    if sigs.is_empty() {
        empty_signature()
    } else {
        aggregate_signatures(&sigs).expect("freshly produced signatures decode")
    }
}
