//! The relay state machine: trusted header, committee material and the
//! update transition.

mod config;
mod error;
mod state;
mod types;
mod update;

pub use config::{compute_period, meets_threshold, RelayConfig, DEFAULT_DOMAIN};
pub use error::RelayError;
pub use state::{initialize, CommitteeStore, RelayState, StorageMode};
pub use types::{
    participation_count, BeaconBlockHeader, ParticipationBits, RelayUpdate, SimBeaconState,
    Snapshot, SyncCommittee, HEADER_BYTES, STATE_BYTES,
};
pub use update::{
    apply_update, select_signing_committee, verify_finality_link, CommitteeRole,
    COMMITTEE_REF_WORDS, HEADER_WORDS,
};
