use thiserror::Error;

/// Reasons the relay refuses a snapshot or an update. Each variant names the
/// first check that failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelayError {
    #[error("finalized slot {finalized} must exceed current slot {current} and not exceed latest slot {latest}")]
    NonMonotonic {
        current: u64,
        finalized: u64,
        latest: u64,
    },
    #[error("latest header is in period {latest}, relay is in period {current}")]
    PeriodGap { current: u64, latest: u64 },
    #[error("only {count} of {size} committee members participated")]
    InsufficientParticipation { count: u64, size: u64 },
    #[error("aggregate signature does not verify")]
    SignatureInvalid,
    #[error("finalized header is not proven final by the latest header")]
    FinalityProofInvalid,
    #[error("next committee is not proven by the finalized state")]
    CommitteeProofInvalid,
    #[error("committee mismatch: {0}")]
    CommitteeMismatch(String),
    #[error("period transition requires the next committee and its proof")]
    MissingNextCommittee,
    #[error("state does not hash to the header's state_root")]
    StateRootMismatch,
    #[error("latest slot {latest} is beyond the trusting window of {window} slots from {current}")]
    Expired {
        current: u64,
        latest: u64,
        window: u64,
    },
    #[error("malformed update: {0}")]
    MalformedUpdate(String),
    #[error("invalid relay config: {0}")]
    InvalidConfig(String),
}

impl RelayError {
    /// Stable identifier used in CLI output and test traces.
    pub fn name(&self) -> &'static str {
        match self {
            RelayError::NonMonotonic { .. } => "NonMonotonic",
            RelayError::PeriodGap { .. } => "PeriodGap",
            RelayError::InsufficientParticipation { .. } => "InsufficientParticipation",
            RelayError::SignatureInvalid => "SignatureInvalid",
            RelayError::FinalityProofInvalid => "FinalityProofInvalid",
            RelayError::CommitteeProofInvalid => "CommitteeProofInvalid",
            RelayError::CommitteeMismatch(_) => "CommitteeMismatch",
            RelayError::MissingNextCommittee => "MissingNextCommittee",
            RelayError::StateRootMismatch => "StateRootMismatch",
            RelayError::Expired { .. } => "Expired",
            RelayError::MalformedUpdate(_) => "MalformedUpdate",
            RelayError::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// Errors caused by a structurally broken input rather than a failed
    /// verification.
    pub fn is_malformed_input(&self) -> bool {
        matches!(
            self,
            RelayError::MalformedUpdate(_) | RelayError::InvalidConfig(_)
        )
    }
}
