//! A proof-of-stake chain relay.
//!
//! The relay tracks a source chain by accepting only finalized block headers.
//! Each update is authenticated by an aggregate BLS signature of the chain's
//! sync committee over a later header, plus SSZ Merkle proofs linking that
//! header to the finalized one and, at period boundaries, to the next
//! committee.
//!
//! * [`ssz_merkle`]: merkleization, branches and generalized indices.
//! * [`bls_sig`]: BLS12-381 keys, signatures and aggregation.
//! * [`relay`]: relay state, initialization and the update transition.
//! * [`sim`]: a deterministic beacon-chain simulator producing honest and
//!   tampered updates.
//! * [`cost`]: operation counters and a gas model.
//! * [`scenario`] and [`cli`]: end-to-end scenarios and the `pos-relay`
//!   command line.

pub mod bls_sig;
pub mod cli;
pub mod cost;
pub mod encoding;
pub mod relay;
pub mod scenario;
pub mod sim;
pub mod ssz_merkle;

pub use cost::{CostMeter, CostModel};
pub use relay::{apply_update, initialize, RelayConfig, RelayError, RelayState, RelayUpdate};
pub use ssz_merkle::{Digest, MerkleBranch};
