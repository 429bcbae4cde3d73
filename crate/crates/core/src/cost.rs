//! Operation counters and an abstract gas model for relay updates.
//!
//! The model prices what a contract-hosted relay pays for: storage words
//! written and read, calldata bytes, SHA-256 invocations and pairing checks.
//! It does not try to replicate any particular virtual machine.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bls_sig::PUBLIC_KEY_LEN;

pub const WORD_BYTES: u64 = 32;

/// Storage words occupied by a committee's public keys, `ceil(48 n / 32)`.
pub fn committee_key_words(committee_size: u64) -> u64 {
    (committee_size * PUBLIC_KEY_LEN as u64).div_ceil(WORD_BYTES)
}

/// Counters for one relay operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostMeter {
    pub sha256_calls: u64,
    pub pairing_checks: u64,
    pub point_additions: u64,
    pub storage_words_written: u64,
    pub storage_words_read: u64,
    pub payload_bytes: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Adds another meter's counters to this one.
    pub fn absorb(&mut self, other: &CostMeter) {
        self.sha256_calls += other.sha256_calls;
        self.pairing_checks += other.pairing_checks;
        self.point_additions += other.point_additions;
        self.storage_words_written += other.storage_words_written;
        self.storage_words_read += other.storage_words_read;
        self.payload_bytes += other.payload_bytes;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub gas_per_word_write: u64,
    pub gas_per_word_read: u64,
    pub gas_per_payload_byte: u64,
    /// SHA-256 over one 64-byte node: 60 base + 12 per 32-byte word.
    pub gas_per_sha256: u64,
    /// One two-pair pairing check: 45,000 base + 34,000 per pair.
    pub gas_per_pairing: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self {
            gas_per_word_write: 5_000,
            gas_per_word_read: 600,
            gas_per_payload_byte: 16,
            gas_per_sha256: 84,
            gas_per_pairing: 113_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GasReport {
    pub storage_write: u64,
    pub storage_read: u64,
    pub payload: u64,
    pub hashing: u64,
    pub pairing: u64,
    pub total: u64,
}

impl CostModel {
    pub fn gas(&self, meter: &CostMeter) -> GasReport {
        let storage_write = meter.storage_words_written * self.gas_per_word_write;
        let storage_read = meter.storage_words_read * self.gas_per_word_read;
        let payload = meter.payload_bytes * self.gas_per_payload_byte;
        let hashing = meter.sha256_calls * self.gas_per_sha256;
        let pairing = meter.pairing_checks * self.gas_per_pairing;
        GasReport {
            storage_write,
            storage_read,
            payload,
            hashing,
            pairing,
            total: storage_write + storage_read + payload + hashing + pairing,
        }
    }
}

/// Lower bound for writing one committee's keys to storage.
pub fn report_committee_storage_cost(committee_size: u64, model: &CostModel) -> u64 {
    committee_key_words(committee_size) * model.gas_per_word_write
}

impl fmt::Display for CostMeter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sha256={} pairings={} point_adds={} words_written={} words_read={} payload_bytes={}",
            self.sha256_calls,
            self.pairing_checks,
            self.point_additions,
            self.storage_words_written,
            self.storage_words_read,
            self.payload_bytes
        )
    }
}
