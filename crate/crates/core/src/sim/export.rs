//! On-disk chain layout:
//!
//! ```text
//! <dir>/chain.json             config and every slot's header and state
//! <dir>/committees/<p>.json    public keys of the committee for period p
//! <dir>/secrets.json           chain seed and validator seeds
//! ```
//!
//! Secret scalars are never written; they are re-derived from the seeds.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{SimChain, SimError};
use crate::encoding;
use crate::relay::{
    compute_period, BeaconBlockHeader, RelayConfig, SimBeaconState, Snapshot, SyncCommittee,
};
use crate::ssz_merkle::Digest;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub header: BeaconBlockHeader,
    pub state: SimBeaconState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub seed: u64,
    pub num_periods: u64,
    pub validator_count: usize,
    pub config: RelayConfig,
    pub slots: Vec<SlotRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitteeFile {
    pub period: u64,
    pub root: Digest,
    pub validator_indices: Vec<usize>,
    #[serde(flatten)]
    pub committee: SyncCommittee,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretsFile {
    pub chain_seed: u64,
    pub validator_seeds: Vec<String>,
}

/// A chain read back from disk: enough to build snapshots, not to sign.
#[derive(Debug, Clone)]
pub struct ChainExport {
    pub chain: ChainFile,
    pub committees: Vec<SyncCommittee>,
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

fn write(path: &Path, contents: String) -> Result<(), SimError> {
    fs::write(path, contents).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, SimError> {
    let text =
        fs::read_to_string(path).map_err(|e| SimError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| SimError::Format(format!("{}: {e}", path.display())))
}

impl SimChain {
    pub fn to_chain_file(&self) -> ChainFile {
        ChainFile {
            seed: self.seed,
            num_periods: self.num_periods,
            validator_count: self.validators.len(),
            config: self.config.clone(),
            slots: self
                .slots
                .iter()
                .map(|s| SlotRecord {
                    header: s.header.clone(),
                    state: s.state.clone(),
                })
                .collect(),
        }
    }

    pub fn export(&self, dir: &Path) -> Result<(), SimError> {
        let committees_dir = dir.join("committees");
        fs::create_dir_all(&committees_dir)
            .map_err(|e| SimError::Io(format!("{}: {e}", committees_dir.display())))?;
        write(&dir.join("chain.json"), to_json(&self.to_chain_file()))?;
        for (period, pc) in self.committees.iter().enumerate() {
            let file = CommitteeFile {
                period: period as u64,
                root: pc.root,
                validator_indices: pc.indices.clone(),
                committee: pc.committee.clone(),
            };
            write(
                &committees_dir.join(format!("{period}.json")),
                to_json(&file),
            )?;
        }
        let secrets = SecretsFile {
            chain_seed: self.seed,
            validator_seeds: self
                .validators
                .iter()
                .map(|v| encoding::to_hex(&v.seed))
                .collect(),
        };
        write(&dir.join("secrets.json"), to_json(&secrets))
    }
}

impl ChainExport {
    pub fn load(dir: &Path) -> Result<Self, SimError> {
        let chain: ChainFile = read(&dir.join("chain.json"))?;
        let committees = (0..=chain.num_periods)
            .map(|p| {
                let file: CommitteeFile = read(&dir.join("committees").join(format!("{p}.json")))?;
                if file.period != p {
                    return Err(SimError::Format(format!(
                        "committees/{p}.json declares period {}",
                        file.period
                    )));
                }
                Ok(file.committee)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { chain, committees })
    }

    /// Snapshot at `slot` as recorded on disk. Nothing is checked here; the
    /// relay's initialization does that.
    pub fn snapshot(&self, slot: u64) -> Result<Snapshot, SimError> {
        let record = self
            .chain
            .slots
            .get(slot as usize)
            .ok_or(SimError::SlotOutOfRange {
                slot,
                len: self.chain.slots.len() as u64,
            })?;
        let period = compute_period(slot, &self.chain.config) as usize;
        let committee = |p: usize| {
            self.committees
                .get(p)
                .cloned()
                .ok_or_else(|| SimError::Format(format!("missing committee for period {p}")))
        };
        Ok(Snapshot {
            header: record.header.clone(),
            state: record.state.clone(),
            current_committee: committee(period)?,
            next_committee: committee(period + 1)?,
        })
    }
}
