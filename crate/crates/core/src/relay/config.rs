use serde::{Deserialize, Serialize};

use crate::bls_sig::Domain;
use crate::encoding;

/// Chain timing, committee size and proof layout the relay is parameterised by.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelayConfig {
    pub slots_per_epoch: u64,
    pub epochs_per_period: u64,
    pub committee_size: u64,
    #[serde(with = "encoding::fixed_hex")]
    pub domain: Domain,
    pub finalized_root_gindex: u64,
    pub current_committee_gindex: u64,
    pub next_committee_gindex: u64,
    /// Reject updates whose latest header is more than this many slots past
    /// the trusted header. `None` disables the check.
    pub trusting_window: Option<u64>,
}

/// Domain tag used unless a config overrides it.
pub const DEFAULT_DOMAIN: Domain = {
    let mut d = [0u8; 32];
    d[0] = 0x07;
    d
};

impl Default for RelayConfig {
    fn default() -> Self {
        Self {
            slots_per_epoch: 32,
            epochs_per_period: 256,
            committee_size: 512,
            domain: DEFAULT_DOMAIN,
            finalized_root_gindex: 9,
            current_committee_gindex: 11,
            next_committee_gindex: 12,
            trusting_window: None,
        }
    }
}

impl RelayConfig {
    /// Small chain geometry used by tests and the scenarios.
    pub fn scaled(committee_size: u64, slots_per_epoch: u64, epochs_per_period: u64) -> Self {
        Self {
            slots_per_epoch,
            epochs_per_period,
            committee_size,
            ..Self::default()
        }
    }

    pub fn slots_per_period(&self) -> u64 {
        self.slots_per_epoch * self.epochs_per_period
    }

    pub fn epoch(&self, slot: u64) -> u64 {
        slot / self.slots_per_epoch
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.slots_per_epoch == 0 || self.epochs_per_period == 0 {
            return Err("slots_per_epoch and epochs_per_period must be positive".into());
        }
        if self.committee_size == 0 {
            return Err("committee_size must be positive".into());
        }
        let gindices = [
            self.finalized_root_gindex,
            self.current_committee_gindex,
            self.next_committee_gindex,
        ];
        if gindices.iter().any(|g| !(8..16).contains(g)) {
            return Err(format!(
                "state gindices must lie in 8..16, got {gindices:?}"
            ));
        }
        if gindices[0] == gindices[1] || gindices[0] == gindices[2] || gindices[1] == gindices[2] {
            return Err(format!("state gindices must be distinct, got {gindices:?}"));
        }
        Ok(())
    }
}

pub fn compute_period(slot: u64, config: &RelayConfig) -> u64 {
    slot / config.slots_per_period()
}

/// Two-thirds supermajority, `3 * count >= 2 * committee_size`.
pub fn meets_threshold(count: u64, config: &RelayConfig) -> bool {
    3 * count >= 2 * config.committee_size
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periods_with_default_geometry() {
        let cfg = RelayConfig::default();
        assert_eq!(cfg.slots_per_period(), 8192);
        assert_eq!(compute_period(0, &cfg), 0);
        assert_eq!(compute_period(8191, &cfg), 0);
        assert_eq!(compute_period(8192, &cfg), 1);
        assert_eq!(compute_period(20000, &cfg), 2);
    }

    #[test]
    fn threshold_boundaries() {
        let cfg = RelayConfig::default();
        assert!(meets_threshold(342, &cfg));
        assert!(!meets_threshold(341, &cfg));
        let small = RelayConfig::scaled(32, 4, 4);
        assert!(meets_threshold(22, &small));
        assert!(!meets_threshold(21, &small));
    }

    #[test]
    fn validation() {
        assert!(RelayConfig::default().validate().is_ok());
        for gindex in [9, 16] {
            let cfg = RelayConfig {
                next_committee_gindex: gindex,
                ..RelayConfig::default()
            };
            assert!(cfg.validate().is_err());
        }
        assert!(RelayConfig::scaled(8, 0, 4).validate().is_err());
    }
}
