//! `0x`-prefixed lowercase hex for fixed-size byte strings in JSON files.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub fn to_hex(bytes: &[u8]) -> String {
    format!("0x{}", hex::encode(bytes))
}

pub fn from_hex(s: &str) -> Result<Vec<u8>, String> {
    let body = s
        .strip_prefix("0x")
        .ok_or_else(|| format!("missing 0x prefix in {s:?}"))?;
    hex::decode(body).map_err(|e| format!("invalid hex: {e}"))
}

pub fn from_hex_fixed<const N: usize>(s: &str) -> Result<[u8; N], String> {
    let bytes = from_hex(s)?;
    let len = bytes.len();
    bytes
        .try_into()
        .map_err(|_| format!("expected {N} bytes, got {len}"))
}

/// Serde adapter for `[u8; N]` fields.
pub mod fixed_hex {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        bytes: &[u8; N],
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&to_hex(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        deserializer: D,
    ) -> Result<[u8; N], D::Error> {
        let s = String::deserialize(deserializer)?;
        from_hex_fixed(&s).map_err(D::Error::custom)
    }
}
