//! BLS signatures on BLS12-381 in the minimal-pubkey-size variant: 48-byte
//! G1 public keys, 96-byte G2 signatures, hash-to-curve with the proof of
//! possession ciphersuite used by the beacon chain.
//!
//! Messages are 32-byte roots. Before hashing to the curve a root is bound to
//! a 32-byte domain tag as `hash_node(root, domain)`.

use std::fmt;

use blst::min_pk;
use blst::BLST_ERROR;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::encoding;
use crate::ssz_merkle::{hash_node, Digest};

pub const PUBLIC_KEY_LEN: usize = 48;
pub const SIGNATURE_LEN: usize = 96;

const DST: &[u8] = b"BLS_SIG_BLS12381G2_XMD:SHA-256_SSWU_RO_POP_";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlsError {
    #[error("empty input")]
    EmptyInput,
    #[error("invalid public key: {0}")]
    InvalidKey(String),
    #[error("malformed signature: {0}")]
    MalformedSignature(String),
}

/// 32-byte domain tag mixed into every signed root.
pub type Domain = [u8; 32];

/// Root that is actually hashed to the curve.
pub fn signing_root(message: &Digest, domain: &Domain) -> Digest {
    hash_node(message, &Digest(*domain))
}

#[derive(Clone)]
pub struct SecretKey(min_pk::SecretKey);

impl SecretKey {
    pub fn public_key(&self) -> PublicKey {
        let point = self.0.sk_to_pk();
        PublicKey {
            bytes: point.compress(),
            point,
        }
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        self.0.to_bytes()
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKey(..)")
    }
}

/// A validated, non-identity G1 point together with its compressed bytes.
#[derive(Clone)]
pub struct PublicKey {
    bytes: [u8; PUBLIC_KEY_LEN],
    point: min_pk::PublicKey,
}

impl PublicKey {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BlsError> {
        let point = min_pk::PublicKey::key_validate(bytes)
            .map_err(|e| BlsError::InvalidKey(format!("{e:?}")))?;
        let bytes = bytes
            .try_into()
            .map_err(|_| BlsError::InvalidKey(format!("expected 48 bytes, got {}", bytes.len())))?;
        Ok(Self { bytes, point })
    }

    pub fn as_bytes(&self) -> &[u8; PUBLIC_KEY_LEN] {
        &self.bytes
    }

    pub fn to_hex(&self) -> String {
        encoding::to_hex(&self.bytes)
    }
}

impl PartialEq for PublicKey {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes
    }
}

impl Eq for PublicKey {}

impl fmt::Debug for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PublicKey({})", self.to_hex())
    }
}

impl Serialize for PublicKey {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for PublicKey {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let bytes = encoding::from_hex(&s).map_err(serde::de::Error::custom)?;
        PublicKey::from_bytes(&bytes).map_err(serde::de::Error::custom)
    }
}

/// Compressed G2 signature bytes. Decoding and subgroup checks happen at
/// verification time so that a corrupted signature can still be carried in
/// an update and rejected by the relay.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Signature(pub [u8; SIGNATURE_LEN]);

impl Signature {
    pub fn to_hex(&self) -> String {
        encoding::to_hex(&self.0)
    }

    fn decode(&self) -> Result<min_pk::Signature, BlsError> {
        min_pk::Signature::sig_validate(&self.0, false)
            .map_err(|e| BlsError::MalformedSignature(format!("{e:?}")))
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature({})", self.to_hex())
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        encoding::fixed_hex::serialize(&self.0, serializer)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        encoding::fixed_hex::deserialize(deserializer).map(Signature)
    }
}

/// Deterministic key derivation (IETF KeyGen, HKDF-based, never zero).
pub fn keygen(seed: &[u8; 32]) -> (SecretKey, PublicKey) {
    let sk = min_pk::SecretKey::key_gen(seed, &[]).expect("32-byte ikm is always accepted");
    let sk = SecretKey(sk);
    let pk = sk.public_key();
    (sk, pk)
}

pub fn sign(sk: &SecretKey, message: &Digest, domain: &Domain) -> Signature {
    let root = signing_root(message, domain);
    Signature(sk.0.sign(root.as_bytes(), DST, &[]).compress())
}

pub fn aggregate_signatures(sigs: &[Signature]) -> Result<Signature, BlsError> {
    if sigs.is_empty() {
        return Err(BlsError::EmptyInput);
    }
    let decoded = sigs
        .iter()
        .map(Signature::decode)
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&min_pk::Signature> = decoded.iter().collect();
    let agg = min_pk::AggregateSignature::aggregate(&refs, false)
        .map_err(|e| BlsError::MalformedSignature(format!("{e:?}")))?;
    Ok(Signature(agg.to_signature().compress()))
}

/// Group sum of the keys. The result may be the identity point (for example
/// `pk + (-pk)`), so it is returned as a raw point rather than a
/// [`PublicKey`] whenever that can happen.
fn aggregate_points(pks: &[&PublicKey]) -> Result<min_pk::PublicKey, BlsError> {
    if pks.is_empty() {
        return Err(BlsError::EmptyInput);
    }
    let points: Vec<&min_pk::PublicKey> = pks.iter().map(|pk| &pk.point).collect();
    // Inputs were validated on construction.
    min_pk::AggregatePublicKey::aggregate(&points, false)
        .map(|agg| agg.to_public_key())
        .map_err(|e| BlsError::InvalidKey(format!("{e:?}")))
}

pub fn aggregate_pubkeys(pks: &[PublicKey]) -> Result<PublicKey, BlsError> {
    let refs: Vec<&PublicKey> = pks.iter().collect();
    let point = aggregate_points(&refs)?;
    PublicKey::from_bytes(&point.compress())
}

/// Verifies one signature on `message` by all of `pks`, using a single
/// pairing check against the aggregated key.
pub fn fast_aggregate_verify(
    pks: &[&PublicKey],
    message: &Digest,
    domain: &Domain,
    sig: &Signature,
) -> Result<bool, BlsError> {
    let agg_pk = aggregate_points(pks)?;
    let sig = sig.decode()?;
    let root = signing_root(message, domain);
    Ok(sig.verify(false, root.as_bytes(), DST, &[], &agg_pk, false) == BLST_ERROR::BLST_SUCCESS)
}
