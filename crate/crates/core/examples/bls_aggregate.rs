//! Aggregate signatures from a small committee and check them with a single
//! pairing.
//!
//!     cargo run --example bls_aggregate

use pos_relay::bls_sig::{
    aggregate_pubkeys, aggregate_signatures, fast_aggregate_verify, keygen, sign, signing_root,
    PublicKey,
};
use pos_relay::relay::DEFAULT_DOMAIN;
use pos_relay::ssz_merkle::Digest;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let keys: Vec<_> = (1..=8u8).map(|i| keygen(&[i; 32])).collect();
    let message = Digest::from_u64(42);
    println!("signing root: {}", signing_root(&message, &DEFAULT_DOMAIN));

    // Six of eight members sign.
    let signers = &keys[..6];
    let shares: Vec<_> = signers
        .iter()
        .map(|(sk, _)| sign(sk, &message, &DEFAULT_DOMAIN))
        .collect();
    let aggregate = aggregate_signatures(&shares)?;
    let pubkeys: Vec<&PublicKey> = signers.iter().map(|(_, pk)| pk).collect();
    println!("aggregate signature: {}", aggregate.to_hex());
    println!(
        "aggregate key: {}",
        aggregate_pubkeys(&signers.iter().map(|(_, pk)| pk.clone()).collect::<Vec<_>>())?.to_hex()
    );
    println!(
        "6 signers verify: {}",
        fast_aggregate_verify(&pubkeys, &message, &DEFAULT_DOMAIN, &aggregate)?
    );

    // Claiming a member who did not sign breaks the check.
    let mut claimed = pubkeys.clone();
    claimed.push(&keys[6].1);
    println!(
        "7 claimed signers verify: {}",
        fast_aggregate_verify(&claimed, &message, &DEFAULT_DOMAIN, &aggregate)?
    );
    Ok(())
}
