//! Build a chain, write it to disk in the JSON layout the CLI reads, load it
//! back and anchor a root-only relay at one of its slots.
//!
//!     cargo run --example simulate_and_export -- /tmp/chain

use std::path::PathBuf;

use pos_relay::relay::{initialize, RelayConfig, StorageMode};
use pos_relay::sim::{build_chain, ChainExport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pos-relay-chain"));
    let chain = build_chain(7, RelayConfig::scaled(8, 4, 4), 2, 16)?;
    chain.export(&dir)?;
    println!("wrote {} slots to {}", chain.slot_count(), dir.display());

    let loaded = ChainExport::load(&dir)?;
    let slot = 20;
    let state = initialize(
        &loaded.snapshot(slot)?,
        StorageMode::NoStore,
        loaded.chain.config.clone(),
    )?;
    print!("{}", state.to_canonical_json());
    Ok(())
}
