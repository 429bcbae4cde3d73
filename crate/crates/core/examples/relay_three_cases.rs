//! Drive a relay through the three period patterns an update can take:
//! same period, latest header in the next period, and a full committee
//! transition.
//!
//!     cargo run --example relay_three_cases

use pos_relay::cost::CostMeter;
use pos_relay::relay::{apply_update, initialize, RelayConfig, StorageMode};
use pos_relay::sim::{build_chain, craft_update, snapshot, UpdateCase};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = RelayConfig::scaled(32, 4, 4);
    let chain = build_chain(7, config.clone(), 3, 64)?;
    println!(
        "chain: {} slots, {} slots per period",
        chain.slot_count(),
        config.slots_per_period()
    );

    for mode in [StorageMode::Store, StorageMode::NoStore] {
        println!("\n{mode} mode");
        for case in UpdateCase::ALL {
            let state = initialize(&snapshot(&chain, 0)?, mode, config.clone())?;
            let mut update = craft_update(&chain, case.id(), 0, 32)?;
            if mode == StorageMode::Store {
                update = update.without_resubmission();
            }
            let mut meter = CostMeter::new();
            let next = apply_update(&state, &update, &mut meter)?;
            let rotated = next.committees.roots() != state.committees.roots();
            println!(
                "  case {}: finalized {:>2} latest {:>2} -> header at slot {:>2}, rotated: {rotated:<5} | {meter}",
                case.id(),
                update.finalized_header.slot,
                update.latest_header.slot,
                next.current_header.slot,
            );
        }
    }
    Ok(())
}
