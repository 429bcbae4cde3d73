//! One update per period keeps the relay live; missing a whole period
//! stalls it for good.
//!
//!     cargo run --example liveness

use pos_relay::cost::CostMeter;
use pos_relay::relay::RelayError;
use pos_relay::scenario::{relays_at, ScenarioParams};
use pos_relay::sim::{craft_update, craft_update_at};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ScenarioParams::default();
    let chain = params.chain(6)?;
    let (mut relay, _) = relays_at(&chain, 0)?;

    for _ in 0..5 {
        let update = craft_update(&chain, 3, relay.current_header.slot, 32)?;
        relay.try_apply(&update.without_resubmission(), &mut CostMeter::new())?;
        println!(
            "period {}: relay at slot {}",
            relay.period(),
            relay.current_header.slot
        );
    }

    // Restart from genesis and wait two periods before relaying.
    let (stale, _) = relays_at(&chain, 0)?;
    let late = chain.period_start(2) + 3 * params.slots_per_epoch;
    let update = craft_update_at(&chain, 0, late, 32)?.without_resubmission();
    match stale.clone().try_apply(&update, &mut CostMeter::new()) {
        Err(e @ RelayError::PeriodGap { .. }) => println!("after a skipped period: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
