//! Tamper with an honest transition update in every supported way and show
//! which check stops each one.
//!
//!     cargo run --example adversarial

use pos_relay::cost::CostMeter;
use pos_relay::relay::RelayConfig;
use pos_relay::scenario::relays_at;
use pos_relay::sim::{build_chain, craft_update, tamper, TamperKind, Tampering};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let chain = build_chain(3, RelayConfig::scaled(16, 4, 4), 4, 32)?;
    let honest = craft_update(&chain, 3, 0, 16)?;
    let (mut relay, _) = relays_at(&chain, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for kind in TamperKind::ALL {
        let tampering = Tampering::random(kind, &mut rng, &honest, 16);
        let bad = tamper(&honest, tampering, &chain)?.without_resubmission();
        let before = relay.to_canonical_json();
        let err = relay
            .try_apply(&bad, &mut CostMeter::new())
            .expect_err("tampered update accepted");
        assert_eq!(relay.to_canonical_json(), before);
        println!("{kind:<22} -> {:<26} {err}", err.name());
    }

    relay.try_apply(&honest.without_resubmission(), &mut CostMeter::new())?;
    println!(
        "honest update still accepted; relay at slot {}",
        relay.current_header.slot
    );
    Ok(())
}
