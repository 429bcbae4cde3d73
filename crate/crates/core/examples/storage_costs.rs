//! Committee storage bound and a per-update gas comparison between a relay
//! that stores committee keys and one that only stores their roots.
//!
//!     cargo run --example storage_costs

use pos_relay::cost::{committee_key_words, report_committee_storage_cost, CostModel};
use pos_relay::scenario::{three_case, ScenarioParams};
use pos_relay::sim::UpdateCase;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = CostModel::default();
    for size in [32, 128, 512] {
        println!(
            "committee of {size:>3}: {:>4} words, {:>9} gas to store",
            committee_key_words(size),
            report_committee_storage_cost(size, &model)
        );
    }

    let params = ScenarioParams::default();
    for case in UpdateCase::ALL {
        let report = three_case(&params, case)?;
        let costs = report.costs.expect("three-case reports carry costs");
        let store = model.gas(&costs.store);
        let no_store = model.gas(&costs.no_store);
        println!(
            "case {} with {} keys: store {:>8} gas, no-store {:>8} gas",
            case.id(),
            params.committee_size,
            store.total,
            no_store.total
        );
    }
    Ok(())
}
