//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use pos_relay::cost::{report_committee_storage_cost, CostMeter, CostModel};
use pos_relay::relay::{
    apply_update, initialize, RelayConfig, RelayError, RelayState, StorageMode,
};
use pos_relay::scenario::{self, mode_trace, tamper_trial, ScenarioParams};
use pos_relay::sim::{build_chain, craft_update, snapshot, SimChain, TamperKind, UpdateCase};
use pos_relay::ssz_merkle::{branch_for, merkleize, verify_branch, Digest};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(took)
}

fn relay(chain: &SimChain, slot: u64, mode: StorageMode) -> Result<RelayState, String> {
    let snap = snapshot(chain, slot).map_err(|e| e.to_string())?;
    initialize(&snap, mode, chain.config.clone()).map_err(|e| e.to_string())
}

fn storage_bound() -> Outcome {
    let start = Instant::now();
    let gas = report_committee_storage_cost(512, &CostModel::default());
    let took = within(start, Duration::from_millis(1))?;
    ensure(gas == 3_840_000, || format!("got {gas}"))?;
    Ok(format!("{gas} gas in {took:?}"))
}

fn three_cases() -> Outcome {
    let start = Instant::now();
    let params = ScenarioParams::default();
    ensure(
        (
            params.committee_size,
            params.slots_per_epoch,
            params.epochs_per_period,
        ) == (32, 4, 4),
        || "unexpected scenario geometry".into(),
    )?;
    let mut summary = Vec::new();
    for case in UpdateCase::ALL {
        let report = scenario::three_case(&params, case).map_err(|e| e.to_string())?;
        ensure(report.passed(), || report.to_string())?;
        summary.push(format!(
            "case{} {}/{}",
            case.id(),
            report.pass_count(),
            report.checks.len()
        ));
    }
    let took = within(start, Duration::from_secs(10))?;
    Ok(format!("{} in {took:.2?}", summary.join(", ")))
}

fn adversarial() -> Outcome {
    const TRIALS: usize = 100;
    let start = Instant::now();
    let chain = ScenarioParams::default()
        .chain(4)
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xad);
    for kind in TamperKind::ALL {
        for trial in 0..TRIALS {
            let outcome = tamper_trial(&chain, kind, &mut rng).map_err(|e| e.to_string())?;
            ensure(outcome.passed(), || {
                format!("{kind} trial {trial}: {outcome:?}")
            })?;
        }
    }
    let took = within(start, Duration::from_secs(60))?;
    Ok(format!("7 kinds x {TRIALS} trials in {took:.2?}"))
}

fn threshold() -> Outcome {
    let chain =
        build_chain(64, RelayConfig::scaled(512, 2, 4), 1, 1024).map_err(|e| e.to_string())?;
    let state = relay(&chain, 0, StorageMode::Store)?;
    let apply = |n| {
        let update = craft_update(&chain, 1, 0, n).map_err(|e| e.to_string())?;
        Ok::<_, String>(apply_update(&state, &update, &mut CostMeter::new()))
    };
    let at_342 = apply(342)?;
    ensure(at_342.is_ok(), || format!("342 rejected: {at_342:?}"))?;
    let at_341 = apply(341)?;
    ensure(
        at_341
            == Err(RelayError::InsufficientParticipation {
                count: 341,
                size: 512,
            }),
        || format!("341 gave {at_341:?}"),
    )?;
    Ok("342/512 accepted, 341/512 InsufficientParticipation".into())
}

fn mode_equivalence() -> Outcome {
    const SEQUENCES: u64 = 50;
    let chain = ScenarioParams::default()
        .chain(4)
        .map_err(|e| e.to_string())?;
    let mut steps = 0;
    let mut rejections = 0;
    for seq in 0..SEQUENCES {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seq);
        let len = rng.gen_range(4..=10);
        let (store, no_store) = mode_trace(&chain, len, &mut rng).map_err(|e| e.to_string())?;
        ensure(store == no_store, || {
            format!("sequence {seq}: {store:?} vs {no_store:?}")
        })?;
        steps += store.len();
        rejections += store.iter().filter(|o| **o != "accepted").count();
    }
    ensure(rejections > 0 && rejections < steps, || {
        format!("{rejections} of {steps} steps rejected; sequences are not mixed")
    })?;
    Ok(format!(
        "{SEQUENCES} sequences, {steps} steps, {rejections} rejections, traces identical"
    ))
}

fn liveness_and_stall() -> Outcome {
    let params = ScenarioParams::default();
    let live = scenario::liveness(&params, 5).map_err(|e| e.to_string())?;
    ensure(live.passed(), || live.to_string())?;
    let stall = scenario::stall(&params).map_err(|e| e.to_string())?;
    ensure(stall.passed(), || stall.to_string())?;
    Ok(format!(
        "liveness {}/{}, stall {}/{}",
        live.pass_count(),
        live.checks.len(),
        stall.pass_count(),
        stall.checks.len()
    ))
}

fn merkle_oracle() -> Outcome {
    const INSTANCES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x3e);
    let mut mutations = 0;
    for instance in 0..INSTANCES {
        let limit = 1usize << rng.gen_range(0..=8);
        let raw: Vec<[u8; 32]> = (0..rng.gen_range(0..=limit)).map(|_| rng.gen()).collect();
        let chunks: Vec<Digest> = raw.iter().copied().map(Digest).collect();
        let root = merkleize(&chunks, limit).map_err(|e| e.to_string())?;
        ensure(root.0 == common::oracle_root(&raw, limit), || {
            format!("instance {instance}: root differs")
        })?;
        let index = rng.gen_range(0..limit);
        let branch = branch_for(&chunks, limit, index).map_err(|e| e.to_string())?;
        let expected = common::oracle_branch(&raw, limit, index);
        ensure(branch.nodes.iter().map(|d| d.0).eq(expected), || {
            format!("instance {instance}: branch differs")
        })?;
        let leaf = chunks.get(index).copied().unwrap_or(Digest::ZERO);
        ensure(verify_branch(&leaf, &branch, &root) == Ok(true), || {
            format!("instance {instance}: valid branch rejected")
        })?;
        for node in 0..branch.nodes.len() {
            let mut bad = branch.clone();
            bad.nodes[node].0[rng.gen_range(0..32)] ^= rng.gen_range(1..=255u8);
            mutations += 1;
            ensure(verify_branch(&leaf, &bad, &root) == Ok(false), || {
                format!("instance {instance}: mutated node {node} accepted")
            })?;
        }
    }
    Ok(format!(
        "{INSTANCES} instances, {mutations} mutated branches rejected"
    ))
}

fn full_constants() -> Outcome {
    let start = Instant::now();
    let config = RelayConfig::default();
    ensure(
        (
            config.committee_size,
            config.slots_per_epoch,
            config.epochs_per_period,
        ) == (512, 32, 256),
        || "default config is not the full-size geometry".into(),
    )?;
    let chain = build_chain(2024, config, 2, 1024).map_err(|e| e.to_string())?;
    let update = craft_update(&chain, 3, 0, 512).map_err(|e| e.to_string())?;
    let mut accepted = Vec::new();
    for mode in [StorageMode::Store, StorageMode::NoStore] {
        let state = relay(&chain, 0, mode)?;
        let update = match mode {
            StorageMode::Store => update.without_resubmission(),
            StorageMode::NoStore => update.clone(),
        };
        let mut meter = CostMeter::new();
        let next = apply_update(&state, &update, &mut meter).map_err(|e| format!("{mode}: {e}"))?;
        ensure(meter.pairing_checks == 1, || format!("{mode}: {meter}"))?;
        ensure(next.committees.roots().0 == chain.committee(1).root, || {
            format!("{mode}: committees did not rotate")
        })?;
        accepted.push(mode.to_string());
    }
    let took = within(start, Duration::from_secs(300))?;
    Ok(format!(
        "case-3 update at slot {} accepted ({}), 1 pairing check, {took:.2?}",
        update.latest_header.slot,
        accepted.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("storage bound", storage_bound),
        ("three-case coverage", three_cases),
        ("adversarial rejection", adversarial),
        ("threshold boundary", threshold),
        ("mode equivalence", mode_equivalence),
        ("liveness and stall", liveness_and_stall),
        ("merkle oracle equivalence", merkle_oracle),
        ("full-constant smoke test", full_constants),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
