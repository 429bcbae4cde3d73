//! Self-contained end-to-end runs: build a chain, anchor relays in both
//! storage modes, feed them honest and tampered updates and record every
//! check as a pass/fail line.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::cost::{committee_key_words, CostMeter};
use crate::relay::{
    apply_update, initialize, meets_threshold, CommitteeStore, RelayConfig, RelayState,
    RelayUpdate, StorageMode,
};
use crate::sim::{
    admissible_latest_slots, build_chain, craft_update, craft_update_at, snapshot, tamper,
    SimChain, SimError, TamperKind, Tampering, UpdateCase,
};

pub const SCENARIOS: [&str; 6] = [
    "case1",
    "case2",
    "case3",
    "stall",
    "adversarial",
    "liveness",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioParams {
    pub seed: u64,
    pub committee_size: u64,
    pub slots_per_epoch: u64,
    pub epochs_per_period: u64,
    pub validators: usize,
    /// Randomized trials per tampering kind in `adversarial`.
    pub trials: usize,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            seed: 7,
            committee_size: 32,
            slots_per_epoch: 4,
            epochs_per_period: 4,
            validators: 64,
            trials: 3,
        }
    }
}

impl ScenarioParams {
    pub fn config(&self) -> RelayConfig {
        RelayConfig::scaled(
            self.committee_size,
            self.slots_per_epoch,
            self.epochs_per_period,
        )
    }

    pub fn chain(&self, periods: u64) -> Result<SimChain, SimError> {
        build_chain(self.seed, self.config(), periods, self.validators)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

/// Meters for the same update applied in both storage modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModeCosts {
    pub store: CostMeter,
    pub no_store: CostMeter,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub costs: Option<ModeCosts>,
}

impl ScenarioReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            checks: Vec::new(),
            costs: None,
        }
    }

    fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn expect_eq<T: PartialEq + fmt::Debug>(&mut self, label: impl Into<String>, got: T, want: T) {
        let passed = got == want;
        let detail = if passed {
            String::new()
        } else {
            format!("got {got:?}, want {want:?}")
        };
        self.check(label, passed, detail);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn pass_count(&self) -> usize {
        self.checks.iter().filter(|c| c.passed).count()
    }
}

impl fmt::Display for ScenarioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            if c.passed {
                writeln!(f, "PASS {}", c.label)?;
            } else {
                writeln!(f, "FAIL {}: {}", c.label, c.detail)?;
            }
        }
        if let Some(costs) = &self.costs {
            writeln!(f, "costs store:    {}", costs.store)?;
            writeln!(f, "costs no-store: {}", costs.no_store)?;
        }
        write!(
            f,
            "scenario {}: {}/{} checks passed",
            self.name,
            self.pass_count(),
            self.checks.len()
        )
    }
}

fn outcome(result: &Result<RelayState, crate::relay::RelayError>) -> &'static str {
    match result {
        Ok(_) => "accepted",
        Err(e) => e.name(),
    }
}

/// Relays in both modes anchored at `slot`.
pub fn relays_at(chain: &SimChain, slot: u64) -> Result<(RelayState, RelayState), SimError> {
    let snap = snapshot(chain, slot)?;
    let init = |mode| {
        initialize(&snap, mode, chain.config.clone())
            .map_err(|e| SimError::InvalidParameters(format!("snapshot rejected: {e}")))
    };
    Ok((init(StorageMode::Store)?, init(StorageMode::NoStore)?))
}

pub fn run(name: &str, params: &ScenarioParams) -> Result<ScenarioReport, SimError> {
    match name {
        "case1" => three_case(params, UpdateCase::SamePeriod),
        "case2" => three_case(params, UpdateCase::LatestInNext),
        "case3" => three_case(params, UpdateCase::Transition),
        "stall" => stall(params),
        "adversarial" => adversarial(params),
        "liveness" => liveness(params, 5),
        other => Err(SimError::InvalidParameters(format!(
            "unknown scenario {other:?}; expected one of {SCENARIOS:?}"
        ))),
    }
}

/// One honest update of `case` from genesis on a three-period chain.
pub fn three_case(params: &ScenarioParams, case: UpdateCase) -> Result<ScenarioReport, SimError> {
    let chain = params.chain(3)?;
    let mut report = ScenarioReport::new(&format!("case{}", case.id()));
    let (store, no_store) = relays_at(&chain, 0)?;
    let update = craft_update(&chain, case.id(), 0, params.committee_size as usize)?;

    report.expect_eq(
        "finalized header period",
        chain.period_of(update.finalized_header.slot),
        if case == UpdateCase::Transition { 1 } else { 0 },
    );
    report.expect_eq(
        "latest header period",
        chain.period_of(update.latest_header.slot),
        if case == UpdateCase::SamePeriod { 0 } else { 1 },
    );

    let mut costs = ModeCosts {
        store: CostMeter::new(),
        no_store: CostMeter::new(),
    };
    let after_store = apply_update(&store, &update.without_resubmission(), &mut costs.store);
    let after_no_store = apply_update(&no_store, &update, &mut costs.no_store);
    report.expect_eq("store mode accepts", outcome(&after_store), "accepted");
    report.expect_eq(
        "no-store mode accepts",
        outcome(&after_no_store),
        "accepted",
    );

    let (Ok(after_store), Ok(after_no_store)) = (after_store, after_no_store) else {
        return Ok(report);
    };
    report.expect_eq(
        "current header is the finalized header",
        &after_store.current_header,
        &update.finalized_header,
    );
    report.check(
        "latest header is not installed",
        after_store.current_header != update.latest_header
            || update.latest_header == update.finalized_header,
        "",
    );

    let (want_trusted, want_next) = match case {
        UpdateCase::Transition => (chain.committee(1).root, chain.committee(2).root),
        _ => (chain.committee(0).root, chain.committee(1).root),
    };
    for (mode, state) in [("store", &after_store), ("no-store", &after_no_store)] {
        let (trusted, next) = state.committees.roots();
        let verb = if case == UpdateCase::Transition {
            "rotated"
        } else {
            "unchanged"
        };
        report.expect_eq(
            format!("{mode}: trusted committee {verb}"),
            trusted,
            want_trusted,
        );
        report.expect_eq(
            format!("{mode}: trusted-next committee {verb}"),
            next,
            want_next,
        );
    }

    report.expect_eq("pairing checks per update", costs.store.pairing_checks, 1);
    let delta =
        costs.store.storage_words_written as i64 - costs.no_store.storage_words_written as i64;
    let want_delta = if case == UpdateCase::Transition {
        committee_key_words(params.committee_size) as i64
    } else {
        0
    };
    report.expect_eq("store vs no-store words written delta", delta, want_delta);
    report.costs = Some(costs);
    Ok(report)
}

/// A relay that misses a whole period cannot advance; one that does not is
/// unaffected.
pub fn stall(params: &ScenarioParams) -> Result<ScenarioReport, SimError> {
    let chain = params.chain(3)?;
    let mut report = ScenarioReport::new("stall");
    let (store, no_store) = relays_at(&chain, 0)?;
    let participation = params.committee_size as usize;

    // Latest header two periods ahead of the relay.
    let gap_slot = chain.period_start(2) + params.slots_per_epoch * 3;
    let gap = craft_update_at(&chain, 0, gap_slot, participation)?;
    for (mode, state, update) in [
        ("store", &store, gap.without_resubmission()),
        ("no-store", &no_store, gap.clone()),
    ] {
        let before = state.to_canonical_json();
        let result = apply_update(state, &update, &mut CostMeter::new());
        report.expect_eq(
            format!("{mode}: two-period jump rejected"),
            outcome(&result),
            "PeriodGap",
        );
        report.expect_eq(
            format!("{mode}: state unchanged"),
            state.to_canonical_json(),
            before,
        );
    }

    let within = craft_update(&chain, UpdateCase::Transition.id(), 0, participation)?;
    let result = apply_update(
        &store,
        &within.without_resubmission(),
        &mut CostMeter::new(),
    );
    report.expect_eq(
        "update within one period accepted",
        outcome(&result),
        "accepted",
    );
    Ok(report)
}

/// One transition update per period for `periods` consecutive periods.
pub fn liveness(params: &ScenarioParams, periods: u64) -> Result<ScenarioReport, SimError> {
    let chain = params.chain(periods + 1)?;
    let mut report = ScenarioReport::new("liveness");
    let (mut store, mut no_store) = relays_at(&chain, 0)?;
    let participation = params.committee_size as usize;

    for step in 1..=periods {
        let anchor = store.current_header.slot;
        let update = craft_update(&chain, UpdateCase::Transition.id(), anchor, participation)?;
        let a = store.try_apply(&update.without_resubmission(), &mut CostMeter::new());
        let b = no_store.try_apply(&update, &mut CostMeter::new());
        report.expect_eq(
            format!("period {step}: store accepts"),
            a.map_err(|e| e.name()),
            Ok(()),
        );
        report.expect_eq(
            format!("period {step}: no-store accepts"),
            b.map_err(|e| e.name()),
            Ok(()),
        );
        report.expect_eq(format!("period {step}: relay period"), store.period(), step);
        report.expect_eq(
            format!("period {step}: committees follow the chain"),
            store.committees.roots(),
            (chain.committee(step).root, chain.committee(step + 1).root),
        );
    }
    report.expect_eq(
        "modes agree on the final header",
        &store.current_header,
        &no_store.current_header,
    );
    Ok(report)
}

/// Random honest update from `anchor`, or `None` if no case is realizable.
/// `only_transition` restricts the choice to case-3 updates.
pub fn random_honest_update<R: Rng>(
    chain: &SimChain,
    anchor: u64,
    only_transition: bool,
    rng: &mut R,
) -> Result<Option<RelayUpdate>, SimError> {
    let cases: &[UpdateCase] = if only_transition {
        &[UpdateCase::Transition]
    } else {
        &UpdateCase::ALL
    };
    let mut candidates: Vec<u64> = cases
        .iter()
        .flat_map(|&case| admissible_latest_slots(chain, case, anchor))
        .collect();
    candidates.sort_unstable();
    let Some(&latest) = candidates.choose(rng) else {
        return Ok(None);
    };
    let size = chain.config.committee_size;
    let min = (0..=size)
        .find(|&n| meets_threshold(n, &chain.config))
        .expect("full participation meets the threshold");
    let participation = rng.gen_range(min..=size) as usize;
    craft_update_at(chain, anchor, latest, participation).map(Some)
}

/// Result of one randomized tampering trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub kind: TamperKind,
    pub honest: [&'static str; 2],
    pub tampered: [&'static str; 2],
    pub state_preserved: bool,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.honest == ["accepted"; 2]
            && self.tampered == [self.kind.expected_error(); 2]
            && self.state_preserved
    }
}

/// Tampers a random honest update with `kind` and applies both versions to
/// fresh relays in both modes. The chain should span at least four periods
/// so that every kind, including `SkipPeriod`, is applicable from anchors in
/// the first period.
pub fn tamper_trial<R: Rng>(
    chain: &SimChain,
    kind: TamperKind,
    rng: &mut R,
) -> Result<TrialOutcome, SimError> {
    let anchor_span = chain.config.slots_per_period();
    let (anchor, honest) = loop {
        let anchor = rng.gen_range(0..anchor_span);
        if let Some(update) = random_honest_update(chain, anchor, kind.needs_transition(), rng)? {
            break (anchor, update);
        }
    };
    let tampering = Tampering::random(kind, rng, &honest, chain.config.committee_size);
    let tampered = tamper(&honest, tampering, chain)?;
    let (store, no_store) = relays_at(chain, anchor)?;

    let mut honest_out = ["", ""];
    let mut tampered_out = ["", ""];
    let mut state_preserved = true;
    for (i, (mut state, strip)) in [(store, true), (no_store, false)].into_iter().enumerate() {
        let prepare = |u: &RelayUpdate| {
            if strip {
                u.without_resubmission()
            } else {
                u.clone()
            }
        };
        let before = state.to_canonical_json();
        let result = state.try_apply(&prepare(&tampered), &mut CostMeter::new());
        tampered_out[i] = result.map_or_else(|e| e.name(), |_| "accepted");
        state_preserved &= state.to_canonical_json() == before;
        honest_out[i] = outcome(&apply_update(
            &state,
            &prepare(&honest),
            &mut CostMeter::new(),
        ));
    }
    Ok(TrialOutcome {
        kind,
        honest: honest_out,
        tampered: tampered_out,
        state_preserved,
    })
}

pub fn adversarial(params: &ScenarioParams) -> Result<ScenarioReport, SimError> {
    use rand::SeedableRng;
    let chain = params.chain(4)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(params.seed);
    let mut report = ScenarioReport::new("adversarial");
    for kind in TamperKind::ALL {
        let mut failures = Vec::new();
        for _ in 0..params.trials {
            let trial = tamper_trial(&chain, kind, &mut rng)?;
            if !trial.passed() {
                failures.push(format!("{trial:?}"));
            }
        }
        report.check(
            format!(
                "{kind} rejected with {} ({} trials)",
                kind.expected_error(),
                params.trials
            ),
            failures.is_empty(),
            failures.join("; "),
        );
    }
    Ok(report)
}

/// Accept/reject trace of a random update sequence applied to relays in
/// both modes. Each step crafts a random honest update from the store-mode
/// relay's current header and tampers with it with probability one half.
pub fn mode_trace<R: Rng>(
    chain: &SimChain,
    steps: usize,
    rng: &mut R,
) -> Result<(Vec<&'static str>, Vec<&'static str>), SimError> {
    let (mut store, mut no_store) = relays_at(chain, 0)?;
    let mut store_trace = Vec::with_capacity(steps);
    let mut no_store_trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let anchor = store.current_header.slot;
        let Some(honest) = random_honest_update(chain, anchor, false, rng)? else {
            break;
        };
        let update = if rng.gen_bool(0.5) {
            let applicable: Vec<TamperKind> = TamperKind::ALL
                .into_iter()
                .filter(|k| !k.needs_transition() || honest.next_committee.is_some())
                .collect();
            let kind = *applicable.choose(rng).expect("non-empty");
            let tampering = Tampering::random(kind, rng, &honest, chain.config.committee_size);
            match tamper(&honest, tampering, chain) {
                Ok(t) => t,
                // Skips past the end of the chain are simply honest steps.
                Err(SimError::NotApplicable(_)) => honest,
                Err(e) => return Err(e),
            }
        } else {
            honest
        };
        let a = store.try_apply(&update.without_resubmission(), &mut CostMeter::new());
        let b = no_store.try_apply(&update, &mut CostMeter::new());
        store_trace.push(a.map_or_else(|e| e.name(), |_| "accepted"));
        no_store_trace.push(b.map_or_else(|e| e.name(), |_| "accepted"));
    }
    Ok((store_trace, no_store_trace))
}

/// Committee roots as stored, for reports.
pub fn describe_committees(store: &CommitteeStore) -> String {
    let (trusted, next) = store.roots();
    format!("trusted={trusted} trusted_next={next}")
}
