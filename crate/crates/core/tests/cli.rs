use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_pos-relay");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("POS_RELAY_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate(dir: &Path, seed: &str) -> Output {
    run(&[
        "simulate",
        "--seed",
        seed,
        "--periods",
        "3",
        "--committee-size",
        "8",
        "--out-dir",
        p(dir),
    ])
}

fn init(chain: &Path, mode: &str, out: &Path) -> Output {
    run(&[
        "init",
        "--chain-dir",
        p(chain),
        "--slot",
        "0",
        "--mode",
        mode,
        "--state-out",
        p(out),
    ])
}

fn update(state: &Path, update: &Path, out: &Path) -> Output {
    run(&[
        "update",
        "--state-in",
        p(state),
        "--update",
        p(update),
        "--state-out",
        p(out),
    ])
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push((
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                ));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn simulate_init_update_flow() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain");
    assert_eq!(code(&simulate(&chain, "7")), 0);
    for f in [
        "chain.json",
        "secrets.json",
        "committees/0.json",
        "committees/3.json",
        "updates/case3.json",
    ] {
        assert!(chain.join(f).exists(), "{f} missing");
    }

    for mode in ["store", "no-store"] {
        let state = dir.path().join(format!("{mode}.json"));
        assert_eq!(code(&init(&chain, mode, &state)), 0);
        let snapshot = tree(dir.path());

        let next = dir.path().join(format!("{mode}-next.json"));
        let out = update(&state, &chain.join("updates/case3.json"), &next);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("pairings=1"));
        let gas: serde_json::Value = serde_json::from_str(
            stdout(&out)
                .lines()
                .find_map(|l| l.strip_prefix("gas: "))
                .unwrap(),
        )
        .unwrap();
        assert!(gas["total"].as_u64().unwrap() > 113_000);

        // Inputs are left as they were.
        let after: Vec<_> = tree(dir.path())
            .into_iter()
            .filter(|(f, _)| !f.ends_with(format!("{mode}-next.json")))
            .collect();
        assert_eq!(after, snapshot);

        let rejected = dir.path().join(format!("{mode}-rejected.json"));
        let out = update(
            &state,
            &chain.join("updates/case1-bad-signature.json"),
            &rejected,
        );
        assert_eq!(code(&out), 1);
        assert!(stdout(&out).contains("rejected: SignatureInvalid"));
        assert!(!rejected.exists());
    }
}

#[test]
fn no_store_state_holds_two_roots() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(dir.path(), "3")), 0);
    let state = dir.path().join("state.json");
    assert_eq!(code(&init(dir.path(), "no-store", &state)), 0);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&state).unwrap()).unwrap();
    let committees = json["committees"].as_object().unwrap();
    let roots: Vec<&str> = committees
        .iter()
        .filter(|(k, _)| *k != "mode")
        .map(|(_, v)| v.as_str().unwrap())
        .collect();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| r.len() == 66 && r.starts_with("0x")));
    assert!(!fs::read_to_string(&state).unwrap().contains("pubkeys"));
}

#[test]
fn simulate_is_reproducible_and_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    assert_eq!(code(&simulate(&a, "5")), 0);
    assert_eq!(code(&simulate(&b, "5")), 0);
    assert_eq!(code(&simulate(&c, "6")), 0);
    assert_eq!(tree(&a), tree(&b));
    assert_ne!(tree(&a), tree(&c));

    // The environment variable wins over the flag.
    let d = dir.path().join("d");
    let out = Command::new(BIN)
        .args([
            "simulate",
            "--seed",
            "6",
            "--periods",
            "3",
            "--committee-size",
            "8",
            "--out-dir",
            p(&d),
        ])
        .env("POS_RELAY_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(tree(&a), tree(&d));

    let out = Command::new(BIN)
        .args(["simulate", "--out-dir", p(&dir.path().join("e"))])
        .env("POS_RELAY_SEED", "seven")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn corrupted_chain_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(dir.path(), "7")), 0);
    let path = dir.path().join("chain.json");
    let mut chain: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    chain["slots"][0]["state"]["history_root"] = format!("0x{}", "ab".repeat(32)).into();
    fs::write(&path, serde_json::to_string(&chain).unwrap()).unwrap();
    let state = dir.path().join("state.json");
    let out = init(dir.path(), "store", &state);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("StateRootMismatch"));
    assert!(!state.exists());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&simulate(dir.path(), "7")), 0);
    let state = dir.path().join("state.json");
    assert_eq!(code(&init(dir.path(), "store", &state)), 0);

    let src = dir.path().join("updates/case1.json");
    let mut upd: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&src).unwrap()).unwrap();
    let bits = upd["participation_bits"].as_str().unwrap().to_string();
    upd["participation_bits"] = format!("{bits}1").into();
    let long = dir.path().join("long-bits.json");
    fs::write(&long, serde_json::to_string(&upd).unwrap()).unwrap();
    assert_eq!(code(&update(&state, &long, &dir.path().join("x.json"))), 2);

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(
        code(&update(&state, &garbage, &dir.path().join("x.json"))),
        2
    );
    assert_eq!(code(&update(&state, &src, &state)), 2);

    assert_eq!(
        code(&run(&[
            "simulate",
            "--periods",
            "0",
            "--out-dir",
            p(dir.path())
        ])),
        2
    );
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&["scenario", "nope"])), 2);
    assert_eq!(
        code(&run(&[
            "init",
            "--chain-dir",
            "/nonexistent",
            "--state-out",
            p(&dir.path().join("s"))
        ])),
        2
    );
}

#[test]
fn scenario_and_costs() {
    let out = run(&["scenario", "case3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    let written = |prefix: &str| -> u64 {
        let line = text.lines().find(|l| l.starts_with(prefix)).unwrap();
        line.split_whitespace()
            .find_map(|t| t.strip_prefix("words_written="))
            .unwrap()
            .parse()
            .unwrap()
    };
    // Committee of 32 keys: 48 words more when keys are stored.
    assert_eq!(written("costs store:") - written("costs no-store:"), 48);

    let out = run(&["costs"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("768 storage words, 3840000 gas"));
    let out = run(&["costs", "--committee-size", "0"]);
    assert!(stdout(&out).contains("0 storage words, 0 gas"));
}
