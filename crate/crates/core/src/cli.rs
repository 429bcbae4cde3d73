//! `pos-relay` command line.
//!
//! Exit codes: 0 success, 1 relay rejection (or a failed scenario check),
//! 2 malformed input or usage error.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use crate::cost::{report_committee_storage_cost, CostMeter, CostModel};
use crate::relay::{apply_update, initialize, RelayState, RelayUpdate, StorageMode};
use crate::scenario::{self, describe_committees, ScenarioParams, SCENARIOS};
use crate::sim::{craft_update, tamper, ChainExport, SimError, Tampering};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable that takes precedence over `--seed`.
pub const SEED_ENV: &str = "POS_RELAY_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "pos-relay",
    version,
    about = "Proof-of-stake chain relay toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a simulated chain and sample update files.
    Simulate(SimulateArgs),
    /// Anchor a relay state at a slot of a simulated chain.
    Init(InitArgs),
    /// Apply an update file to a relay state.
    Update(UpdateArgs),
    /// Run an end-to-end scenario.
    Scenario(ScenarioArgs),
    /// Print the committee storage lower bound.
    Costs(CostsArgs),
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, default_value_t = 32)]
    pub committee_size: u64,
    #[arg(long, default_value_t = 4)]
    pub slots_per_epoch: u64,
    #[arg(long, default_value_t = 4)]
    pub epochs_per_period: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub periods: u64,
    /// Defaults to twice the committee size.
    #[arg(long)]
    pub validators: Option<usize>,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Relay anchor slot the sample updates are crafted against.
    #[arg(long, default_value_t = 0)]
    pub anchor_slot: u64,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct InitArgs {
    #[arg(long)]
    pub chain_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub slot: u64,
    #[arg(long, default_value = "store")]
    pub mode: StorageMode,
    #[arg(long)]
    pub state_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CostModelArgs {
    #[arg(long, default_value_t = CostModel::default().gas_per_word_write)]
    pub gas_per_word_write: u64,
    #[arg(long, default_value_t = CostModel::default().gas_per_word_read)]
    pub gas_per_word_read: u64,
    #[arg(long, default_value_t = CostModel::default().gas_per_payload_byte)]
    pub gas_per_payload_byte: u64,
    #[arg(long, default_value_t = CostModel::default().gas_per_sha256)]
    pub gas_per_sha256: u64,
    #[arg(long, default_value_t = CostModel::default().gas_per_pairing)]
    pub gas_per_pairing: u64,
}

impl CostModelArgs {
    fn model(&self) -> CostModel {
        CostModel {
            gas_per_word_write: self.gas_per_word_write,
            gas_per_word_read: self.gas_per_word_read,
            gas_per_payload_byte: self.gas_per_payload_byte,
            gas_per_sha256: self.gas_per_sha256,
            gas_per_pairing: self.gas_per_pairing,
        }
    }
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub state_in: PathBuf,
    #[arg(long)]
    pub update: PathBuf,
    #[arg(long)]
    pub state_out: PathBuf,
    #[command(flatten)]
    pub cost: CostModelArgs,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SCENARIOS))]
    pub name: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    pub validators: Option<usize>,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// Trials per tampering kind for `adversarial`.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct CostsArgs {
    #[arg(long, default_value_t = 512)]
    pub committee_size: u64,
    #[command(flatten)]
    pub cost: CostModelArgs,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

fn usage(error: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        error: error.into(),
    }
}

fn rejected(error: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: EXIT_REJECTED,
        error: error.into(),
    }
}

fn effective_seed(flag: u64) -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|e| usage(anyhow!("{SEED_ENV}={value:?} is not a u64: {e}"))),
        Err(_) => Ok(flag),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(usage)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory values serialize");
    s.push('\n');
    s
}

fn sim_error(e: SimError) -> CliError {
    usage(e)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let seed = effective_seed(args.seed)?;
    let g = &args.geometry;
    let params = ScenarioParams {
        seed,
        committee_size: g.committee_size,
        slots_per_epoch: g.slots_per_epoch,
        epochs_per_period: g.epochs_per_period,
        validators: args.validators.unwrap_or(2 * g.committee_size as usize),
        ..ScenarioParams::default()
    };
    let chain = params.chain(args.periods).map_err(sim_error)?;
    chain.export(&args.out_dir).map_err(sim_error)?;

    let updates_dir = args.out_dir.join("updates");
    fs::create_dir_all(&updates_dir)
        .with_context(|| format!("creating {}", updates_dir.display()))
        .map_err(usage)?;
    let full = g.committee_size as usize;
    let mut written = Vec::new();
    for case in 1..=3u8 {
        match craft_update(&chain, case, args.anchor_slot, full) {
            Ok(update) => {
                let name = format!("case{case}.json");
                write_file(&updates_dir.join(&name), &to_json(&update))?;
                written.push(name);
                if case == 1 {
                    let bad = tamper(
                        &update,
                        Tampering::FlipSignatureByte {
                            index: 10,
                            mask: 0x01,
                        },
                        &chain,
                    )
                    .map_err(sim_error)?;
                    let name = "case1-bad-signature.json".to_string();
                    write_file(&updates_dir.join(&name), &to_json(&bad))?;
                    written.push(name);
                }
            }
            Err(SimError::CaseUnrealizable { .. }) => {}
            Err(e) => return Err(sim_error(e)),
        }
    }

    println!("chain written to {}", args.out_dir.display());
    println!(
        "slots: {}  periods: {}  validators: {}  committee size: {}",
        chain.slot_count(),
        chain.num_periods,
        chain.validators.len(),
        g.committee_size
    );
    for (period, pc) in chain.committees.iter().enumerate() {
        println!("committee {period}: {}", pc.root);
    }
    println!(
        "updates against anchor slot {}: {}",
        args.anchor_slot,
        written.join(", ")
    );
    Ok(())
}

pub fn cmd_init(args: &InitArgs) -> Result<(), CliError> {
    let export = ChainExport::load(&args.chain_dir).map_err(sim_error)?;
    let snapshot = export.snapshot(args.slot).map_err(sim_error)?;
    let state = initialize(&snapshot, args.mode, export.chain.config.clone())
        .map_err(|e| rejected(anyhow!("{}: {e}", e.name())))?;
    write_file(&args.state_out, &state.to_canonical_json())?;
    println!(
        "relay initialized in {} mode at slot {}",
        args.mode, args.slot
    );
    println!(
        "trusted header root: {}",
        state.current_header.hash_tree_root()
    );
    println!("{}", describe_committees(&state.committees));
    Ok(())
}

pub fn cmd_update(args: &UpdateArgs) -> Result<(), CliError> {
    if args.state_out == args.state_in || args.state_out == args.update {
        return Err(usage(anyhow!(
            "--state-out must not overwrite an input file"
        )));
    }
    let state: RelayState = read_json(&args.state_in)?;
    let update: RelayUpdate = read_json(&args.update)?;
    let mut meter = CostMeter::new();
    let next = match apply_update(&state, &update, &mut meter) {
        Ok(next) => next,
        Err(e) if e.is_malformed_input() => {
            return Err(usage(anyhow!("{}: {e}", e.name())));
        }
        Err(e) => {
            println!("rejected: {}", e.name());
            return Err(rejected(anyhow!("{}: {e}", e.name())));
        }
    };
    write_file(&args.state_out, &next.to_canonical_json())?;
    let gas = args.cost.model().gas(&meter);
    println!(
        "accepted: slot {} -> {}",
        state.current_header.slot, next.current_header.slot
    );
    println!("{meter}");
    println!(
        "gas: {}",
        serde_json::to_string(&gas).expect("serializable")
    );
    Ok(())
}

pub fn cmd_scenario(args: &ScenarioArgs) -> Result<(), CliError> {
    let g = &args.geometry;
    let params = ScenarioParams {
        seed: effective_seed(args.seed)?,
        committee_size: g.committee_size,
        slots_per_epoch: g.slots_per_epoch,
        epochs_per_period: g.epochs_per_period,
        validators: args.validators.unwrap_or(2 * g.committee_size as usize),
        trials: args.trials,
    };
    let report = scenario::run(&args.name, &params).map_err(sim_error)?;
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(rejected(anyhow!("scenario {} failed", args.name)))
    }
}

pub fn cmd_costs(args: &CostsArgs) -> Result<(), CliError> {
    let model = args.cost.model();
    let gas = report_committee_storage_cost(args.committee_size, &model);
    println!(
        "committee of {} keys: {} storage words, {} gas at {} gas/word",
        args.committee_size,
        crate::cost::committee_key_words(args.committee_size),
        gas,
        model.gas_per_word_write
    );
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Init(a) => cmd_init(a),
        Command::Update(a) => cmd_update(a),
        Command::Scenario(a) => cmd_scenario(a),
        Command::Costs(a) => cmd_costs(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError { code, error }) => {
            eprintln!("error: {error:#}");
            code
        }
    }
}
