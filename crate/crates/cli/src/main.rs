use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod config;

use commands::Failure;

#[derive(Debug, Parser)]
#[command(name = "spinframe", version, about = "Fidelity signatures and collective-frame symmetry for spin systems")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the fidelity signature of a state file.
    Signature(SignatureArgs),
    /// Check collective invariance and run the Haar falsification probe.
    #[command(name = "verify-theorem1")]
    VerifyTheorem1(VerifyArgs),
    /// Tabulate micro/macro superposition fidelities against the claimed values.
    Micromacro(MicroMacroArgs),
    /// Search for a state with a given signature.
    Search(SearchArgs),
    /// Find a state whose signature the basis relabeling changes.
    Witness(WitnessArgs),
    /// Simulate the discrimination game from a game config document.
    Game(GameArgs),
    /// Bloch vector of a single-spin state or marginal.
    Bloch(BlochArgs),
    /// Write a named state to a state file.
    State(StateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Single,
    Subsets,
    Tuples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Sqrt,
    Squared,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyArgs {
    /// Pair family.
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    /// Subsystem size for subsets/tuples.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Allow overlapping subsystems within a pair.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub overlap: bool,
    /// Upper bound on enumerated tuple pairs.
    #[arg(long, default_value_t = spinframe_core::signature::DEFAULT_TUPLE_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// JSON object of flag values, applied before command-line flags.
    #[arg(long)]
    pub config: Option<String>,
    /// Record wall-clock duration in the manifest (makes output non-reproducible).
    #[arg(long, default_value_t = false, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SignatureArgs {
    #[arg(long)]
    pub state: String,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Sqrt)]
    pub convention: ConventionArg,
    /// Output file (stdout when omitted).
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Sqrt)]
    pub convention: ConventionArg,
    #[serde(skip)]
    #[arg(long)]
    pub report: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct MicroMacroArgs {
    #[arg(long, default_value_t = 4)]
    pub m: usize,
    /// Real part of the amplitude on |0…0⟩.
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Imaginary part of the amplitude on |0…0⟩.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha_im: f64,
    /// Pair family; both single-spin and tuples are tabulated when omitted.
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Squared)]
    pub convention: ConventionArg,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    /// Also write the entries as CSV.
    #[serde(skip)]
    #[arg(long)]
    pub csv: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct SearchArgs {
    /// Target signature file.
    #[arg(long, required_unless_present = "state")]
    pub target: Option<String>,
    /// Build the target from this state file instead.
    #[arg(long, conflicts_with = "target")]
    pub state: Option<String>,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Sqrt)]
    pub convention: ConventionArg,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 40_000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep every n-th point of each optimizer trace in the report.
    #[arg(long, default_value_t = 50)]
    pub trace_stride: usize,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    /// Also write the recovered state as a state file.
    #[serde(skip)]
    #[arg(long)]
    pub state_out: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ConventionArg::Sqrt)]
    pub convention: ConventionArg,
    #[arg(long, default_value_t = 100)]
    pub attempts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct GameArgs {
    /// Game config document.
    #[arg(long)]
    pub config: String,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, default_value_t = false, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct BlochArgs {
    #[arg(long)]
    pub state: String,
    /// Spin to reduce onto (required for multi-spin states).
    #[arg(long)]
    pub spin: Option<usize>,
    /// Second state; reports the angle between the two Bloch vectors.
    #[arg(long)]
    pub against: Option<String>,
    #[arg(long)]
    pub against_spin: Option<usize>,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Micro,
    Macro,
    Basis,
    Plus,
    Ghz,
    W,
    Haar,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(args_override_self = true)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub kind: StateKind,
    /// Number of spins.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Amplitude on |0…0⟩ for micro/macro states.
    #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Bit string for basis states, e.g. 001.
    #[arg(long)]
    pub bits: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[serde(skip)]
    #[arg(long)]
    pub out: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::input("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::input(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::Signature(a) => commands::signature(a),
        Command::VerifyTheorem1(a) => commands::verify_theorem1(a),
        Command::Micromacro(a) => commands::micromacro(a),
        Command::Search(a) => commands::search(a),
        Command::Witness(a) => commands::witness(a),
        Command::Game(a) => commands::game(a),
        Command::Bloch(a) => commands::bloch(a),
        Command::State(a) => commands::state(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(v) => v,
        Err(f) => return f.report(),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
