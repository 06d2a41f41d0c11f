use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fockforge_cli::{execute, Command, Format, Overrides};

#[derive(Parser, Debug)]
#[command(name = "fockforge", version, about = "Exact simulation workbench for lattice fermions")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Experiment config file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides measurement.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; `-` for standard output.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sector eigenvalues of the configured Hamiltonian.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also diagonalize in the first-quantized picture.
        #[arg(long)]
        cross_check: bool,
    },
    /// Trotterized evolution against the dense reference.
    Evolve {
        #[command(flatten)]
        common: Common,
    },
    /// First- vs second-quantized fidelities.
    Compare {
        #[command(flatten)]
        common: Common,
    },
    /// Measurement-scheme distributions.
    Measure {
        #[command(flatten)]
        common: Common,
        /// All four schemes with deviations from the Kitaev circuit.
        #[arg(long, conflicts_with = "estimate")]
        all: bool,
        /// Eigenvalue estimate from sampled kickback outcomes.
        #[arg(long)]
        estimate: bool,
    },
    /// Qubit and term counts for the three algorithms.
    Resources {
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Cmd::Spectrum { common, cross_check } => (Command::Spectrum { cross_check }, common),
        Cmd::Evolve { common } => (Command::Evolve, common),
        Cmd::Compare { common } => (Command::Compare, common),
        Cmd::Measure { common, all, estimate } => (Command::Measure { all, estimate }, common),
        Cmd::Resources { common } => (Command::Resources, common),
    };
    let overrides = Overrides {
        seed: common.seed,
        out: common.out,
        format: common.format,
    };
    match execute(command, &common.config, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fockforge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
