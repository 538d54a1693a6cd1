use std::io::{stderr, stdout};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gadgetcheck::cli;

/// Verify adaptive Clifford+T computations run on a (simulated) quantum device.
#[derive(Parser)]
#[command(name = "gadgetcheck", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replace every T gate by a magic-state gadget and write the result.
    Gadgetize { input: PathBuf, output: PathBuf },
    /// Print the output probabilities of the gate sequence fixed by the given gadget outcomes.
    Probability {
        circuit: PathBuf,
        /// Gadget outcomes such as `0110`; use `-` for a circuit without gadgets.
        #[arg(default_value = "-", allow_hyphen_values = true)]
        outcomes: String,
    },
    /// Run a verification campaign described by a config file.
    Verify { config: PathBuf },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_USAGE as u8 } else { 0 });
        }
    };
    let (mut out, mut err) = (stdout().lock(), stderr().lock());
    let code = match args.command {
        Command::Gadgetize { input, output } => cli::cmd_gadgetize(&input, &output, &mut out, &mut err),
        Command::Probability { circuit, outcomes } => {
            cli::cmd_probability(&circuit, &outcomes, &mut out, &mut err)
        }
        Command::Verify { config } => cli::cmd_verify(&config, &mut out, &mut err),
    };
    ExitCode::from(code as u8)
}
