use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use revdiff_cli::builtins::NAMES;
use revdiff_cli::config::to_json;
use revdiff_cli::{builtin, run_config, run_scenario, CliError, OutputBundle};

#[derive(Parser)]
#[command(name = "revdiff", version, about = "Lensless imaging and phase-reversal diffraction with incoherent light")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON scenario.
    Run {
        config: PathBuf,
        /// Output directory; defaults to the config's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the built-in scenarios.
    ListBuiltins,
    /// Print a built-in scenario as JSON.
    ShowBuiltin { name: String },
    /// Run a built-in scenario.
    RunBuiltin {
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn unknown(name: &str) -> CliError {
    CliError::validation("name", format!("no built-in scenario `{name}`; try list-builtins"))
}

fn report(bundle: &OutputBundle) {
    println!("scenario {}", bundle.name);
    print!("{}", bundle.ledger.summary());
    for f in &bundle.files {
        println!("wrote {} ({} bytes, sha256 {})", f.path, f.bytes, f.sha256);
    }
    for w in &bundle.warnings {
        eprintln!("warning: {w}");
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, out } => report(&run_scenario(&config, out.as_deref())?),
        Command::ListBuiltins => {
            for name in NAMES {
                println!("{name}");
            }
        }
        Command::ShowBuiltin { name } => print!("{}", to_json(&builtin(&name).ok_or_else(|| unknown(&name))?)),
        Command::RunBuiltin { name, out } => {
            let config = builtin(&name).ok_or_else(|| unknown(&name))?;
            report(&run_config(&config, Path::new("."), &out)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
