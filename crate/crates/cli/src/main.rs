use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod error;
mod run;
mod table;

use config::{ConfigLayer, Scenario};
use error::CliResult;

#[derive(Parser)]
#[command(name = "zenotraj", version, about = "Post-selected qubit dynamics under superposed trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML file with settings; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: ConfigLayer,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Filter functions and overlap decay factors.
    Filter,
    /// Exact single-excitation dissipative dynamics.
    DynamicsDiss,
    /// Exact pure-dephasing dynamics.
    DynamicsDeph,
    /// Collective decay of an emitter in superposed positions.
    Dicke,
    /// Trace distance and CP divisibility.
    Nonmarkov,
    /// Second-order decay factors against exact dynamics.
    Perturbation,
}

impl Command {
    fn scenario(self) -> Scenario {
        match self {
            Command::Filter => Scenario::Filter,
            Command::DynamicsDiss => Scenario::DynamicsDiss,
            Command::DynamicsDeph => Scenario::DynamicsDeph,
            Command::Dicke => Scenario::Dicke,
            Command::Nonmarkov => Scenario::Nonmarkov,
            Command::Perturbation => Scenario::Perturbation,
        }
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let file = cli.config.as_deref().map(ConfigLayer::from_file).transpose()?;
    let config = config::resolve(cli.command.scenario(), cli.settings, file)?;
    let table = run::run(&config)?;
    table::emit(&table, config.format(), config.out())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zenotraj: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
