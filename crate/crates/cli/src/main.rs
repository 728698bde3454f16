use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stimdyn_cli::config::{Scenario, ScenarioConfig};
use stimdyn_cli::error::CliError;
use stimdyn_cli::output::write_run;
use stimdyn_cli::scenarios::{run, RunOptions};

#[derive(Parser)]
#[command(name = "stimdyn", version, about = "Stimulated emission of a two-level atom in a 1D cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its run directory.
    Run {
        scenario: Scenario,
        /// TOML file with sections overriding the scenario defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dotted key override, e.g. `--set integration.dt=0.005`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory; defaults to `runs/<scenario>`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative phase of the second pulse, in radians.
        #[arg(long, allow_negative_numbers = true)]
        phi: Option<f64>,
        /// Also write the final state amplitudes.
        #[arg(long)]
        dump_amplitudes: bool,
    },
    /// List the scenarios and what each reproduces.
    List,
}

fn list() {
    let width = Scenario::ALL.iter().map(|s| s.name().len()).max().unwrap_or(0);
    for s in Scenario::ALL {
        println!("{:<width$}  {:<12}  {}", s.name(), s.figure(), s.description());
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::List => list(),
        Command::Run { scenario, config, set, out, phi, dump_amplitudes } => {
            let mut cfg = ScenarioConfig::resolve(scenario, config.as_deref(), &set)?;
            if let Some(phi) = phi {
                cfg.set_phase(phi);
            }
            let result = run(&cfg, &RunOptions { dump_amplitudes })?;
            let dir = out.unwrap_or_else(|| PathBuf::from("runs").join(scenario.name()));
            let command: Vec<String> = std::env::args().collect();
            let files = write_run(&dir, &cfg, &result, &command)?;
            log::info!("wrote {} files to {}", files.len(), dir.display());
            println!("{}", serde_json::to_string_pretty(&result.summary).map_err(anyhow::Error::from)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stimdyn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
