use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kset_cli::{run_campaign, run_scenario, Options, Report, Scenario, EXIT_CONFIG};

#[derive(Parser)]
#[command(name = "kset", version, about = "Byzantine k-set agreement runs and protocol-complex checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Writes records here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Adds one record per non-faulty EIG tree (protocol modes).
    #[arg(long, global = true)]
    tree_dump: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one scenario file.
    Run { file: PathBuf },
    /// Runs seeds seed, seed+1, .. of a protocol scenario.
    Campaign {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        runs: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { seed: cli.seed, tree_dump: cli.tree_dump };
    let file = match &cli.command {
        Command::Run { file } | Command::Campaign { file, .. } => file,
    };
    let report = match Scenario::load(file) {
        Ok(s) => match cli.command {
            Command::Run { .. } => run_scenario(&s, opts),
            Command::Campaign { runs, .. } => run_campaign(&s, opts, runs),
        },
        Err(e) => {
            eprintln!("kset: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = write_report(&report, cli.out.as_ref()) {
        eprintln!("kset: cannot write report: {e}");
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    ExitCode::from(report.exit_code as u8)
}

fn write_report(report: &Report, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, report.text()),
        None => std::io::stdout().lock().write_all(report.text().as_bytes()),
    }
}
