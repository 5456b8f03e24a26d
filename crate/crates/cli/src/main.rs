use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod check;
mod commands;
mod error;
mod scenario;

use commands::GlobalOptions;
use error::CliError;

/// Elastic perfectly plastic constitutive engine.
#[derive(Parser, Debug)]
#[command(name = "conelaw", version, about)]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (stdout if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplier applied to every numerical tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a tensor into tangent and normal cone parts at a stress.
    Project { scenario: PathBuf },
    /// Integrate a strain-rate path at a material point; writes CSV.
    Drive { scenario: PathBuf },
    /// Run the 1-D bar simulation; writes snapshot CSV and a summary JSON.
    Wave {
        scenario: PathBuf,
        /// Summary JSON path (default: next to --out with extension .summary.json).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the randomized invariant suite and print a pass/fail table.
    Check {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if !(cli.tol_scale > 0.0 && cli.tol_scale.is_finite()) {
        return Err(CliError::Validation(format!(
            "--tol-scale: must be positive and finite, got {}",
            cli.tol_scale
        )));
    }
    let opts = GlobalOptions {
        seed: cli.seed,
        out: cli.out,
        tol_scale: cli.tol_scale,
    };
    match cli.command {
        Command::Project { scenario } => commands::cmd_project(&scenario, &opts),
        Command::Drive { scenario } => commands::cmd_drive(&scenario, &opts),
        Command::Wave { scenario, summary } => {
            commands::cmd_wave(&scenario, summary.as_deref(), &opts)
        }
        Command::Check { samples } => {
            if samples == 0 {
                return Err(CliError::Validation("--samples: must be at least 1".into()));
            }
            let seed = opts.seed.unwrap_or(0);
            let rows = check::run_suite(seed, samples, opts.tol_scale);
            commands::emit(
                opts.out.as_deref(),
                &check::render(&rows, seed, samples, opts.tol_scale),
            )?;
            let failed = rows.iter().filter(|r| !r.pass()).count();
            if failed > 0 {
                return Err(CliError::Numerical(format!(
                    "{failed} invariant suite(s) failed"
                )));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
