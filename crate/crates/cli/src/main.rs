//! `pathsim`: run, sweep, sample and analyse `.exp` interferometer
//! experiments from the command line.
//!
//! Exit codes: 0 success, 2 bad input (parse, compile or flag errors),
//! 3 environment errors (unreadable input, unwritable output).

mod commands;
mod record;
mod render;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pathsim_core::relativity::ApparatusGeometry;
use pathsim_core::{Angle, Scenario};

use commands::{CliError, Experiment};
use record::{OutputRecord, Payload, VERSION};
use render::Format;

#[derive(Parser)]
#[command(
    name = "pathsim",
    version,
    about = "Two-photon path-entanglement interferometer simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags take precedence over the matching statements in the file.
#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "table", global = true)]
    format: Format,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the file's `seed` statement.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the file's `samples` statement.
    #[arg(long, global = true)]
    samples: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Joint probabilities and amplitudes at the chosen detection stages.
    Run { file: PathBuf },
    /// Correlation E over the file's `sweep` grid.
    Sweep { file: PathBuf },
    /// Monte Carlo detection counts.
    Sample { file: PathBuf },
    /// CHSH value with L after stage 1 and R after stage 3.
    Chsh {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        a: Angle,
        #[arg(long, default_value = "pi/2", allow_hyphen_values = true)]
        a2: Angle,
        #[arg(long, default_value = "-pi/4", allow_hyphen_values = true)]
        b: Angle,
        #[arg(long, default_value = "pi/4", allow_hyphen_values = true)]
        b2: Angle,
    },
    /// Interval classes, frames I1/I2, orderings and phases R has passed.
    Frames { file: Option<PathBuf> },
    /// Frame dependence of a nonlocal outcome model, with the no-signaling check.
    Ambiguity {
        file: PathBuf,
        /// Points per axis of the (phi1, phi3) no-signaling grid.
        #[arg(long, default_value_t = 50)]
        grid: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pathsim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn record(exp: Option<&Experiment>, seed: u64, result: Payload) -> OutputRecord {
    OutputRecord {
        input: exp.map(|e| e.path.clone()),
        seed,
        version: VERSION,
        result,
    }
}

fn file_seed(exp: &Experiment, flag: Option<u64>) -> u64 {
    flag.unwrap_or(exp.compiled.run.seed)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let records = match &cli.command {
        Command::Run { file } => {
            let exp = commands::load(file)?;
            let table = commands::probability_table(&exp.compiled.scenario);
            vec![record(
                Some(&exp),
                file_seed(&exp, c.seed),
                Payload::Probabilities(table),
            )]
        }
        Command::Sweep { file } => {
            let exp = commands::load(file)?;
            let table = commands::correlation_table(&exp)?;
            vec![record(
                Some(&exp),
                file_seed(&exp, c.seed),
                Payload::Correlations(table),
            )]
        }
        Command::Sample { file } => {
            let exp = commands::load(file)?;
            let (seed, rows) = commands::detection_rows(&exp, c.seed, c.samples)?;
            rows.into_iter()
                .map(|r| record(Some(&exp), seed, Payload::Detection(r)))
                .collect()
        }
        Command::Chsh { a, a2, b, b2 } => {
            vec![record(
                None,
                c.seed.unwrap_or(0),
                Payload::Chsh(commands::chsh_result(*a, *a2, *b, *b2)),
            )]
        }
        Command::Frames { file } => {
            let exp = file.as_deref().map(commands::load).transpose()?;
            let (scenario, geometry) = match &exp {
                Some(e) => (e.compiled.scenario, e.compiled.geometry.clone()),
                None => (Scenario::default(), ApparatusGeometry::paper_default()),
            };
            let report = commands::frame_report(&scenario, &geometry)?;
            let seed = exp.as_ref().map_or(c.seed.unwrap_or(0), |e| file_seed(e, c.seed));
            vec![record(exp.as_ref(), seed, Payload::Frames(report))]
        }
        Command::Ambiguity { file, grid } => {
            if *grid == 0 {
                return Err(CliError::Input("--grid must be at least 1".into()));
            }
            let exp = commands::load(file)?;
            let result = commands::ambiguity_result(&exp, *grid)?;
            vec![record(Some(&exp), file_seed(&exp, c.seed), Payload::Ambiguity(result))]
        }
    };
    let color = c.out.is_none() && std::env::var_os("PATHSIM_NO_COLOR").is_none() && std::io::stdout().is_terminal();
    let bytes = render::render(&records, c.format, color)?;
    commands::write_output(c.out.as_deref(), &bytes)
}
