use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod config;
mod error;
mod input;
mod output;

use commands::{NonrevInput, PairCommand, PairReport};
use config::{CommandKind, Format, RunConfig};
use error::{CliError, CliResult};

/// Complexity of pure Gaussian states: closed forms, modified metrics and a
/// brute-force path oracle.
#[derive(Debug, Parser)]
#[command(name = "gaussian-complexity", version)]
struct Cli {
    /// Relative tolerance for invariant checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    /// Seed of the oracle's random restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Pair {
    /// Reference state file.
    reference: PathBuf,

    /// Target state file.
    #[arg(required_unless_present = "batch")]
    target: Option<PathBuf>,

    /// Use every *.json file in this directory as a target.
    #[arg(long, conflicts_with = "target")]
    batch: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form complexity of an undisplaced target.
    Complexity(Pair),
    /// Complexity including the displacement of a bosonic target.
    Coherent(Pair),
    /// Complexity under the Weyl-rescaled metric.
    Weyl {
        #[command(flatten)]
        pair: Pair,
        /// const:c, linear:beta or table:<csv of r, omega>.
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 128)]
        quad_steps: usize,
    },
    /// Lorentz-force trajectory on the single-mode chart and its
    /// forward and reverse costs.
    Nonrev {
        /// r,phi
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// dr,dphi (rescaled to unit speed)
        #[arg(long, allow_hyphen_values = true)]
        velocity: String,
        /// none, const:f, grad:h=<poly in r> or mod:f0=<poly>,eps=<e>.
        #[arg(long, default_value = "none")]
        potential: String,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 1000)]
        rk_steps: usize,
        /// Write the sampled path here as CSV.
        #[arg(long)]
        csv_out: Option<PathBuf>,
    },
    /// Compare the closed form with a direct path minimization.
    OracleVerify {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 16)]
        segments: usize,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
    },
}

fn config(cli: &Cli) -> CliResult<RunConfig> {
    let (kind, quad_steps, rk_steps, segments, restarts) = match &cli.command {
        Command::Complexity(_) => (CommandKind::Complexity, 128, 1000, 16, 5),
        Command::Coherent(_) => (CommandKind::Coherent, 128, 1000, 16, 5),
        Command::Weyl { quad_steps, .. } => (CommandKind::Weyl, *quad_steps, 1000, 16, 5),
        Command::Nonrev { rk_steps, .. } => (CommandKind::Nonrev, 128, *rk_steps, 16, 5),
        Command::OracleVerify {
            segments, restarts, ..
        } => (CommandKind::OracleVerify, 128, 1000, *segments, *restarts),
    };
    RunConfig::new(
        kind, cli.tol, quad_steps, rk_steps, segments, restarts, cli.seed, cli.format,
    )
}

#[derive(Serialize)]
struct BatchEntry {
    name: String,
    #[serde(flatten)]
    result: BatchResult,
}

#[derive(Serialize)]
#[serde(untagged)]
enum BatchResult {
    Ok(PairReport),
    Err {
        error: &'static str,
        message: String,
    },
}

fn run_pair<W: Write>(
    pair: &Pair,
    command: PairCommand,
    cfg: &RunConfig,
    out: &mut W,
) -> CliResult<u8> {
    let reference = input::load_state(&pair.reference, cfg.tol)?;
    let header = commands::scalar_header(cfg.command);

    let Some(dir) = &pair.batch else {
        let target_path = pair
            .target
            .as_ref()
            .expect("clap requires a target without --batch");
        let target = input::load_state(target_path, cfg.tol)?;
        let report = command.run(&reference, &target, cfg)?;
        match cfg.format {
            Format::Json => output::write_json(out, &report)?,
            Format::Csv => {
                let row = report
                    .scalars()
                    .iter()
                    .map(|(_, v)| output::float(*v))
                    .collect();
                output::write_csv(out, header, &[row])?;
            }
        }
        return Ok(0);
    };

    let files = commands::batch_files(dir, &pair.reference)?;
    let results = commands::parallel_map(&files, |path| {
        input::load_state(path, cfg.tol).and_then(|t| command.run(&reference, &t, cfg))
    });
    let code = results
        .iter()
        .find_map(|r| r.as_ref().err().map(CliError::exit_code))
        .unwrap_or(0);
    let names: Vec<String> = files
        .iter()
        .map(|p| {
            p.file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
        })
        .collect();
    match cfg.format {
        Format::Json => {
            let entries: Vec<BatchEntry> = names
                .into_iter()
                .zip(results)
                .map(|(name, r)| BatchEntry {
                    name,
                    result: match r {
                        Ok(report) => BatchResult::Ok(report),
                        Err(e) => BatchResult::Err {
                            error: e.name(),
                            message: e.to_string(),
                        },
                    },
                })
                .collect();
            output::write_json(out, &entries)?;
        }
        Format::Csv => {
            let mut columns = vec!["name"];
            columns.extend_from_slice(header);
            columns.push("error");
            let rows: Vec<Vec<String>> = names
                .into_iter()
                .zip(results)
                .map(|(name, r)| {
                    let mut row = vec![name];
                    match r {
                        Ok(report) => {
                            row.extend(report.scalars().iter().map(|(_, v)| output::float(*v)));
                            row.push(String::new());
                        }
                        Err(e) => {
                            row.extend(header.iter().map(|_| String::new()));
                            row.push(e.name().to_string());
                        }
                    }
                    row
                })
                .collect();
            output::write_csv(out, &columns, &rows)?;
        }
    }
    Ok(code)
}

fn run<W: Write>(cli: &Cli, out: &mut W) -> CliResult<u8> {
    let cfg = config(cli)?;
    match &cli.command {
        Command::Complexity(pair) => run_pair(pair, PairCommand::Complexity, &cfg, out),
        Command::Coherent(pair) => run_pair(pair, PairCommand::Coherent, &cfg, out),
        Command::Weyl { pair, omega, .. } => run_pair(
            pair,
            PairCommand::Weyl(input::parse_omega(omega)?),
            &cfg,
            out,
        ),
        Command::OracleVerify { pair, .. } => run_pair(pair, PairCommand::OracleVerify, &cfg, out),
        Command::Nonrev {
            start,
            velocity,
            potential,
            length,
            csv_out,
            ..
        } => {
            let input = NonrevInput {
                start: input::parse_pair(start)?,
                velocity: input::parse_pair(velocity)?,
                potential: input::parse_potential(potential)?,
                length: *length,
            };
            let run = commands::nonrev(&input, &cfg)?;
            if let Some(path) = csv_out {
                let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
                output::write_csv(io::BufWriter::new(file), &run.header, &run.rows)?;
            }
            match cfg.format {
                Format::Json => output::write_json(out, &run.report)?,
                Format::Csv => output::write_csv(out, &run.header, &run.rows)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let mut stdout = io::stdout().lock();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim().to_string());
            let _ = writeln!(stdout, "{}", output::error_json(&err));
            return ExitCode::from(err.exit_code());
        }
    };
    match run(&cli, &mut stdout) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let _ = writeln!(stdout, "{}", output::error_json(&e));
            ExitCode::from(e.exit_code())
        }
    }
}
