use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qsweep_cli::{config, describe_experiments, emit, execute, CliError, Format};

#[derive(Parser)]
#[command(name = "qsweep", version, about = "Run qsweep experiments from JSON configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output path; tables go to stdout when neither this nor `output` is set.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// List experiments and their parameters.
    ListExperiments,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config: path,
            seed,
            out,
            format,
            threads,
        } => {
            let (mut cfg, report) = config::load(&path)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(f) = format {
                cfg.format = match f {
                    FormatArg::Csv => Format::Csv,
                    FormatArg::Json => Format::Json,
                };
            }
            let out = out.or_else(|| cfg.output.clone());
            let result = execute(&cfg, threads)?;
            for p in emit(&result, cfg.format, out.as_deref())? {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Validate { config: path } => {
            let report = config::validate_file(&path)?;
            print!("{report}");
            if !report.is_ok() {
                return Err(CliError::Schema(format!("{} error(s) in {}", report.errors.len(), path.display())));
            }
        }
        Command::ListExperiments => print!("{}", describe_experiments()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
