use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gpt_recon::error::Error;
use gpt_recon::instances;
use gpt_recon::pipeline::{self, PipelineConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use gpt_recon::report::{render_report, Format};

#[derive(Parser)]
#[command(name = "gpt-recon", version, about = "Check the axiom chain of an operational theory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage on a theory document or a built-in and print the report.
    Check {
        /// Path to a theory document, or a built-in name (see list-builtins).
        input: String,
        /// Numerical tolerance [default: 1e-9].
        #[arg(long, env = pipeline::TOLERANCE_ENV)]
        tolerance: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value = "json", value_parser = ["json", "text"])]
        format: String,
    },
    /// Print the names of the built-in theories.
    ListBuiltins,
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::ListBuiltins => {
            let mut out = std::io::stdout().lock();
            for name in instances::builtin_names() {
                writeln!(out, "{name}")?;
            }
            Ok(0)
        }
        Command::Check { input, tolerance, samples, seed, report, format } => {
            let format: Format = format.parse()?;
            let config = PipelineConfig {
                input,
                tolerance: match tolerance {
                    Some(t) => t,
                    None => pipeline::default_tolerance()?,
                },
                samples,
                seed,
                report_path: report,
                format,
            };
            let result = pipeline::run_pipeline(&config)?;
            if let Some(path) = &config.report_path {
                pipeline::write_report(&result, path, config.format)?;
            }
            std::io::stdout().lock().write_all(&render_report(&result, config.format))?;
            Ok(result.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("gpt-recon: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
