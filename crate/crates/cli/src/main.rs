mod bench;
mod cli;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::{CliError, CliResult, IntegrateArgs};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Augment {
            input,
            output,
            config,
            seed,
            workers,
        } => commands::augment(&input, &output, &config, seed, workers),
        Command::Integrate {
            input,
            output,
            slices,
            mask_rate,
            patch_size,
            from,
            polarity_encoding,
        } => commands::integrate_cmd(IntegrateArgs {
            input: &input,
            output: &output,
            slices: slices as usize,
            mask_rate,
            patch_size,
            from,
            encoding: polarity_encoding.into(),
        }),
        Command::Saliency {
            input,
            mode,
            patch_size,
            slices,
            output,
            from,
            polarity_encoding,
        } => {
            let stream = commands::load_stream(&input, from, polarity_encoding.into())?;
            let report = commands::saliency_report(&stream, mode, patch_size, slices as usize)?;
            match output {
                Some(path) => std::fs::write(&path, report)
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display()))),
                None => {
                    std::io::stdout().write_all(report.as_bytes())?;
                    Ok(())
                }
            }
        }
        Command::Convert {
            input,
            output,
            from,
            to,
            polarity_encoding,
        } => commands::convert(&input, &output, from, to, polarity_encoding.into()),
        Command::Bench {
            input,
            ops,
            repeat,
            events,
            slices,
        } => {
            let ops = bench::parse_ops(&ops)?;
            let (stream, source) = match input {
                Some(path) => (
                    commands::load_stream(&path, None, eventaug::PolarityEncoding::NegOneOne)?,
                    path.display().to_string(),
                ),
                None => (bench::synthetic_stream(events), "synthetic".to_string()),
            };
            let records = bench::run(&stream, source, &ops, repeat as usize, slices)?;
            let mut out = std::io::stdout().lock();
            for r in records {
                writeln!(out, "{}", serde_json::to_string(&r).expect("record serializes"))?;
            }
            Ok(())
        }
    }
}
