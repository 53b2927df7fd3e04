mod args;
mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, CommandKind, Format, Options};
use commands::Outcome;
use error::{CliError, CliResult};

/// Version of the report layout described in `schema/report.schema.json`.
const SCHEMA_VERSION: &str = "1.0";

#[derive(Serialize)]
struct Report<'a> {
    schema_version: &'static str,
    command: CommandKind,
    config: &'a Options,
    seed: Option<u64>,
    result: serde_json::Value,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    schema_version: &'static str,
    command: CommandKind,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
}

fn render(kind: CommandKind, o: &Options, out: Outcome) -> CliResult<Vec<u8>> {
    match o.format {
        Format::Json => {
            let report = Report {
                schema_version: SCHEMA_VERSION,
                command: kind,
                config: o,
                seed: o.seed,
                result: out.result,
            };
            let mut bytes = serde_json::to_vec_pretty(&report)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let table = out
                .table
                .ok_or_else(|| CliError::Config("this command has no tabular output; use --format json".into()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.into_inner().map_err(|e| CliError::Io {
                path: "<buffer>".into(),
                source: e.into_error(),
            })
        }
    }
}

fn execute(kind: CommandKind, o: &Options) -> CliResult<()> {
    let out = commands::run(kind, o)?;
    let bytes = render(kind, o, out)?;
    match &o.output {
        Some(path) => std::fs::write(path, &bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout().write_all(&bytes).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn main() -> ExitCode {
    let (kind, options) = Cli::parse().command.split();
    match execute(kind, &options) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("colorcover: {e}");
            let record = ErrorRecord {
                schema_version: SCHEMA_VERSION,
                command: kind,
                error: ErrorBody {
                    kind: e.kind(),
                    message: e.to_string(),
                },
            };
            println!("{}", serde_json::to_string(&record).expect("error record serializes"));
            ExitCode::from(1)
        }
    }
}
