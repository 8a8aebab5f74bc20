//! `lfbgw`: analyze linear-fractional multi-type branching models.

mod commands;
mod error;
mod model_file;

use std::path::PathBuf;
use std::process::ExitCode;

use commands::{cmd_classify, cmd_iterate, cmd_limits, cmd_simulate, cmd_verify, Format, RunConfig};
use error::CliError;

const USAGE: &str = "\
usage: lfbgw <command> --model <path> [options]

commands:
  classify   classification report: criticality, recurrence, R, alpha, beta, u, v
  iterate    exact generation-law table (m^(n), g^(n), survival) for n = 1..N
  simulate   Monte-Carlo replicates with deterministic per-replicate streams
  limits     limit-law parameters and survival asymptote tables
  verify     run the identity checks against the model; exit 3 on failure

options:
  --model <path>    model file (required)
  --n <int>         horizon / table length (default 10)
  --reps <int>      simulation replicates (default 1000)
  --seed <u64>      master seed; replicate k uses stream k (default 0)
  --out <dir>       write CSV artifacts into this directory
  --tol <float>     identity tolerance for verify (default 1e-8)
  --cap <int>       population cap per replicate (default 1000000)
  --format <csv|text>  output style (default text)
  --threads <int>   worker threads for simulate (default 1)

exit codes: 0 ok, 1 validation error, 2 numeric precondition, 3 verification failure";

fn parse_args(args: &[String]) -> Result<(String, RunConfig), CliError> {
    if args.is_empty() {
        return Err(CliError::Validation(USAGE.into()));
    }
    let command = args[0].clone();
    let mut cfg = RunConfig::default();
    let mut have_model = false;
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .ok_or_else(|| CliError::Validation(format!("{flag} needs a value")))
        };
        match flag.as_str() {
            "--model" => {
                cfg.model_path = PathBuf::from(value()?);
                have_model = true;
            }
            "--n" => cfg.n = parse_num(flag, value()?)?,
            "--reps" => cfg.reps = parse_num(flag, value()?)?,
            "--seed" => cfg.seed = parse_num(flag, value()?)?,
            "--cap" => cfg.cap = parse_num(flag, value()?)?,
            "--threads" => cfg.threads = parse_num::<usize>(flag, value()?)?.max(1),
            "--tol" => {
                cfg.tol = parse_num(flag, value()?)?;
                if cfg.tol <= 0.0 {
                    return Err(CliError::Validation("--tol must be positive".into()));
                }
            }
            "--out" => cfg.out = Some(PathBuf::from(value()?)),
            "--format" => {
                cfg.format = match value()?.as_str() {
                    "csv" => Format::Csv,
                    "text" => Format::Text,
                    other => {
                        return Err(CliError::Validation(format!(
                            "--format must be csv or text, got {other}"
                        )))
                    }
                }
            }
            other => {
                return Err(CliError::Validation(format!(
                    "unknown flag {other}\n{USAGE}"
                )))
            }
        }
    }
    if !have_model {
        return Err(CliError::Validation(format!(
            "--model is required\n{USAGE}"
        )));
    }
    Ok((command, cfg))
}

fn parse_num<T: std::str::FromStr>(flag: &str, text: &String) -> Result<T, CliError> {
    text.parse()
        .map_err(|_| CliError::Validation(format!("bad value for {flag}: {text}")))
}

fn run() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.first().map(String::as_str) == Some("--help") || args.is_empty() {
        println!("{USAGE}");
        return Ok(());
    }
    let (command, cfg) = parse_args(&args)?;
    match command.as_str() {
        "classify" => cmd_classify(&cfg),
        "iterate" => cmd_iterate(&cfg),
        "simulate" => cmd_simulate(&cfg),
        "limits" => cmd_limits(&cfg),
        "verify" => cmd_verify(&cfg),
        other => Err(CliError::Validation(format!(
            "unknown command {other}\n{USAGE}"
        ))),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
