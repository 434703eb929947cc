//! `unimag` command line: scenario execution and method comparison.
//!
//! Exit codes: 0 success, 2 config validation failure, 3 numerical failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use unimag::config::{build_scenario, ConfigError, OutputFormat, RunConfig, Scenario};
use unimag::dyson::Method;
use unimag::runner::{
    compare_scenario, render_run, run_scenario, write_compare_csv, write_compare_json,
};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "unimag",
    version,
    about = "Unitarized Magnus/Dyson propagation scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the configured scenario and write one row per output node.
    Run {
        /// Path to the JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the output path from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the output format from the config (csv or json).
        #[arg(long)]
        format: Option<String>,
    },
    /// Run several methods on one scenario and tabulate terminal fidelity,
    /// max unitarity defect and wall time.
    Compare {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated method list, e.g. oracle,unitarized_exact.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
}

fn parse_format(s: &str) -> Result<OutputFormat, ConfigError> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(ConfigError::Invalid {
            field: "output.format".to_string(),
            message: format!("unknown format '{other}' (expected csv or json)"),
        }),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let mut config = RunConfig::from_file(&path.display().to_string())?;
    if let Ok(value) = std::env::var("UNIMAG_SEED") {
        let seed = value.parse::<u64>().map_err(|_| ConfigError::Invalid {
            field: "UNIMAG_SEED".to_string(),
            message: format!("'{value}' is not a valid unsigned integer seed"),
        })?;
        config.override_seed(seed);
    }
    build_scenario(config)
}

fn write_file(path: &str, bytes: &[u8]) -> std::io::Result<()> {
    std::fs::write(path, bytes)
}

fn run_command(
    config: PathBuf,
    out: Option<PathBuf>,
    format: Option<String>,
) -> Result<(), ExitCode> {
    let scenario = load_scenario(&config).map_err(config_failure)?;
    let fmt = match format {
        Some(s) => parse_format(&s).map_err(config_failure)?,
        None => scenario.config.output.format,
    };
    let path = out
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| scenario.config.output.path.clone());
    let result = run_scenario(&scenario).map_err(numerical_failure)?;
    let bytes = render_run(&result, fmt).map_err(io_failure)?;
    write_file(&path, &bytes).map_err(io_failure)?;
    Ok(())
}

fn compare_command(
    config: PathBuf,
    methods: Vec<String>,
    out: Option<PathBuf>,
    format: Option<String>,
) -> Result<(), ExitCode> {
    if methods.len() < 2 {
        eprintln!("error: field methods: compare needs at least 2 methods");
        return Err(ExitCode::from(EXIT_CONFIG));
    }
    let parsed: Vec<Method> = methods
        .iter()
        .map(|m| m.parse::<Method>())
        .collect::<Result<_, _>>()
        .map_err(|e| {
            eprintln!("error: field methods: {e}");
            ExitCode::from(EXIT_CONFIG)
        })?;
    let scenario = load_scenario(&config).map_err(config_failure)?;
    let fmt = match format {
        Some(s) => parse_format(&s).map_err(config_failure)?,
        None => scenario.config.output.format,
    };
    let path = out
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| scenario.config.output.path.clone());
    let rows = compare_scenario(&scenario, &parsed).map_err(numerical_failure)?;
    let mut buf = Vec::new();
    let res = match fmt {
        OutputFormat::Csv => write_compare_csv(&rows, &mut buf),
        OutputFormat::Json => write_compare_json(&rows, &mut buf),
    };
    res.map_err(io_failure)?;
    write_file(&path, &buf).map_err(io_failure)?;
    Ok(())
}

fn config_failure(e: ConfigError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_CONFIG)
}

fn numerical_failure(e: unimag::runner::RunnerError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_NUMERICAL)
}

fn io_failure(e: std::io::Error) -> ExitCode {
    eprintln!("error: cannot write output: {e}");
    ExitCode::from(EXIT_NUMERICAL)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            format,
        } => run_command(config, out, format),
        Command::Compare {
            config,
            methods,
            out,
            format,
        } => compare_command(config, methods, out, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
