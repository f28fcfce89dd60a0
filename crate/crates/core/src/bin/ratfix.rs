use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ratfix::config::parse_config;
use ratfix::report::Subcommand;
use ratfix::run::{error_exit_code, run};
use ratfix::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Certify contraction constants over the configured pairs.
    Certify,
    /// Run Picard iteration with a priori bounds.
    Solve,
    /// Compare F(S) with F(S^n) and list periodic points.
    PropertyP,
    /// Search for a Cauchy-violation witness.
    Witness,
}

/// Fixed-point analysis for rational-type contractions.
#[derive(Debug, Parser)]
#[command(name = "ratfix", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write the JSON report here; the human report then goes to stdout
    /// instead of stderr.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the human-readable report.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ratfix: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<i32, Error> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| Error::Config {
        field: "--config".into(),
        message: format!("cannot read {}: {e}", cli.config.display()),
    })?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let sub = match cli.command {
        Command::Certify => Subcommand::Certify,
        Command::Solve => Subcommand::Solve,
        Command::PropertyP => Subcommand::PropertyP,
        Command::Witness => Subcommand::Witness,
    };
    let report = run(&config, sub)?;

    let json = report.to_json();
    match &cli.out {
        Some(path) => {
            std::fs::write(path, json)
                .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?;
            if !cli.quiet {
                print!("{}", report.to_text());
            }
        }
        None => {
            print!("{json}");
            if !cli.quiet {
                eprint!("{}", report.to_text());
            }
        }
    }
    Ok(report.exit_code)
}
