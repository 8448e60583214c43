use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vnlab_core::config::{parse_config, parse_suites, Format, RunConfig};
use vnlab_core::runner::{oracle, run, OracleOp};

/// Verification suites for moduli spaces of sheaves on finite-dimensional
/// von Neumann algebras.
#[derive(Parser)]
#[command(name = "vnlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites described by a config file.
    Run {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated subset of monoid,poset,sheaf,complete,wedge-vee,cone.
        #[arg(long)]
        suites: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
    },
    /// Answer a single meet, join or sum query.
    Oracle {
        #[arg(value_enum)]
        op: Op,
        #[arg(long)]
        input: PathBuf,
        /// Elements separated by ';', e.g. "2,1;1,3".
        #[arg(long)]
        elems: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Meet,
    Join,
    Add,
}

fn usage(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("vnlab: {message}");
    ExitCode::from(2)
}

fn load(path: &Path) -> Result<RunConfig, ExitCode> {
    parse_config(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            input,
            suites,
            seed,
            format,
        } => {
            let mut config = match load(&input) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(s) = suites {
                match parse_suites(&s) {
                    Ok(list) => config.suites = list,
                    Err(e) => return usage(e),
                }
            }
            if let Some(s) = seed {
                config.seed = s;
            }
            if let Some(f) = format {
                config.format = match f {
                    OutputFormat::Text => Format::Text,
                    OutputFormat::Tsv => Format::Tsv,
                };
            }
            match run(&config) {
                Ok(out) => {
                    print!("{}", out.render(config.format));
                    ExitCode::from(out.exit_code() as u8)
                }
                Err(e) => usage(e),
            }
        }
        Command::Oracle { op, input, elems } => {
            let config = match load(&input) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let op = match op {
                Op::Meet => OracleOp::Meet,
                Op::Join => OracleOp::Join,
                Op::Add => OracleOp::Add,
            };
            match oracle(&config, op, &elems) {
                Ok(answer) => {
                    println!("{answer}");
                    ExitCode::SUCCESS
                }
                Err(e) => usage(e),
            }
        }
    }
}
