use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qrob_cli::{build, read_file, render, run_query, verify_document, write_file, CliError, CliResult, Query, Verified};
use qrob_core::homsearch::Budget;
use qrob_core::rational::parse_q;
use qrob_core::ring::GradedRing;

#[derive(Parser)]
#[command(name = "qrob", version, about = "Cohomological obstructions and witnesses for quasiregular curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Ring operations.
    Ring {
        #[command(subcommand)]
        command: RingCommand,
    },
    /// Basis and dimension of the degree-k layer of the Künneth ideal.
    KunnethIdeal {
        expr: String,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Full pipeline: preconditions, obstruction search, witness search.
    Check {
        expr: String,
        #[arg(long)]
        omega: String,
        #[arg(long)]
        n: usize,
        /// Comma-separated rational coefficients for enumerated generator images.
        #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
        coeff_set: String,
        /// Node cap for the enumeration.
        #[arg(long, default_value_t = 100_000)]
        enum_budget: u64,
        #[arg(long, env = "QROB_JOBS")]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
    },
    /// Re-check a verdict file, or a certificate file against a ring file.
    Verify {
        file: String,
        #[arg(long)]
        ring: Option<String>,
    },
    /// Write the ring of a manifold expression as JSON.
    Export {
        expr: String,
        #[arg(short = 'o', long = "output")]
        output: Option<String>,
    },
}

#[derive(Subcommand)]
enum RingCommand {
    /// Dimensions, labels and Poincaré pairing matrices.
    Show {
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn emit(text: &str, output: Option<&str>) -> CliResult<()> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn parse_coeffs(s: &str) -> CliResult<Vec<qrob_core::rational::Q>> {
    let coeffs = s.split(',').map(|c| parse_q(c.trim())).collect::<qrob_core::Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        return Err(CliError::Usage("empty coefficient set".into()));
    }
    Ok(coeffs)
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Ring { command: RingCommand::Show { expr, format } } => {
            let built = build(&expr)?;
            let name = built.expr.to_string();
            let text = match format {
                Format::Text => render::ring_show_text(&name, &built.ring)?,
                Format::Json => render::ring_show_json(&name, &built.ring)?,
            };
            emit(&text, None)?;
            Ok(0)
        }
        Command::KunnethIdeal { expr, k, format } => {
            let built = build(&expr)?;
            let name = built.expr.to_string();
            let text = match format {
                Format::Text => render::kunneth_text(&name, &built.ring, k)?,
                Format::Json => render::kunneth_json(&name, &built.ring, k)?,
            };
            emit(&text, None)?;
            Ok(0)
        }
        Command::Check { expr, omega, n, coeff_set, enum_budget, jobs, format, output } => {
            let query = Query {
                manifold: expr,
                omega,
                n,
                budget: Budget { coeffs: parse_coeffs(&coeff_set)?, node_cap: enum_budget },
            };
            let verdict = match jobs {
                Some(j) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(j)
                        .build()
                        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
                    pool.install(|| run_query(&query))?
                }
                None => run_query(&query)?,
            };
            let text = match format {
                Format::Json => verdict.to_json_pretty(),
                Format::Text => {
                    let ring = GradedRing::from_file(&verdict.ring)?;
                    render::verdict_text(&verdict, &ring)
                }
            };
            emit(&text, output.as_deref())?;
            Ok(verdict.verdict.exit_code())
        }
        Command::Verify { file, ring } => {
            let doc = read_file(&file)?;
            let ring = ring.as_deref().map(read_file).transpose()?;
            match verify_document(&doc, ring.as_deref())? {
                Verified::Certificate { kind, inequality } => println!("OK: {kind} certificate re-verified ({inequality})"),
                Verified::Witness => println!("OK: witness re-verified"),
                Verified::NothingToVerify(o) => {
                    println!("OK: {} verdict is consistent; no payload to verify", serde_json::to_value(o).unwrap_or_default())
                }
            }
            Ok(0)
        }
        Command::Export { expr, output } => {
            let built = build(&expr)?;
            emit(&built.ring.to_json_pretty(), output.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
