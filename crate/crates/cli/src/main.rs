use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sdof_cli::{run_file, schema_text, EXIT_USAGE};
use sdof_core::analysis::{sdof_formula_with_csit, SdofQuery};

#[derive(Parser)]
#[command(name = "sdof", version, about = "Secure degrees of freedom experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// `--key=value` overrides of config entries.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Print the config schema.
    Schema,
    /// Print s.d.o.f. with and without eavesdropper CSIT.
    Formulas {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long = "K")]
        k: Option<u32>,
        #[arg(long = "M")]
        m: Option<u32>,
        #[arg(long = "m_informed")]
        m_informed: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Model {
    Helper,
    Mac,
    MacPartial,
    Interference,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn limit_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SDOF_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SDOF_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn formulas(model: Model, k: Option<u32>, m: Option<u32>, m_informed: Option<u32>) -> ExitCode {
    let need_k = || k.ok_or("--K is required for this model");
    let query = match model {
        Model::Helper => m.ok_or("--M is required for the helper model").map(|helpers| SdofQuery::Helper { helpers }),
        Model::Mac => need_k().map(|users| SdofQuery::Mac { users }),
        Model::Interference => need_k().map(|users| SdofQuery::Interference { users }),
        Model::MacPartial => need_k().and_then(|users| {
            m_informed
                .ok_or("--m_informed is required for mac_partial")
                .map(|m_informed| SdofQuery::MacPartial { users, m_informed })
        }),
    };
    match query.map_err(str::to_string).and_then(|q| sdof_formula_with_csit(q).map_err(|e| e.to_string())) {
        Ok(c) => {
            println!("{}", serde_json::to_string_pretty(&c).expect("comparison serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => usage(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = limit_threads() {
        return usage(e);
    }
    match cli.command {
        Command::Schema => {
            print!("{}", schema_text());
            ExitCode::SUCCESS
        }
        Command::Formulas { model, k, m, m_informed } => formulas(model, k, m, m_informed),
        Command::Run { config, overrides } => {
            let status = run_file(&config, &overrides);
            if status.code == EXIT_USAGE {
                return usage(status.message);
            }
            if let Some(outcome) = &status.outcome {
                for a in &outcome.assertions {
                    println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
                }
            }
            eprintln!("{}", status.message);
            ExitCode::from(status.code as u8)
        }
    }
}
