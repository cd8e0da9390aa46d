use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use horncat::{
    check_model_text, load_and_preprocess, render_verdict, run_corpus, solve, RunConfig,
};
use horncat_core::frontend::emit_script;
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "horncat", version, about = "Regular invariants for Horn clauses over algebraic data types")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a script: prints sat, unsat or unknown on the first line.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
        /// Write the model and automata here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the preprocessed clauses as a script.
        #[arg(long)]
        emit_preprocessed: Option<PathBuf>,
        /// Write the refutation here instead of stdout.
        #[arg(long)]
        emit_derivation: Option<PathBuf>,
    },
    /// Print the constraint-free system produced by preprocessing.
    Preprocess { file: PathBuf },
    /// Check a model file (as printed by `solve`) against a script.
    CheckModel {
        file: PathBuf,
        model: PathBuf,
        #[arg(long, default_value_t = 4)]
        check_height: usize,
    },
    /// Solve every script in a directory and compare with `.expected` files.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
}

#[derive(Args)]
struct Tuning {
    /// Largest total domain size tried by the model finder.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    max_card: u64,
    /// Largest term height used by the refuter.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    refute_height: u64,
    /// Term height for the Herbrand check of a model.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    check_height: u64,
    /// Overall time limit in seconds.
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Tuning {
    fn config(&self, input: &Path) -> RunConfig {
        RunConfig {
            max_card: self.max_card as usize,
            refute_height: self.refute_height as usize,
            check_height: self.check_height as usize,
            timeout: Duration::from_secs(self.timeout),
            seed: self.seed,
            ..RunConfig::new(input)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            file,
            tuning,
            out,
            emit_preprocessed,
            emit_derivation,
        } => {
            let config = RunConfig {
                out,
                emit_preprocessed,
                emit_derivation,
                ..tuning.config(&file)
            };
            let output = solve(&config)?;
            let rendered = render_verdict(&output, &config);
            for (path, text) in &rendered.files {
                write(path, text)?;
            }
            print!("{}", rendered.stdout);
            Ok(rendered.exit_code as u8)
        }
        Command::Preprocess { file } => {
            let prepared = load_and_preprocess(&read(&file)?)?;
            eprint!("{}", prepared.report);
            print!("{}", emit_script(&prepared.preprocessed));
            Ok(0)
        }
        Command::CheckModel {
            file,
            model,
            check_height,
        } => {
            let prepared = load_and_preprocess(&read(&file)?)?;
            let check = check_model_text(&prepared, &read(&model)?, check_height)?;
            print!("{check}");
            Ok(if check.passed() { 0 } else { 1 })
        }
        Command::Corpus { dir, tuning } => {
            let summary = run_corpus(&dir, &tuning.config(&dir))?;
            print!("{summary}");
            Ok(if summary.mismatches() == 0 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("HORNCAT_LOG").unwrap_or_else(|_| EnvFilter::new("warn")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
