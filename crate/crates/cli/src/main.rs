use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaoi_cli::{cmd_entropy_rate, cmd_simulate, cmd_verify, load_config, preset, CliError, Experiment, Theorem};

#[derive(Parser)]
#[command(name = "gaoi", version, about = "Age and generalized age of information simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// TOML experiment file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment: fig5, fig5-fast or fig6.
    #[arg(long)]
    preset: Option<String>,
    /// Overrides the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured number of paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl Source {
    fn load(&self) -> Result<Experiment, CliError> {
        let exp = match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if self.paths == Some(0) || self.threads == Some(0) {
            return Err(CliError::Config("--paths and --threads must be positive".into()));
        }
        Ok(exp.with_overrides(self.seed, self.paths))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the entropy rate of a stationary model.
    EntropyRate {
        #[command(flatten)]
        source: Source,
    },
    /// Run the ensemble and write summary.csv and series.csv.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an identity analytically and by simulation.
    Verify {
        /// thm1 (stationary model) or thm2 (bayesian model).
        theorem: Theorem,
        #[command(flatten)]
        source: Source,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::EntropyRate { source } => {
            print!("{}", cmd_entropy_rate(&source.load()?)?);
            Ok(true)
        }
        Command::Simulate { source, out } => {
            print!("{}", cmd_simulate(&source.load()?, &out, source.threads)?);
            Ok(true)
        }
        Command::Verify { theorem, source } => {
            let report = cmd_verify(theorem, &source.load()?, source.threads)?;
            print!("{}", report.text);
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("gaoi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
