//! `fdirlab`: generate telemetry, train and evaluate the detector, tune the
//! persistency chain and replay reactions.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 invalid or mismatched
//! data, 4 release requirements not met, 1 anything else.

mod cmd;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fdirlab", version, about = "Onboard fault detection lab: CNN failure indices through a PUS persistency chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize trajectories with injected stuck-value faults.
    Generate(cmd::generate::Args),
    /// Fit the scaler and train the classifier.
    Train(cmd::train::Args),
    /// Score a model: detection and system metrics, histograms, reactions.
    Evaluate(cmd::evaluate::Args),
    /// Grid search, persistency sweep, double-check and freeze.
    Tune(cmd::tune::Args),
    /// Replay a model's predictions through the chain into a reaction log.
    Simulate(cmd::evaluate::SimulateArgs),
    /// Compare the robust and standard scalers on a dataset.
    Report(cmd::report::Args),
    /// Repeat the run recorded in a `manifest.toml`.
    Rerun {
        /// Manifest file or the directory holding it.
        #[arg(long)]
        manifest: std::path::PathBuf,
        /// Write to this directory instead of the recorded one.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Category {
    Other = 1,
    Config = 2,
    Data = 3,
    Requirements = 4,
}

fn category(err: &anyhow::Error) -> Category {
    use fdirlab::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Config { .. } => Category::Config,
                E::Data(_) | E::Shape(_) | E::Format { .. } | E::OutOfOrder { .. } => Category::Data,
                E::Requirements(_) => Category::Requirements,
                E::Io { .. } | E::Serde(_) => Category::Other,
            };
        }
    }
    Category::Other
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd::generate::run(a),
        Command::Train(a) => cmd::train::run(a),
        Command::Evaluate(a) => cmd::evaluate::run(a),
        Command::Tune(a) => cmd::tune::run(a),
        Command::Simulate(a) => cmd::evaluate::simulate(a),
        Command::Report(a) => cmd::report::run(a),
        Command::Rerun { manifest, out } => {
            let recorded = manifest::read_manifest(manifest)?;
            let args = manifest::rerun_args(&recorded, out.as_deref());
            let cli = Cli::try_parse_from(std::iter::once("fdirlab".to_string()).chain(args.clone())).map_err(|e| {
                fdirlab::Error::Config {
                    field: "manifest.args",
                    reason: e.to_string(),
                }
            })?;
            if matches!(cli.command, Command::Rerun { .. }) {
                anyhow::bail!("a manifest cannot record another rerun");
            }
            manifest::set_invocation(args);
            run(&cli)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let c = category(&e);
            let label = match c {
                Category::Config => "config",
                Category::Data => "data",
                Category::Requirements => "requirements",
                Category::Other => "error",
            };
            eprintln!("fdirlab: {label}: {e:#}");
            ExitCode::from(c as u8)
        }
    }
}
