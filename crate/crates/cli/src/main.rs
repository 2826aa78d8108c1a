mod commands;
mod config;
mod sweep;

use clap::{Parser, Subcommand};
use commands::{Family, Flavor, Status, TwoModeArgs};
use config::{Overrides, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use sweep::{Grid, SweepArgs, SweepKind};

/// Gaussian channel toolkit: validation, dilation, composition and
/// degradability classification at the covariance-matrix level.
#[derive(Parser, Debug)]
#[command(name = "gcl", version)]
struct Cli {
    /// PSD tolerance (overrides the run config).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized steps.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a channel, state or dilation file.
    Validate {
        /// Input file, or `-` for standard input.
        file: String,
    },
    /// Build a unitary dilation of a channel.
    Dilate {
        file: String,
        #[arg(long, value_enum, default_value = "pure")]
        flavor: Flavor,
    },
    /// Degradability verdict for a channel file or a two-mode canonical form.
    Classify {
        #[arg(required_unless_present = "two_mode", conflicts_with = "two_mode")]
        file: Option<String>,
        #[arg(long = "two-mode", value_enum, ignore_case = true)]
        two_mode: Option<Family>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        a: f64,
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Thermal environment occupation.
        #[arg(long = "N", alias = "occupation", default_value_t = 0.0)]
        occupation: f64,
    },
    /// Parameter sweeps as CSV.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        /// Grid over a, `start:stop:step`.
        #[arg(long = "a-grid")]
        a_grid: Option<Grid>,
        #[arg(long = "b-grid")]
        b_grid: Option<Grid>,
        #[arg(long = "x-grid")]
        x_grid: Option<Grid>,
        #[arg(long = "z-grid")]
        z_grid: Option<Grid>,
        /// Fixed a for fig2 and fig3.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        /// Draws per composition-table cell.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Compose two channels, `first` applied before `second`.
    Compose { first: String, second: String },
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let config = RunConfig::load(&Overrides {
        tol: cli.tol,
        seed: cli.seed,
        out: cli.out,
    })?;
    config.install()?;
    match cli.command {
        Command::Validate { file } => commands::validate(&config, &file),
        Command::Dilate { file, flavor } => commands::dilate(&config, &file, flavor),
        Command::Classify {
            file,
            two_mode,
            a,
            b,
            occupation,
        } => match (two_mode, file) {
            (Some(family), _) => commands::classify_two_mode(
                &config,
                &TwoModeArgs {
                    family,
                    a,
                    b,
                    occupation,
                },
            ),
            (None, Some(file)) => commands::classify_file(&config, &file),
            (None, None) => anyhow::bail!("classify needs a file or --two-mode"),
        },
        Command::Sweep {
            kind,
            a_grid,
            b_grid,
            x_grid,
            z_grid,
            a,
            samples,
        } => {
            let args = SweepArgs {
                kind,
                a_grid,
                b_grid,
                x_grid,
                z_grid,
                a,
                samples,
            };
            let (status, text) = sweep::run(&config, &args)?;
            commands::emit(config.output_path.as_deref(), &text)?;
            Ok(status)
        }
        Command::Compose { first, second } => commands::compose_files(&config, &first, &second),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::ValidationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
