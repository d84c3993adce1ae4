//! Front end for the `deconv` binary.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use deconv_core::models::DensityModel;

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod presets;
pub mod scenario;

use commands::ErrorSource;
use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "deconv", version, about = "Spectral cut-off density deconvolution")]
pub struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Source {
    /// Key=value configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration (see `deconv presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Overrides `schedule.seed`; applied before hashing.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Deconvolve a sample of Y.
    Estimate {
        #[command(flatten)]
        source: Source,
        /// Observations, one per line.
        #[arg(long)]
        y: PathBuf,
        /// Independent draws of the error.
        #[arg(long, required_unless_present = "known_eps", conflicts_with = "known_eps")]
        eps: Option<PathBuf>,
        /// Error density by name, e.g. `gaussian(1)`.
        #[arg(long)]
        known_eps: Option<DensityModel>,
    },
    /// Monte Carlo risk over a sample-size schedule.
    Simulate {
        #[command(flatten)]
        source: Source,
    },
    /// Bias and moment audits.
    Audit {
        #[command(flatten)]
        source: Source,
    },
    /// Plot-ready series from an emitted report.
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        svg: bool,
    },
    /// List built-in configurations.
    Presets {
        /// Print one preset instead of the list.
        name: Option<String>,
    },
}

fn load(source: &Source) -> Result<Config, CliError> {
    let mut c = match (&source.config, &source.preset) {
        (Some(path), None) => Config::parse(&fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?)?,
        (None, Some(name)) => Config::parse(
            presets::preset(name).ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`")))?,
        )?,
        _ => return Err(CliError::Usage("give exactly one of --config or --preset".into())),
    };
    if let Some(seed) = source.seed {
        c.set("schedule", "seed", seed.to_string())?;
    }
    Ok(c)
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Estimate { source, y, eps, known_eps } => {
            let c = load(&source)?;
            let eps = match (known_eps, &eps) {
                (Some(model), _) => ErrorSource::Known(model),
                (None, Some(path)) => ErrorSource::Sample(path),
                (None, None) => return Err(CliError::Usage("give --eps or --known-eps".into())),
            };
            commands::estimate(&c, &y, eps, &source.out_dir)
        }
        Command::Simulate { source } => commands::simulate(&load(&source)?, &source.out_dir),
        Command::Audit { source } => commands::audit(&load(&source)?, &source.out_dir),
        Command::Plotdata { report, out_dir, svg } => commands::plotdata(&report, &out_dir, svg),
        Command::Presets { name: Some(name) } => {
            print!("{}", presets::preset(&name).ok_or_else(|| CliError::Usage(format!("unknown preset `{name}`")))?);
            Ok(())
        }
        Command::Presets { name: None } => {
            presets::names().for_each(|n| println!("{n}"));
            Ok(())
        }
    }
}

/// Parses arguments and runs one command inside a sized thread pool.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(cli.command))
}
