//! `uaqa`: command-line front end for the umbilical-artery Doppler guidance
//! and quality-assessment pipelines.

mod commands;
mod config;
mod imgio;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{EvalArgs, RunContext};

/// A fatal error with its process exit code: configuration problems exit
/// with 2, I/O problems with 3. Per-image failures are reported inline and
/// exit with 0.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
}

#[derive(Parser)]
#[command(
    name = "uaqa",
    version,
    about = "Umbilical-artery Doppler guidance and quality assessment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; omitted sections fall back to defaults
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for reports and generated files (default: stdout)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Write overlay images next to the reports (requires --out)
    #[arg(long)]
    overlay: bool,
    /// Worker count: 1 = sequential, 0 = all cores
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

impl Common {
    fn context(&self) -> Result<RunContext, CliError> {
        RunContext::new(
            self.config.as_deref(),
            self.out.clone(),
            self.overlay,
            self.jobs,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Locate the probe apex in color-Doppler frames
    Probe {
        #[arg(value_name = "IMAGE", required = false)]
        images: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Insonation angles for annotated gates on one frame
    Angle {
        #[arg(value_name = "IMAGE")]
        image: PathBuf,
        /// LabelMe-style JSON with gate rectangles and vessel lines
        #[arg(long, value_name = "JSON")]
        annotations: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Assess pulsed-Doppler spectrum quality
    Spectrum {
        #[arg(value_name = "IMAGE", required = false)]
        images: Vec<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sensitivity and angle-error curves from gate CSV files
    Eval {
        /// Ground-truth gates (x_center,y_center,angle_deg,score)
        #[arg(long, value_name = "CSV")]
        gt: PathBuf,
        /// Predicted gates, same format
        #[arg(long, value_name = "CSV")]
        pred: PathBuf,
        /// Smallest match threshold in pixels
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        /// Largest match threshold in pixels
        #[arg(long, default_value_t = 50)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        n_step: u32,
        /// Also render the curves as eval.png (requires --out)
        #[arg(long)]
        plot: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate synthetic fixtures from a JSON spec file
    Synth {
        #[arg(value_name = "SPEC")]
        spec: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Probe { images, common } => {
            let ctx = common.context()?;
            commands::probe_cmd(&ctx, images)
        }
        Command::Angle {
            image,
            annotations,
            common,
        } => {
            let ctx = common.context()?;
            commands::angle_cmd(&ctx, image, &annotations)
        }
        Command::Spectrum { images, common } => {
            let ctx = common.context()?;
            commands::spectrum_cmd(&ctx, images)
        }
        Command::Eval {
            gt,
            pred,
            n_min,
            n_max,
            n_step,
            plot,
            common,
        } => {
            let ctx = common.context()?;
            commands::eval_cmd(
                &ctx,
                &EvalArgs {
                    gt,
                    pred,
                    n_min,
                    n_max,
                    n_step,
                    plot,
                },
            )
        }
        Command::Synth { spec, common } => {
            let ctx = common.context()?;
            commands::synth_cmd(&ctx, &spec)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(3)
        }
    }
}
