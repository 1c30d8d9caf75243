mod commands;
mod experiment;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mechent_core::error::ErrorClass;
use mechent_core::model::DeviceConfig;

#[derive(Parser, Debug)]
#[command(name = "mechent", version, about = "Electromechanical entanglement source: model, metrics and virtual lab")]
pub struct Cli {
    /// Device configuration file (`key = value` lines); built-in defaults if omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Master seed for every random stage.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output file (experiment: output directory). Standard output if omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Entanglement metrics of a covariance-matrix file or of the device's filtered output.
    Metrics(MetricsArgs),
    /// Red-pump power sweep at fixed blue pump.
    Sweep(SweepArgs),
    /// EPR variances versus mode-1 detector angle.
    Angle(AngleArgs),
    /// Full synthetic pipeline: model, calibration, sampling, estimation, histograms.
    Experiment(ExperimentArgs),
    /// Fit detection-chain gain and added noise from calibration data.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Covariance-matrix JSON (`{"v": [[..]], "convention": "half"}`).
    #[arg(long)]
    pub cm: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// First red-pump power (dBm).
    #[arg(long, default_value_t = -90.0, allow_negative_numbers = true)]
    pub from: f64,
    /// Last red-pump power (dBm), inclusive.
    #[arg(long, default_value_t = -76.0, allow_negative_numbers = true)]
    pub to: f64,
    /// Grid step (dB).
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Explicit comma-separated grid; overrides --from/--to/--step.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
pub struct AngleArgs {
    /// Covariance-matrix JSON; the device's filtered output if omitted.
    #[arg(long)]
    pub cm: Option<PathBuf>,
    /// Number of angles in [0, 2π).
    #[arg(long, default_value_t = 360)]
    pub n_angles: usize,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// Samples with the pumps on.
    #[arg(long, default_value_t = 216_000)]
    pub n_on: usize,
    /// Samples with the pumps off.
    #[arg(long, default_value_t = 604_800)]
    pub n_off: usize,
    /// Histogram bins per axis.
    #[arg(long, default_value_t = mechent_core::lab::DEFAULT_BINS)]
    pub bins: usize,
    /// Also export both batches as CSV (quadratures and voltages).
    #[arg(long)]
    pub csv_batches: bool,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Calibration CSV (`temp_k,noise_v2hz,sigma`); synthetic sweeps of both channels if omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Channel whose carrier frequency applies to --input.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub channel: u8,
}

/// A failed stage; `class` picks the exit code.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub class: ErrorClass,
    pub message: String,
}

pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T> Stage<T> for mechent_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure { stage, class: e.class(), message: e.to_string() })
    }
}

impl<T> Stage<T> for std::io::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure { stage, class: ErrorClass::Input, message: e.to_string() })
    }
}

impl<T> Stage<T> for serde_json::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure { stage, class: ErrorClass::Input, message: e.to_string() })
    }
}

pub fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 1,
        ErrorClass::Domain => 2,
        ErrorClass::Numeric => 3,
    }
}

pub fn load_config(cli: &Cli) -> Result<DeviceConfig, Failure> {
    match &cli.config {
        Some(p) => DeviceConfig::from_path(p).stage("config"),
        None => Ok(DeviceConfig::default()),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Metrics(a) => commands::metrics(cli, a),
        Command::Sweep(a) => commands::sweep(cli, a),
        Command::Angle(a) => commands::angle(cli, a),
        Command::Experiment(a) => experiment::run(cli, a),
        Command::Calibrate(a) => commands::calibrate(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let reason = serde_json::json!({
                "error": f.message,
                "stage": f.stage,
                "class": format!("{:?}", f.class).to_lowercase(),
            });
            eprintln!("{reason}");
            ExitCode::from(exit_code(f.class))
        }
    }
}
