use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mcav",
    version,
    about = "Membrane-in-the-middle cavity modelling and fitting"
)]
pub struct Cli {
    /// Flat key=value configuration file (SI units)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the CSV table here instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Seed for synthetic noise
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    pub seed: u64,

    /// Log progress to standard error
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Drum-mode frequencies sorted by frequency
    Modes(ModesArgs),
    /// Point and Gaussian-readout effective masses of the (0,n) modes
    Effmass(EffmassArgs),
    /// Finesse and resonance shift against membrane position
    Scan(ScanArgs),
    /// Fit absorption and optical roughness to a finesse scan
    FinesseFit(DataArgs),
    /// Fit an optical or mechanical ringdown trace
    Ringdown(RingdownArgs),
    /// Synthesise a thermal displacement spectrum
    Psd(PsdArgs),
    /// Extrapolate the base frequency from measured modes
    FitF0(DataArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Modes(_) => "modes",
            Command::Effmass(_) => "effmass",
            Command::Scan(_) => "scan",
            Command::FinesseFit(_) => "finesse-fit",
            Command::Ringdown(_) => "ringdown",
            Command::Psd(_) => "psd",
            Command::FitF0(_) => "fit-f0",
        }
    }
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    /// Highest number of nodal diameters
    #[arg(long, default_value_t = 3)]
    pub max_m: u32,
    /// Highest number of nodal circles
    #[arg(long, default_value_t = 3)]
    pub max_n: u32,
}

#[derive(Debug, Args)]
pub struct EffmassArgs {
    /// Gaussian readout waist in m; point readout only when absent
    #[arg(long, value_name = "M")]
    pub w: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub n_max: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// First membrane position from the cavity centre in m
    #[arg(long, allow_hyphen_values = true)]
    pub z_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z_max: f64,
    #[arg(long)]
    pub z_steps: usize,
    /// Relative 1-sigma multiplicative noise added to the finesse
    #[arg(long, value_name = "FRACTION")]
    pub noise: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV
    pub data: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RingdownMode {
    /// Intracavity light: reports the finesse
    Optical,
    /// Membrane amplitude: reports the quality factor
    Mechanical,
}

#[derive(Debug, Args)]
pub struct RingdownArgs {
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub mode: RingdownMode,
    /// Mode frequency in Hz, overriding ringdown.frequency_hz
    #[arg(long, value_name = "HZ")]
    pub frequency: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PsdArgs {
    /// Radial indices n of the (0,n) modes, e.g. 1,2,3
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub modes: Vec<String>,
    /// Quality factor, one for all modes or one per mode
    #[arg(long, value_delimiter = ',', default_value = "1e6")]
    pub q: Vec<f64>,
    /// Frequency grid START:STOP:COUNT in Hz
    #[arg(long, value_name = "START:STOP:COUNT")]
    pub grid: String,
}
