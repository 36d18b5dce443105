use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod demo;
mod plot;

/// Interaction-free measurement and imaging simulator.
#[derive(Debug, Parser)]
#[command(name = "ifimage", version)]
struct Cli {
    /// Directory that relative output paths are written into.
    #[arg(long, global = true, env = "IFIMAGE_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a raster scan described by a config file.
    Scan {
        config: PathBuf,
        #[arg(short, long, default_value = "scan.csv")]
        output: PathBuf,
        /// Also write an SVG next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Tabulate P_ifm and efficiency against reflectance.
    Sweep(SweepArgs),
    /// Count single-photon outcomes.
    Mc {
        config: PathBuf,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        shards: Option<u64>,
        /// Write the tally here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract widths, knife-edge resolution or phase from a scan CSV.
    Analyze {
        scan: PathBuf,
        #[arg(long, value_enum)]
        kind: AnalysisKind,
        #[arg(long, value_enum, default_value_t = ChannelArg::Both)]
        channel: ChannelArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Predict the focal spot size of an apertured Gaussian beam.
    Spot {
        #[arg(long)]
        wavelength_nm: f64,
        #[arg(long)]
        focal_mm: f64,
        #[arg(long)]
        aperture_mm: f64,
        #[arg(long)]
        beam_mm: f64,
    },
    /// Regenerate the reference scans, sweeps and width table.
    Demo {
        #[arg(default_value = "demo")]
        dir: PathBuf,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 19)]
    points: usize,
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    #[arg(long, default_value_t = 0.95)]
    r_max: f64,
    #[arg(short, long, default_value = "sweep.csv")]
    output: PathBuf,
    #[arg(long)]
    plot: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AnalysisKind {
    Width,
    Edge,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    Transmission,
    Ifm,
    Both,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad config, arguments or input data.
    Usage(String),
    Io(String),
    /// The analysis could not extract the requested quantity.
    Analysis(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Analysis(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Analysis(m) => m,
        }
    }
}

impl From<ifimage_core::Error> for CliError {
    fn from(e: ifimage_core::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else if e.is_analysis() {
            CliError::Analysis(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

/// Attach a path to an IO error.
pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub struct Output {
    dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Output { dir }
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        match &self.dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    pub fn write(&self, path: &Path, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
        let path = self.resolve(path);
        self.ensure_parent(&path)?;
        std::fs::write(&path, contents).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn ensure_parent(&self, path: &Path) -> Result<(), CliError> {
        match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => std::fs::create_dir_all(p).map_err(io_err(p)),
            _ => Ok(()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = Output::new(cli.output_dir);
    match cli.command {
        Command::Scan { config, output, plot } => commands::scan(&out, &config, &output, plot),
        Command::Sweep(a) => commands::sweep(&out, a.eps, a.points, a.r_min, a.r_max, &a.output, a.plot),
        Command::Mc {
            config,
            n,
            seed,
            shards,
            output,
        } => commands::mc(&out, &config, n, seed, shards, output.as_deref()),
        Command::Analyze {
            scan,
            kind,
            channel,
            output,
        } => commands::analyze(&out, &scan, kind, channel, output.as_deref()),
        Command::Spot {
            wavelength_nm,
            focal_mm,
            aperture_mm,
            beam_mm,
        } => commands::spot(wavelength_nm, focal_mm, aperture_mm, beam_mm),
        Command::Demo { dir } => demo::run(&out, &dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
