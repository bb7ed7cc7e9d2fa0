mod commands;
mod config;
mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::FileConfig;

#[derive(Parser)]
#[command(name = "farey-lab", version, about = "Farey k-indices, continuant identities and BCZ-map constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Number of chunks for parallel sums [default: $FAREY_LAB_THREADS or the core count]
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    chunks: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Also write a two-column `x y` data file
    #[arg(long, global = true)]
    plot: Option<PathBuf>,
    /// TOML file with default settings; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn positive() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Subcommand)]
enum Command {
    /// Check the k-index identities over one period of F_Q
    Verify {
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        #[arg(long, value_parser = positive())]
        k_max: Option<u64>,
    },
    /// Average of ν_k over one period of F_Q
    Avg {
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        #[arg(long, value_parser = positive())]
        k: Option<u64>,
    },
    /// Lag-h correlation of ν_2 over one period of F_Q
    Corr {
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        #[arg(long, value_parser = positive())]
        h: Option<u64>,
    },
    /// B(k) from the geometry of the BCZ map
    Constants {
        #[arg(long, value_parser = positive())]
        k: Option<u64>,
        #[arg(long, value_parser = positive())]
        kappa_max: Option<u64>,
        /// Reuse cells from this file, writing it first if needed
        #[arg(long)]
        cell_cache: Option<PathBuf>,
    },
    /// Distance of the average of ν_k to B(k) for several orders
    Conv {
        #[arg(long, value_parser = positive())]
        k: Option<u64>,
        /// Comma-separated, increasing
        #[arg(long, value_delimiter = ',', required = true, value_parser = positive())]
        orders: Vec<u64>,
        #[arg(long, value_parser = positive())]
        kappa_max: Option<u64>,
    },
    /// Compare the average of ν_3 with the lag-1 correlation and with B(3)
    B3check {
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        #[arg(long, value_parser = positive())]
        kappa_max: Option<u64>,
        /// Largest order used to calibrate the error constant
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
        calibrate_to: u64,
    },
    /// Values of ν_k: geometric measure against frequency in F_Q
    Dist {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        k: Option<u64>,
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        #[arg(long, value_parser = positive())]
        kappa_max: Option<u64>,
    },
    /// Coprime lattice points in a dilated region
    Latcount {
        #[arg(long, value_parser = positive())]
        order: Option<u64>,
        /// `triangle`, `tk:K` or `star:K`
        #[arg(long, default_value = "triangle")]
        region: String,
    },
    /// Cylinder cells of the BCZ map
    Cells {
        #[arg(long, value_parser = positive())]
        depth: Option<u64>,
        #[arg(long, value_parser = positive())]
        kappa_max: Option<u64>,
        #[arg(long)]
        cell_cache: Option<PathBuf>,
    },
}

pub enum CliError {
    Usage(String),
    Failure(String),
}

impl From<farey_lab::Error> for CliError {
    fn from(e: farey_lab::Error) -> Self {
        match e {
            farey_lab::Error::Domain(_) | farey_lab::Error::UnboundedTail(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

pub struct Settings {
    pub chunks: usize,
    pub file: FileConfig,
}

pub fn required(flag: Option<u64>, file: Option<u64>, name: &str) -> Result<u64, CliError> {
    optional(flag, file, name)?.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
}

pub fn optional(flag: Option<u64>, file: Option<u64>, name: &str) -> Result<Option<u64>, CliError> {
    match flag.or(file) {
        Some(0) => Err(CliError::Usage(format!("{name} must be positive"))),
        v => Ok(v),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Failure(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.common.config {
        Some(p) => FileConfig::load(p).map_err(CliError::Usage)?,
        None => FileConfig::default(),
    };
    let chunks = match cli.common.chunks.map(|c| c as usize).or(file.chunks) {
        Some(0) => return Err(CliError::Usage("chunks must be positive".into())),
        Some(c) => c,
        None => config::default_chunks().map_err(CliError::Usage)?,
    };
    let format = match (cli.common.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, None) | (None, Some("csv")) => Format::Csv,
        (None, Some("json")) => Format::Json,
        (None, Some(other)) => return Err(CliError::Usage(format!("unknown format {other:?}"))),
    };
    let output = cli.common.output.clone().or(file.output.clone());
    let plot = cli.common.plot.clone().or(file.plot.clone());
    let settings = Settings { chunks, file };

    let result = commands::dispatch(cli.command, &settings)?;
    if plot.is_some() && result.series.is_none() {
        return Err(CliError::Usage("this command has no plot series".into()));
    }

    let mut out = open_output(&output)?;
    let io = |e: std::io::Error| CliError::Failure(e.to_string());
    match format {
        Format::Csv => result
            .table
            .write_csv(&mut out)
            .map_err(|e| CliError::Failure(e.to_string()))?,
        Format::Json => {
            let json = result.json.unwrap_or_else(|| result.table.to_json());
            serde_json::to_writer_pretty(&mut out, &json).map_err(|e| CliError::Failure(e.to_string()))?;
            writeln!(out).map_err(io)?;
        }
    }
    out.flush().map_err(io)?;

    if let (Some(path), Some(series)) = (plot, result.series) {
        let mut w = open_output(&Some(path))?;
        writeln!(w, "# {} {}", series.x, series.y).map_err(io)?;
        for (x, y) in series.points {
            writeln!(w, "{x} {y}").map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    Ok(result.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
