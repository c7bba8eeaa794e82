use clap::{Parser, Subcommand};
use srion_cli::{config::Config, driver, experiments::ExperimentKind, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Photoionization of a 1D soft-core atom under femtosecond pulses and
/// stochastic fields: split-operator quantum dynamics with seeded Monte
/// Carlo ensembles. All quantities are in atomic units; outputs are CSV
/// files plus a manifest that reproduces the run exactly.
#[derive(Parser)]
#[command(name = "srion", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Configuration file (TOML). A manifest from a previous run is also a
    /// valid config and replays that run bit for bit.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSVs and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Base seed for ensemble realizations.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Realizations per ensemble.
    #[arg(long, global = true)]
    realizations: Option<usize>,

    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or load from cache) the bound spectrum and write energies.
    GroundState,
    /// Ionization probability versus laser peak amplitude, no noise.
    LaserScan,
    /// Enhancement versus white-noise amplitude at fixed laser settings.
    NoiseScan,
    /// Noise-scan families for several pulse durations.
    DurationScan,
    /// Enhancement versus laser peak amplitude at fixed noise.
    F0Scan,
    /// Enhancement versus chaotic-light rms amplitude.
    ChaoticScan,
    /// Frequency-resolved gain: weak probe scan on bare/driven atom.
    Frag,
    /// Chaotic-light enhancement with spectral holes of several widths.
    Holes,
    /// Enhancement for simultaneous and sequential laser/noise timing.
    Delay,
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::GroundState => ExperimentKind::GroundState,
            Command::LaserScan => ExperimentKind::LaserScan,
            Command::NoiseScan => ExperimentKind::NoiseScan,
            Command::DurationScan => ExperimentKind::DurationScan,
            Command::F0Scan => ExperimentKind::F0Scan,
            Command::ChaoticScan => ExperimentKind::ChaoticScan,
            Command::Frag => ExperimentKind::Frag,
            Command::Holes => ExperimentKind::Holes,
            Command::Delay => ExperimentKind::Delay,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(seed) = cli.seed {
        cfg.ensemble.base_seed = seed;
    }
    if let Some(n) = cli.realizations {
        cfg.ensemble.realizations = n;
    }
    if let Some(w) = cli.workers {
        cfg.ensemble.workers = w;
    }
    let report = driver::execute(cli.command.kind(), &cfg)?;
    eprintln!("[{}] done: {}", report.kind.as_str(), report.summary);
    for file in &report.files {
        println!("{}", file.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
