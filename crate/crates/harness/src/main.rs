use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use zonoclt::{config::ExperimentKind, emit, ExperimentConfig, OutputFormat};

/// Monte Carlo experiments for volumes of random cube projections:
/// exact zonotope volumes, Gram factors, U-statistic variance laws,
/// and their central limit behavior.
#[derive(Debug, Parser)]
#[command(name = "zonoclt", version = zonoclt::report::VERSION)]
struct Cli {
    /// Experiment to run
    #[arg(value_enum)]
    experiment: ExperimentKind,

    /// Ambient dimension n of the projection
    #[arg(long, default_value_t = 2)]
    n: usize,

    /// Comma-separated, strictly increasing values of N
    #[arg(long = "N-grid", value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,

    /// Monte Carlo replications per N
    #[arg(long)]
    samples: Option<usize>,

    /// Master seed; echoed into every report
    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Also write (theoretical, sample) quantile CSVs next to --out
    #[arg(long)]
    emit_qq: bool,

    /// Kernel label: abs-det, det-sq, clt-combined
    #[arg(long)]
    kernel: Option<String>,

    /// Moment exponent for moment-scaling (2 or 4)
    #[arg(long)]
    p: Option<u32>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = ExperimentConfig {
        experiment: cli.experiment,
        n: cli.n,
        n_grid: cli.n_grid.unwrap_or_else(|| cli.experiment.default_grid()),
        replications: cli.samples.unwrap_or_else(|| cli.experiment.default_replications()),
        master_seed: cli.seed,
        threads: cli.threads,
        output_path: cli.out,
        output_format: cli.format,
        emit_qq: cli.emit_qq,
        kernel: cli.kernel,
        p: cli.p,
    };
    match zonoclt::run_with_threads(&cfg).and_then(|report| {
        let written = emit::emit_report(&report, &cfg)?;
        for path in &written {
            eprintln!("wrote {}", path.display());
        }
        Ok(())
    }) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
