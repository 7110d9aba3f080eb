//! Command-line harness for the frame reconstruction experiments.
//!
//! Exit codes: 0 on success, 1 for invalid arguments, 2 for runtime or
//! numerical failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use framealg::experiments::{
    run_example1, run_example2, write_csv, StatsSummary, TrialConfig, DEFAULT_SEED,
};
use framealg::svg::write_svg;
use framealg::{Frame, FrameError};

#[derive(Parser)]
#[command(
    name = "framealg",
    version,
    about = "Frame-coefficient reconstruction experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noisy measurements with erasures: classical vs greedy recovery.
    Example1(Example1Args),
    /// Saturated (clipped) coefficients: fixed vs greedy recovery.
    Example2(Example2Args),
    /// Frame bounds of a frame stored as headerless CSV (N rows × d columns).
    Bounds(BoundsArgs),
}

#[derive(Args)]
struct Example1Args {
    /// Ambient dimension d.
    #[arg(long, default_value_t = 100)]
    d: usize,
    /// Number of frame vectors N.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Norm of the added Gaussian noise.
    #[arg(long, default_value_t = 1e-6)]
    noise: f64,
    /// Number of randomly erased coefficients.
    #[arg(long, default_value_t = 10)]
    erasures: usize,
    /// Relaxation parameter of the classical solver.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write per-iteration statistics to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Render the error curves to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Log-scale vertical axis for the SVG.
    #[arg(long)]
    log_scale: bool,
}

#[derive(Args)]
struct Example2Args {
    #[arg(long, default_value_t = 100)]
    d: usize,
    #[arg(long, default_value_t = 250)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 50)]
    iters: usize,
    /// Saturation level λ.
    #[arg(long, default_value_t = 0.08)]
    lambda: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    log_scale: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// Headerless CSV file, one frame vector per row.
    #[arg(long)]
    frame_file: PathBuf,
}

enum CliError {
    /// Bad argument values: exit code 1.
    Usage(String),
    /// Runtime or numerical failure: exit code 2.
    Runtime(FrameError),
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        CliError::Runtime(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            // clap formats help/usage itself; print as-is.
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Example1(args) => {
            let cfg = TrialConfig {
                dim: args.d,
                count: args.n,
                trials: args.trials,
                iters: args.iters,
                seed: args.seed,
                noise_norm: args.noise,
                erasures: args.erasures,
                lambda: None,
                classical_alpha: args.alpha,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let summary = run_example1(&cfg)?;
            report(&summary, args.csv.as_deref(), args.svg.as_deref(), args.log_scale)
        }
        Command::Example2(args) => {
            let cfg = TrialConfig {
                dim: args.d,
                count: args.n,
                trials: args.trials,
                iters: args.iters,
                seed: args.seed,
                noise_norm: 0.0,
                erasures: 0,
                lambda: Some(args.lambda),
                classical_alpha: 1.0,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let summary = run_example2(&cfg)?;
            report(&summary, args.csv.as_deref(), args.svg.as_deref(), args.log_scale)
        }
        Command::Bounds(args) => bounds_report(&args.frame_file),
    }
}

fn report(
    summary: &StatsSummary,
    csv: Option<&Path>,
    svg: Option<&Path>,
    log_scale: bool,
) -> Result<(), CliError> {
    for alg in &summary.algorithms {
        let last = summary.iters;
        println!(
            "{:<10} reduction rate {}  |  mean error: iter 1 = {:.3e}, iter {} = {:.3e}",
            alg.name,
            alg.reduction_rate,
            alg.mean.get(1).copied().unwrap_or(f64::NAN),
            last,
            alg.mean[last],
        );
    }
    if summary.redraws > 0 {
        eprintln!("note: {} degenerate trial(s) redrawn", summary.redraws);
    }
    if let Some(path) = csv {
        write_csv(summary, path)?;
        println!("csv written to {}", path.display());
    }
    if let Some(path) = svg {
        write_svg(summary, path, log_scale)?;
        println!("svg written to {}", path.display());
    }
    Ok(())
}

fn bounds_report(path: &Path) -> Result<(), CliError> {
    let frame = read_frame_csv(path)?;
    let bounds = frame.optimal_frame_bounds()?;
    println!("A (lower bound)      = {:.12e}", bounds.lower());
    println!("B (upper bound)      = {:.12e}", bounds.upper());
    println!("optimal alpha        = {:.12e}", bounds.optimal_relaxation());
    println!("contraction constant = {:.12e}", bounds.optimal_contraction());
    Ok(())
}

fn read_frame_csv(path: &Path) -> Result<Frame, FrameError> {
    let text = std::fs::read_to_string(path).map_err(|source| FrameError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| FrameError::Parse {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    message: format!("{e}: {field:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(FrameError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "no frame vectors in file".into(),
        });
    }
    Frame::from_rows(&rows)
}
