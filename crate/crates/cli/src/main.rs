//! `bentlab` command-line tool.
//!
//! Exit status: 0 on success, 2 on a negative verdict (failed certificate,
//! non-NPT input to `reduce`), 1 on any error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "bentlab", version, about = "Canonical NPT states, distillability scans and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a (b, c) grid and write the spectrum and region label per cell.
    RegionMap(RegionMapArgs),
    /// Minimum rank-two expectation of the n-copy partial transpose along ε.
    Fscan(FscanArgs),
    /// Bisect the ε at which the n-copy minimum changes sign.
    Threshold(ThresholdArgs),
    /// Search for a k-positivity violation of a map given by its Choi matrix.
    TwoPos(TwoPosArgs),
    /// Reduce an NPT state to the canonical (b, c) family.
    Reduce(ReduceArgs),
    /// Check a separable decomposition of a PPT canonical state.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// See-saw restarts.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// RNG seed; required for every stochastic command.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stall tolerance of a see-saw restart.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap per restart.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Raise the operator size cap so n = 3 is allowed at d = 3.
    #[arg(long)]
    pub stress: bool,
}

#[derive(Args, Debug)]
pub struct RegionMapArgs {
    #[arg(long)]
    pub d: usize,
    /// Grid size as bN x cN, e.g. 100x100.
    #[arg(long, value_parser = parse_grid)]
    pub grid: (usize, usize),
    /// b range lo:hi; defaults to [0, 2/(d(d-1))].
    #[arg(long, value_parser = parse_range)]
    pub b_range: Option<(f64, f64)>,
    /// c range lo:hi; defaults to [0, 2/(d(d-1))].
    #[arg(long, value_parser = parse_range)]
    pub c_range: Option<(f64, f64)>,
    /// Also compute the one-copy rank-two minimum per physical cell.
    #[arg(long)]
    pub f1: bool,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FscanArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// ε values as lo:hi:step, both ends included.
    #[arg(long, value_parser = parse_eps_grid, required_unless_present = "eps")]
    pub eps_grid: Option<EpsGrid>,
    /// A single ε instead of a grid.
    #[arg(long, conflicts_with = "eps_grid")]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TwoPosArgs {
    /// Choi matrix JSON with dIn and dOut.
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Use the maximally entangled input search instead of the general one (k = 2 only).
    #[arg(long)]
    pub maxent: bool,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// State JSON with dA, dB and normalized.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-stage CSV: stage,TrHrho,trace,minEig.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub d: usize,
    /// Named corner (A, B, K, J, ...); alternative to --b and --c.
    #[arg(long, conflicts_with_all = ["b", "c"])]
    pub point: Option<String>,
    #[arg(long, requires = "c")]
    pub b: Option<f64>,
    #[arg(long, requires = "b")]
    pub c: Option<f64>,
    /// Ensemble JSON to check instead of the built-in decomposition.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64> {
    let x: f64 = s.trim().parse().with_context(|| format!("not a number: {s:?}"))?;
    if !x.is_finite() {
        bail!("not finite: {s:?}");
    }
    Ok(x)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').context("expected lo:hi")?;
    let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
    if lo > hi {
        bail!("empty range {lo}:{hi}");
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let (b, c) = s.split_once(['x', 'X', '×']).context("expected bNxcN, e.g. 100x100")?;
    Ok((b.trim().parse().context("grid b count")?, c.trim().parse().context("grid c count")?))
}

/// Parsed `lo:hi:step` list; a newtype so clap treats it as one value.
#[derive(Clone, Debug)]
pub struct EpsGrid(pub Vec<f64>);

fn parse_eps_grid(s: &str) -> Result<EpsGrid> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, step] = parts[..] else { bail!("expected lo:hi:step") };
    let (lo, hi, step) = (parse_f64(lo)?, parse_f64(hi)?, parse_f64(step)?);
    if step <= 0.0 || lo > hi {
        bail!("need lo <= hi and step > 0");
    }
    // indices instead of repeated addition so values do not drift
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        bail!("grid of {count} points is too large");
    }
    Ok(EpsGrid((0..count).map(|i| lo + i as f64 * step).collect()))
}

fn main() -> ExitCode {
    // clap's own usage-error status is 2, which is reserved for verdicts here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::RegionMap(a) => commands::region_map(&a),
        Command::Fscan(a) => commands::fscan(&a),
        Command::Threshold(a) => commands::threshold(&a),
        Command::TwoPos(a) => commands::two_pos(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Verify(a) => commands::verify(&a),
    };
    match result {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::Negative) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
