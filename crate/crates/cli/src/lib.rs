//! Command-line front end: designs, sweeps, estimates from recorded counts
//! and SPAM consistency checks.

pub mod check_cmd;
pub mod config;
pub mod counts;
pub mod design_file;
pub mod error;
pub mod estimate_cmd;
pub mod meta;
pub mod sweep_cmd;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spamqpt::sim::{ExperimentDesign, Shots};

use crate::check_cmd::CheckOptions;
use crate::config::{Format, Overrides};
use crate::error::{exit, CliError, CliResult};
use crate::estimate_cmd::{EstimateOptions, Target};
use crate::meta::{create_dir, write_file, Provenance};

#[derive(Debug, Parser)]
#[command(
    name = "spamqpt",
    version,
    about = "SPAM-corrected quantum process tomography"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte-Carlo accuracy sweep over a SPAM-noise grid.
    Sweep(SweepArgs),
    /// Estimate a gate from recorded counts.
    Estimate(EstimateArgs),
    /// Test calibration counts against the nominal frame.
    CheckSpam(CheckArgs),
    /// Write an experiment design file.
    MakeDesign(DesignArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON configuration file or builtin name (fig1-depol, fig1-coherent,
    /// fig2-depol, fig2-coherent).
    #[arg(long, value_name = "PATH|NAME")]
    config: String,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Base seed; run r uses seed + r at every grid point.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Shots per circuit, or "exact" for noiseless probabilities.
    #[arg(long, value_name = "N|exact")]
    shots: Option<Shots>,
    /// Comma-separated grid of SPAM-noise values.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Replications per grid point.
    #[arg(long, value_name = "N")]
    runs: Option<usize>,
    /// Comma-separated gauge parameters; replaces the estimator list with the
    /// uncorrected estimator plus one corrected estimator per value.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    gauge_p: Option<Vec<f64>>,
    /// Skip the rank truncation of the gate data in overcomplete estimators.
    #[arg(long)]
    no_truncate_p: bool,
    /// Comma-separated table formats: csv, json.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    format: Option<Vec<Format>>,
    /// Also write design.json and the counts of every replication.
    #[arg(long)]
    dump_counts: bool,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Design file written by make-design (or a bare design object).
    #[arg(long, visible_alias = "frame", value_name = "PATH")]
    design: PathBuf,
    /// Counts CSV of the gate circuits.
    #[arg(long, value_name = "PATH")]
    counts: PathBuf,
    /// Counts CSV of the calibration circuits; enables SPAM correction.
    #[arg(long, value_name = "PATH")]
    calibration: Option<PathBuf>,
    /// Comma-separated gauge parameters in [0, 1].
    #[arg(
        long,
        value_name = "LIST",
        value_delimiter = ',',
        default_value = "0.5"
    )]
    gauge_p: Vec<f64>,
    /// Skip the rank truncation of the gate data in overcomplete estimators.
    #[arg(long)]
    no_truncate_p: bool,
    /// Ideal gate for the fidelity diagnostic.
    #[arg(long, value_enum)]
    target: Option<Target>,
    /// Output directory for estimate.json; printed to stdout when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// Design file written by make-design (or a bare design object).
    #[arg(long, visible_alias = "frame", value_name = "PATH")]
    design: PathBuf,
    /// Counts CSV of the calibration circuits.
    #[arg(long, value_name = "PATH")]
    calibration: PathBuf,
    /// Output directory for consistency.json.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DesignKind {
    /// Preparations +x, -x, +y, +z; the same four effects tracked.
    Square,
    /// All six Pauli eigenstates prepared and tracked.
    Overcomplete,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[arg(long, value_enum, default_value = "square")]
    kind: DesignKind,
    /// Shots per circuit, or "exact".
    #[arg(long, value_name = "N|exact", default_value = "5000")]
    shots: Shots,
    /// Omit the calibration circuits.
    #[arg(long)]
    no_calibration: bool,
    /// Output directory for design.json; printed to stdout when omitted.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn sweep(args: SweepArgs) -> CliResult<i32> {
    let mut config = config::load(&args.config)?;
    config.apply(&Overrides {
        seed: args.seed,
        shots: args.shots,
        grid: args.grid,
        runs: args.runs,
        gauge_p: args.gauge_p,
        no_truncate_p: args.no_truncate_p,
        formats: args.format,
    });
    let result = sweep_cmd::run(&config, &args.out, args.dump_counts)?;
    let failed = result.records.iter().filter(|r| r.error.is_some()).count();
    println!(
        "wrote {} records and {} aggregates to {}",
        result.records.len(),
        result.aggregates.len(),
        args.out.display()
    );
    if failed > 0 {
        eprintln!("warning: {failed} estimates failed; see warnings.txt");
    }
    Ok(exit::OK)
}

fn estimate(args: EstimateArgs) -> CliResult<i32> {
    let opts = EstimateOptions {
        design: args.design,
        gate_counts: args.counts,
        calibration_counts: args.calibration,
        gauge_p: args.gauge_p,
        truncate_p: !args.no_truncate_p,
        target: args.target,
    };
    let out = estimate_cmd::run(&opts)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match args.out {
        Some(dir) => {
            create_dir(&dir)?;
            write_file(&dir.join("estimate.json"), &out.json)?;
        }
        None => print!("{}", out.json),
    }
    Ok(exit::OK)
}

fn check_spam(args: CheckArgs) -> CliResult<i32> {
    let opts = CheckOptions {
        design: args.design,
        calibration_counts: args.calibration,
    };
    let (report, json) = check_cmd::run(&opts)?;
    println!("{}", check_cmd::summary(&report, &opts.calibration_counts));
    if let Some(dir) = args.out {
        create_dir(&dir)?;
        write_file(&dir.join("consistency.json"), &json)?;
    }
    Ok(if report.passed {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}

fn make_design(args: DesignArgs) -> CliResult<i32> {
    let mut design = match args.kind {
        DesignKind::Square => ExperimentDesign::square(args.shots),
        DesignKind::Overcomplete => ExperimentDesign::overcomplete(args.shots),
    };
    design.include_calibration = !args.no_calibration;
    design.validate().map_err(|e| CliError::core("design", e))?;
    let text = design_file::design_json(&Provenance::of(&design, None)?, &design)?;
    match args.out {
        Some(dir) => {
            create_dir(&dir)?;
            write_file(&dir.join("design.json"), &text)?;
        }
        None => print!("{text}"),
    }
    Ok(exit::OK)
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a),
        Command::Estimate(a) => estimate(a),
        Command::CheckSpam(a) => check_spam(a),
        Command::MakeDesign(a) => make_design(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("hint: {h}");
            }
            e.exit_code()
        }
    }
}
