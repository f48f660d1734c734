//! Command-line front end: `run` executes an experiment config, `plot`
//! extracts FD convergence series from a report.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::experiment::{run_timed, ExperimentConfig, ExperimentReport, Format};
use crate::report;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "shapecalc",
    version,
    about = "Shape derivatives checked against finite differences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every suite of an experiment config and write reports.
    Run {
        config: PathBuf,
        /// Output directory (overrides output.path).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of json,csv (overrides output.formats).
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<FormatArg>>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(short, long)]
        verbose: bool,
    },
    /// Write the (t, q(t), extrapolant) series of every comparison as CSV.
    Plot {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            jobs,
            verbose,
        } => run_command(config, out, format, jobs, verbose),
        Command::Plot { report, out } => plot_command(report, out),
    }
}

fn run_command(
    config: PathBuf,
    out: Option<PathBuf>,
    format: Option<Vec<FormatArg>>,
    jobs: Option<usize>,
    verbose: bool,
) -> i32 {
    let mut cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return EXIT_ERROR;
        }
    };
    if let Some(out) = out {
        cfg.output.path = out;
    }
    if let Some(f) = format {
        cfg.output.formats = f.into_iter().map(Format::from).collect();
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return EXIT_ERROR;
        }
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_ERROR;
        }
    };
    let log = |line: &str| eprintln!("{line}");
    let progress: Option<&(dyn Fn(&str) + Sync)> = if verbose { Some(&log) } else { None };
    let (report, summary) = match pool.install(|| run_timed(&cfg, progress)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return EXIT_ERROR;
        }
    };
    match report.write(&cfg.output.path, &cfg.output.formats, &summary) {
        Ok(files) => {
            for f in files {
                if verbose {
                    eprintln!("wrote {}", f.display());
                }
            }
        }
        Err(e) => {
            eprintln!("error: writing reports to {}: {e}", cfg.output.path.display());
            return EXIT_ERROR;
        }
    }
    println!(
        "{}: comparisons {}/{}, suite cases {}/{}, {:.2}s",
        if summary.pass { "PASS" } else { "FAIL" },
        summary.comparisons.passed,
        summary.comparisons.total,
        summary.suite_cases.passed,
        summary.suite_cases.total,
        summary.wall_time_s
    );
    if summary.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn plot_command(input: PathBuf, out: PathBuf) -> i32 {
    let rep = match ExperimentReport::read(&input) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", input.display());
            return EXIT_ERROR;
        }
    };
    let text = match report::plot_csv(&rep) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Err(e) = report::write_atomic(&out, text.as_bytes()) {
        eprintln!("error: {}: {e}", out.display());
        return EXIT_ERROR;
    }
    EXIT_PASS
}
