//! Command-line front end for the Monte Carlo verification suites.
//!
//! Exit codes: 0 when every criterion passes, 1 when any fails,
//! 2 on usage or configuration errors.

use clap::{Parser, ValueEnum};
use mplab::runner::{self, ExperimentConfig, OutputFormat, Suite};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Triangle,
    Sums,
    Normality,
    Identity,
    Smallball,
    Moments,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Triangle => Suite::Triangle,
            SuiteArg::Sums => Suite::Sums,
            SuiteArg::Normality => Suite::Normality,
            SuiteArg::Identity => Suite::Identity,
            SuiteArg::Smallball => Suite::Smallball,
            SuiteArg::Moments => Suite::Moments,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

/// Monte Carlo laboratory for singular-value statistics of products of
/// iid Gaussian matrices.
#[derive(Parser, Debug)]
#[command(name = "mplab", version, about)]
struct Cli {
    /// Verification suite to run.
    #[arg(value_enum)]
    suite: Option<SuiteArg>,

    /// Matrix size n.
    #[arg(long = "n")]
    n: Option<usize>,

    /// Number of product factors N.
    #[arg(long = "N")]
    big_n: Option<usize>,

    /// Index count k (top-k statistics).
    #[arg(long = "k")]
    k: Option<usize>,

    /// Lower summation index m.
    #[arg(long = "m")]
    m: Option<usize>,

    /// Number of Monte Carlo trials.
    #[arg(long)]
    trials: Option<usize>,

    /// Master seed for the deterministic substreams.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (results are identical for any value).
    #[arg(long)]
    threads: Option<usize>,

    /// Report file path; nothing is written when omitted.
    #[arg(long = "out")]
    out: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// JSON config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Normality suite: simulate through the QR accumulator instead of
    /// the exact chi-squared sampler.
    #[arg(long)]
    slow_path: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| e.to_string())?,
        None => {
            let suite = cli.suite.ok_or("a suite is required (or use --config)")?;
            let trials = cli.trials.ok_or("--trials is required (or use --config)")?;
            let seed = cli.seed.ok_or("--seed is required (or use --config)")?;
            ExperimentConfig::new(suite.into(), trials, seed)
        }
    };
    if let Some(suite) = cli.suite {
        config.suite = suite.into();
    }
    if let Some(n) = cli.n {
        config.n = Some(n);
    }
    if let Some(big_n) = cli.big_n {
        config.big_n = Some(big_n);
    }
    if let Some(k) = cli.k {
        config.k = Some(k);
    }
    if let Some(m) = cli.m {
        config.m = Some(m);
    }
    if let Some(trials) = cli.trials {
        config.trials = trials;
    }
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(threads) = cli.threads {
        config.threads = threads;
    }
    if let Some(format) = cli.format {
        config.output_format = format.into();
    }
    if let Some(out) = &cli.out {
        config.output_path = Some(out.display().to_string());
    }
    if cli.slow_path {
        config.slow_path = true;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };

    let report = match runner::run_suite(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    print!("{}", report.console_summary());

    if let Some(path) = &config.output_path {
        if let Err(e) = runner::emit_report(&report, config.output_format, path.as_ref()) {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        eprintln!("report written to {path}");
    }

    if report.all_pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
