//! Command-line driver: simulate realization archives, run verification suites, convert reports.
//!
//! Exit status: 0 when every check passes, 1 on a statistical failure or runtime error, 2 on a
//! usage or configuration error. Worker count comes from `SIO_WORKERS`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sio_channel::error::Result;
use sio_channel::harness::{self, Archive, ExperimentConfig, Format, SuiteId};

#[derive(Parser)]
#[command(name = "sio-channel", version, about = "Stochastic-integral-operator channel simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a realization archive for every configured suite.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one suite, or `all` configured suites, and write the report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        suite: String,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        /// Rerun from the seeds recorded in an archive written by `simulate`.
        #[arg(long)]
        archive: Option<PathBuf>,
    },
    /// Convert a saved report (CSV or JSON) to the given format.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: FormatArg,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
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
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Writes through a temporary sibling and renames, so a failed run leaves no partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Simulate { config, out } => {
            let exp = ExperimentConfig::load(&config)?.build()?;
            let workers = harness::workers_from_env()?;
            let tmp = tmp_path(&out);
            let result = (|| {
                let mut w = BufWriter::new(fs::File::create(&tmp)?);
                harness::write_archive(&exp, workers, &mut w)?;
                w.flush()?;
                Ok(())
            })();
            match result {
                Ok(()) => fs::rename(&tmp, &out)?,
                Err(e) => {
                    let _ = fs::remove_file(&tmp);
                    return Err(e);
                }
            }
            Ok(true)
        }
        Command::Verify { config, suite, report, format, archive } => {
            let cfg = ExperimentConfig::load(&config)?;
            let ids = if suite == "all" { cfg.suite_ids()? } else { vec![SuiteId::parse(&suite)?] };
            let exp = cfg.build()?;
            let workers = harness::workers_from_env()?;
            let archive = archive.as_deref().map(Archive::load).transpose()?;
            let rep = harness::run_suites(&exp, &ids, workers, archive.as_ref())?;
            write_atomic(&report, &rep.render(format.into())?)?;
            eprintln!(
                "{} checks: {} passed, {} failed",
                rep.summary.total, rep.summary.passed, rep.summary.failed
            );
            Ok(rep.all_passed())
        }
        Command::Report { input, format, out } => {
            let bytes = harness::report_render(&fs::read(&input)?, format.into())?;
            match out {
                Some(path) => write_atomic(&path, &bytes)?,
                None => std::io::stdout().write_all(&bytes)?,
            }
            Ok(true)
        }
    }
}
