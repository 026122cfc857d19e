//! Command-line front end: reads a JSON run configuration, dispatches to
//! `polariton-core`, and writes CSV tables (plus optional SVG plots).
//!
//! Exit statuses: 0 success, 1 output I/O failure, 2 invalid input,
//! 3 physics-domain error, 4 numerical failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;
pub mod plot;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use polariton_core::{Error as CoreError, ErrorClass};

use crate::config::{Resolved, RunConfig, UnitMode};
use crate::output::{CsvData, Metadata, Table};
use crate::plot::{render_svg, PlotSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::Validation => 2,
                ErrorClass::Physics => 3,
                ErrorClass::Numerical => 4,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    #[value(name = "csv+svg")]
    CsvSvg,
}

#[derive(Debug, Parser)]
#[command(name = "polariton", version, about = "Polariton heat-engine simulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// How plain numbers in the config are read.
    #[arg(long, global = true, value_enum)]
    pub units: Option<UnitMode>,
    /// Master seed for stochastic runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Branch frequencies and Hopfield weights over a detuning grid.
    Spectrum,
    /// Hopfield matrix and branch occupations at one detuning.
    Hopfield,
    /// Ideal Otto cycle.
    Otto,
    /// Otto cycle over a one- or two-axis grid.
    Sweep,
    /// Shortcut-to-adiabaticity stroke.
    Sta,
    /// Limit cycle with finite isochore durations.
    Finite,
    /// Two-mode dispersion and efficiency grid.
    Twomode,
    /// Stochastic Langevin ensemble.
    Langevin,
    /// SVG plot of columns of an existing CSV.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub x: String,
    /// Comma-separated y columns (a single column for heatmaps).
    #[arg(long, value_delimiter = ',', required = true)]
    pub y: Vec<String>,
    /// Heatmap value column.
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long)]
    pub log_y: bool,
    #[arg(long)]
    pub title: Option<String>,
    /// Output file name; defaults to the CSV stem with `.svg`.
    #[arg(long)]
    pub name: Option<String>,
}

/// Shared state for one invocation.
pub struct Context {
    pub config: RunConfig,
    pub raw: Vec<u8>,
    pub resolved: Resolved,
    pub out: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
}

impl Context {
    pub fn metadata(&self, command: &str) -> Metadata {
        let units = match self.resolved.units.mode {
            UnitMode::Gamma0 => "gamma0",
            UnitMode::Si => "si",
        };
        Metadata::new(command, &self.raw).with("units", units)
    }

    /// Writes `table` as `<stem>.csv` and, for `csv+svg`, each plot as `<stem><suffix>.svg`.
    pub fn emit(
        &self,
        table: &Table,
        stem: &str,
        meta: &Metadata,
        plots: &[(&str, PlotSpec)],
    ) -> Result<Vec<PathBuf>, CliError> {
        let mut files = vec![table.write(&self.out, &format!("{stem}.csv"), meta)?];
        if self.format == Format::CsvSvg && !table.rows.is_empty() {
            let data = CsvData::parse(&table.render(meta))?;
            for (suffix, spec) in plots {
                match render_svg(&data, spec, &meta.line()) {
                    Ok(svg) => files.push(write_file(&self.out.join(format!("{stem}{suffix}.svg")), &svg)?),
                    Err(e) => warn(&format!("{stem}{suffix}.svg not written: {e}")),
                }
            }
        }
        Ok(files)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path.to_path_buf())
}

pub fn warn(message: &str) {
    eprintln!("warning: {message}");
}

fn prepare(cli: &Cli) -> Result<Context, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Validation("--config is required".into()))?;
    let raw = fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let text = std::str::from_utf8(&raw).map_err(|_| CliError::Validation("config is not UTF-8".into()))?;
    let config = RunConfig::parse(text)?;
    let output = config.output.clone().unwrap_or_default();
    let format = match (cli.format, output.format.as_deref()) {
        (Some(f), _) => f,
        (None, None) => Format::Csv,
        (None, Some(s)) => Format::from_str(s, false).map_err(|_| CliError::Validation(format!("unknown output format `{s}`")))?,
    };
    let out = cli.out.clone().or_else(|| output.dir.map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let resolved = Resolved::new(&config.physical, cli.units.unwrap_or_default())?;
    Ok(Context { config, raw, resolved, out, format, seed: cli.seed })
}

/// Runs one invocation and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    if let Command::Plot(args) = &cli.command {
        return commands::plot(args, cli.out.as_deref());
    }
    let ctx = prepare(cli)?;
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Hopfield => commands::hopfield(&ctx),
        Command::Otto => commands::otto(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Sta => commands::sta(&ctx),
        Command::Finite => commands::finite(&ctx),
        Command::Twomode => commands::twomode(&ctx),
        Command::Langevin => commands::langevin(&ctx),
        Command::Plot(_) => unreachable!(),
    }
}
