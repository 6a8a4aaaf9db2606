//! Command-line driver: argument parsing, config loading with flag
//! overrides, file output, and exit-code mapping (0 success, 2 validation
//! error, 3 numerical failure).
//!
//! Stdout carries machine output (report JSON for `fit`, `report`, `gap`,
//! and `fractions`); progress notes go to stderr so output stays pipeable.

pub mod config;
pub mod pipeline;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use polariton::{Error, PeakDataset, Result};

use config::RunConfig;
use pipeline::{
    fractions_csv, peaks_and_dataset, run_fit, run_report, run_simulation, spectra_from_csv_str,
    spectra_to_csv,
};
use report::GapReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Quadratic,
    Hopfield,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolarizationArg {
    Te,
    Tm,
}

#[derive(Debug, Parser)]
#[command(
    name = "polariton",
    version,
    about = "Polariton dispersion, cavity optics, and dispersion fitting"
)]
pub struct Cli {
    /// TOML run configuration; built-in defaults when omitted
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (overrides io.output_dir)
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Dispersion model (overrides fit.model)
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,

    /// Optics polarization (overrides grid.polarization)
    #[arg(long, global = true, value_enum)]
    pub polarization: Option<PolarizationArg>,

    /// Random seed for fit restarts (overrides fit.seed)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate angle-resolved spectra; write spectra, peaks, and dataset CSVs
    Simulate,
    /// Extract peaks and a fit dataset from an existing spectra CSV
    Peaks { spectra_csv: PathBuf },
    /// Fit the dispersion model to a peak dataset and report
    Fit { dataset_csv: PathBuf },
    /// Report from the configured parameters without fitting
    Report,
    /// Print coupling constants and gap figures as JSON
    Gap,
    /// Write per-angle branch fractions; print the normal-incidence block
    Fractions,
}

/// Loads the config (file or defaults) and applies the global flag
/// overrides so every downstream consumer, including the config hash,
/// sees the effective configuration.
pub fn effective_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(model) = cli.model {
        cfg.fit.model = match model {
            ModelArg::Quadratic => "quadratic".into(),
            ModelArg::Hopfield => "hopfield".into(),
        };
    }
    if let Some(pol) = cli.polarization {
        cfg.grid.polarization = match pol {
            PolarizationArg::Te => "te".into(),
            PolarizationArg::Tm => "tm".into(),
        };
    }
    if let Some(seed) = cli.seed {
        cfg.fit.seed = seed;
    }
    if let Some(output) = &cli.output {
        cfg.io.output_dir = output.display().to_string();
    }
    Ok(cfg)
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = effective_config(cli)?;
    let out_dir = PathBuf::from(&cfg.io.output_dir);
    match &cli.command {
        Command::Simulate => {
            let out = run_simulation(&cfg)?;
            write_output(&out_dir, "spectra.csv", &spectra_to_csv(&out.spectra))?;
            write_output(
                &out_dir,
                "peaks.csv",
                &pipeline::peaks_to_csv(&out.per_angle_peaks),
            )?;
            match (&out.dataset, &out.dataset_note) {
                (Some(dataset), _) => {
                    write_output(&out_dir, "dataset.csv", &dataset.to_csv_string())?;
                }
                (None, Some(note)) => eprintln!("dataset skipped: {note}"),
                (None, None) => {}
            }
        }
        Command::Peaks { spectra_csv } => {
            let text = std::fs::read_to_string(spectra_csv)?;
            let spectra = spectra_from_csv_str(&text)?;
            let (per_angle, dataset, note) = peaks_and_dataset(&cfg, &spectra);
            write_output(&out_dir, "peaks.csv", &pipeline::peaks_to_csv(&per_angle))?;
            match (&dataset, &note) {
                (Some(dataset), _) => {
                    write_output(&out_dir, "dataset.csv", &dataset.to_csv_string())?;
                }
                (None, Some(note)) => eprintln!("dataset skipped: {note}"),
                (None, None) => {}
            }
        }
        Command::Fit { dataset_csv } => {
            let dataset = PeakDataset::from_path(dataset_csv)?;
            let out = run_fit(&cfg, &dataset, dataset_csv)?;
            let json = out.report.to_json();
            write_output(&out_dir, "report.json", &json)?;
            print!("{json}");
        }
        Command::Report => {
            let report = run_report(&cfg)?;
            let json = report.to_json();
            write_output(&out_dir, "report.json", &json)?;
            print!("{json}");
        }
        Command::Gap => {
            let resolved = cfg.resolve()?;
            let gap = GapReport::new(&cfg, &resolved.coupling)?;
            print!("{}", gap.to_json());
        }
        Command::Fractions => {
            let csv = fractions_csv(&cfg)?;
            write_output(&out_dir, "fractions.csv", &csv)?;
            let report = run_report(&cfg)?;
            let block = serde_json::to_string_pretty(&report.normal_incidence)
                .map_err(|e| Error::InvalidInput(format!("serialization failed: {e}")))?;
            println!("{block}");
        }
    }
    Ok(())
}

/// Runs the parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                3
            }
        }
    }
}
