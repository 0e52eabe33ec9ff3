use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use iep_core::coefficients::coefficient_table;
use iep_core::dispersion::nonresonance_report;
use iep_core::harness::{emit, residual_experiment, sweep_and_fit, validate_run, write_timings, ExperimentConfig, ReportFormat, RunReport};
use iep_core::normal_form::{scan_b01, scan_b10, ScanRow, WeightFunction};
use iep_core::{Error, Sign};

#[derive(Parser)]
#[command(name = "iep", version, about = "Bidirectional NLS approximation experiments for ion Euler-Poisson")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single run at the largest epsilon with integrity checks.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs for every epsilon and exponent fits.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Residual scaling of the leading and second-order approximations.
    Residual {
        #[arg(long)]
        config: PathBuf,
    },
    /// Dispersion values and non-resonance margins at k0.
    Dispersion {
        #[arg(long)]
        k0: f64,
    },
    /// Second-order and NLS coefficients at k0.
    Coeffs {
        #[arg(long)]
        k0: f64,
    },
    /// Kernel scans as CSV.
    Kernels {
        #[arg(long)]
        k0: f64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        eps: f64,
        /// Points per axis.
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// Write one file per kernel variant instead of printing.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn finish_report(report: &RunReport, timings: Option<&iep_core::harness::Timings>) -> Result<Outcome, Error> {
    let dir = &report.config.output_dir;
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Plotdata] {
        for path in emit(report, format, dir)? {
            eprintln!("wrote {}", path.display());
        }
    }
    if let Some(t) = timings {
        eprintln!("wrote {}", write_timings(t, dir)?.display());
    }
    for f in &report.fits {
        println!("{:<22} exponent {:.4} +- {:.4}", f.name, f.fit.exponent, f.fit.std_error);
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(if report.all_passed() { Outcome::Pass } else { Outcome::Fail })
}

fn csv_block(out: &mut String, label: &str, rows: &[ScanRow]) {
    out.push_str(&format!("# {label}\nk,km,m,value,bound_product\n"));
    for r in rows {
        out.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n", r.k, r.km, r.m, r.value, r.bound_product));
    }
}

fn kernels(k0: f64, delta: f64, eps: f64, points: usize, output: Option<PathBuf>) -> Result<Outcome, Error> {
    let w = WeightFunction::new(delta, eps)?;
    let mut blocks: Vec<(String, Vec<ScanRow>)> = Vec::new();
    for j in Sign::BOTH {
        for p in Sign::BOTH {
            for sign in Sign::BOTH {
                blocks.push((format!("b01_j{j}_p{p}_s{sign}"), scan_b01(j, p, sign, k0, &w, points)?));
                for carrier in Sign::BOTH {
                    let rows = scan_b10(j, p, sign, carrier, k0, &w, -4.0 * k0, 4.0 * k0, points)?;
                    blocks.push((format!("b10_j{j}_p{p}_s{sign}_c{carrier}"), rows));
                }
            }
        }
    }
    match output {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for (label, rows) in &blocks {
                let mut text = String::new();
                csv_block(&mut text, label, rows);
                let path = dir.join(format!("{label}.csv"));
                std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            }
        }
        None => {
            let mut text = String::new();
            for (label, rows) in &blocks {
                csv_block(&mut text, label, rows);
            }
            print!("{text}");
        }
    }
    Ok(Outcome::Pass)
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Validate { config } => finish_report(&validate_run(&ExperimentConfig::from_path(&config)?)?, None),
        Command::Sweep { config } => {
            let (report, timings) = sweep_and_fit(&ExperimentConfig::from_path(&config)?)?;
            finish_report(&report, Some(&timings))
        }
        Command::Residual { config } => finish_report(&residual_experiment(&ExperimentConfig::from_path(&config)?)?, None),
        Command::Dispersion { k0 } => {
            let report = nonresonance_report(k0)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(if report.flagged.is_empty() { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Coeffs { k0 } => {
            println!("{}", serde_json::to_string_pretty(&coefficient_table(k0)?)?);
            Ok(Outcome::Pass)
        }
        Command::Kernels { k0, delta, eps, points, output } => kernels(k0, delta.unwrap_or(0.25 * k0), eps, points, output),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
