//! Small validation run written as JSON, CSV and plot data.

use iep_core::harness::{emit, validate_run, ExperimentConfig, ReportFormat};

fn main() -> iep_core::error::Result<()> {
    let cfg: ExperimentConfig = serde_json::from_str(
        r#"{ "eps_list": [0.25, 0.2, 0.15], "T0": 0.02, "N": 1024, "N_X": 128, "slow_length": 40,
             "envelope": { "a_amplitude": 0.1, "b_amplitude": 0.1, "width": 3, "a_center": 0, "b_center": 0 },
             "stations": 20 }"#,
    )
    .expect("literal config parses");
    let report = validate_run(&cfg)?;
    let dir = std::env::temp_dir().join("iep_report");
    for format in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Plotdata] {
        for path in emit(&report, format, &dir)? {
            println!("wrote {}", path.display());
        }
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
