//! Full epsilon sweep: evolve Euler-Poisson from the approximation and fit the error exponent.

use iep_core::harness::{sweep_and_fit, ExperimentConfig};

fn main() -> iep_core::error::Result<()> {
    let cfg = ExperimentConfig::default();
    let (report, timings) = sweep_and_fit(&cfg)?;
    for e in &report.entries {
        println!(
            "eps = {:.3}  dt = {:.4}  steps = {}  sup err (leading, diag) = {:.4e}  sup err (ansatz, diag) = {:.4e}  mass drift = {:.2e}",
            e.epsilon, e.dt, e.steps, e.sup_err_leading_diag, e.sup_err_ansatz_diag, e.mass_drift
        );
    }
    for f in &report.fits {
        println!("{:<22} exponent {:.3} +- {:.3}", f.name, f.fit.exponent, f.fit.std_error);
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for (eps, secs) in &timings.seconds {
        println!("eps = {eps}: {secs:.1} s");
    }
    Ok(())
}
