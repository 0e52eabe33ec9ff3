//! Residual of the leading and second-order approximations against epsilon.

use iep_core::harness::{residual_experiment, ExperimentConfig};

fn main() -> iep_core::error::Result<()> {
    let cfg = ExperimentConfig::default();
    let report = residual_experiment(&cfg)?;
    for e in &report.entries {
        let r = &e.residual;
        println!(
            "eps = {:.3}  leading L2 {:.4e}  second L2 {:.4e}  leading H{} {:.4e}  second H{} {:.4e}",
            e.epsilon, r.leading_l2, r.second_l2, cfg.sobolev_s, r.leading_hs, cfg.sobolev_s, r.second_hs
        );
    }
    for f in &report.fits {
        println!("{:<22} exponent {:.3} +- {:.3}", f.name, f.fit.exponent, f.fit.std_error);
    }
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(())
}
