//! Nonlinear Poisson solve for a localized density bump at growing amplitude.

use std::f64::consts::PI;

use iep_core::ep::{solve_poisson_values, PoissonConfig};
use iep_core::spectral::PeriodicGrid;

fn main() -> iep_core::error::Result<()> {
    let g = PeriodicGrid::new(2.0 * PI * 8.0, 256)?;
    let c = 0.5 * g.length();
    for amp in [0.01, 0.1, 0.5, 0.9] {
        let rho: Vec<f64> = g.points().iter().map(|x| amp * (-(x - c).powi(2) / 4.0).exp()).collect();
        let sol = solve_poisson_values(&g, &rho, &PoissonConfig::default())?;
        let peak = sol.phi.iter().cloned().fold(f64::MIN, f64::max);
        println!("amplitude {amp:<5} iterations {:>3} defect {:.2e} peak potential {peak:.6}", sol.iterations, sol.defect);
    }
    Ok(())
}
