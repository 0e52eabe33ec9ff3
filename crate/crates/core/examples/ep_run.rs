//! Direct Euler-Poisson run with observer diagnostics and CSV snapshots.

use std::f64::consts::PI;

use iep_core::ep::{write_snapshot, Control, EPState, EpSolver, PoissonConfig, SolverConfig};
use iep_core::spectral::{PeriodicGrid, RealField};

fn main() -> iep_core::error::Result<()> {
    let g = PeriodicGrid::new(2.0 * PI * 8.0, 256)?;
    let c = 0.5 * g.length();
    let rho = RealField::from_fn(&g, |x| 0.1 * (-(x - c).powi(2) / 16.0).exp() * (x - c).cos());
    let v = RealField::from_fn(&g, |x| 0.05 * (-(x - c).powi(2) / 9.0).exp());
    let state = EPState::new(rho, v, 0.0)?;
    let solver = EpSolver::new(&g, SolverConfig::default());
    let pc = PoissonConfig::default();
    let m0 = state.mass();
    let e0 = state.quadratic_energy(&pc)?;
    let dir = std::env::temp_dir().join("iep_ep_run");
    let last = solver.run(&state, 10.0, 0.02, 100, |step, s| {
        let path = write_snapshot(&dir, "demo", step, s)?;
        println!(
            "t {:6.2}  mass drift {:.2e}  quadratic energy {:.8}  min density {:.4}  -> {}",
            s.t,
            s.mass() - m0,
            s.quadratic_energy(&pc)?,
            s.min_density(),
            path.display()
        );
        Ok(Control::Continue)
    })?;
    println!("final t {:.2}, initial energy {e0:.8}", last.t);
    Ok(())
}
