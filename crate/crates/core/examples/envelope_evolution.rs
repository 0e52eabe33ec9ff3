//! Coupled NLS envelopes and second-order transport fields on the slow clock.

use num_complex::Complex64;

use iep_core::coefficients::coefficient_table;
use iep_core::envelope::{Envelope, EnvelopeRole, EnvelopeSystem};
use iep_core::spectral::PeriodicGrid;

fn main() -> iep_core::error::Result<()> {
    let t = coefficient_table(1.0)?;
    let g = PeriodicGrid::new(160.0, 512)?;
    let a = Envelope::gaussian(&g, EnvelopeRole::A, Complex64::new(1.0, 0.0), 4.0, 0.0);
    let b = Envelope::gaussian(&g, EnvelopeRole::B, Complex64::new(1.0, 0.0), 4.0, 0.0);
    let (ma, mb) = (a.mass(), b.mass());
    let mut sys = EnvelopeSystem::new(a, b, 0.1, &t)?;
    for target in [1.0, 2.0, 5.0, 10.0] {
        sys.advance_to(target, 0.01)?;
        let i_norm = sys.i.mass().sqrt();
        let j_norm = sys.j.mass().sqrt();
        println!(
            "T {target:5.1}  |A|^2 drift {:.2e}  |B|^2 drift {:.2e}  ||I|| {i_norm:.6}  ||J|| {j_norm:.6}",
            sys.a.mass() - ma,
            sys.b.mass() - mb
        );
    }
    Ok(())
}
