//! Modified energy against the plain Sobolev seminorm for a random remainder.

use std::f64::consts::PI;

use num_complex::Complex64;

use iep_core::normal_form::{energy_functional, packet_field, seminorm_sum};
use iep_core::spectral::{PeriodicGrid, RealField};

fn main() -> iep_core::error::Result<()> {
    let (k0, delta) = (1.0, 0.25);
    let g = PeriodicGrid::new(2.0 * PI * 16.0, 256)?;
    let c = 0.5 * g.length();
    let packet = packet_field(&g, |x| Complex64::new((-(x - c).powi(2) / 64.0).exp(), 0.0), k0, delta)?;
    let r = [RealField::random_smooth(&g, 7, 1.5), RealField::random_smooth(&g, 8, 1.5)];
    let zero = [RealField::zeros(&g), RealField::zeros(&g)];
    for s in [0, 2] {
        let reference = seminorm_sum(&r, &zero, s);
        for eps in [0.1, 0.05, 0.025] {
            let e = energy_functional(&r, &r, &packet, &packet, s, eps, k0, delta)?;
            println!("s {s} eps {eps:<6} relative deviation {:.5}", (2.0 * e / reference - 1.0).abs());
        }
    }
    Ok(())
}
