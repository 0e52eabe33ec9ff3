//! Carrier data and nonresonance margins for a few carrier wavenumbers.

use iep_core::dispersion::nonresonance_report;

fn main() -> iep_core::error::Result<()> {
    for k0 in [0.5, 1.0, 2.0] {
        let r = nonresonance_report(k0)?;
        println!("k0 = {k0}: omega {:.12} cg {:.12} omega'' {:.12} omega''' {:.12}", r.omega0, r.cg, r.omega2, r.omega3);
        for m in &r.nonresonance_margins {
            println!("  {:<28} {:+.6}", m.label, m.value);
        }
        if !r.flagged.is_empty() {
            println!("  flagged: {:?}", r.flagged);
        }
    }
    Ok(())
}
