//! Weighted normal-form kernel scans and the high-frequency decay of the high-high kernel.

use iep_core::normal_form::{b11_asymptotics_check, scan_b01, scan_b10, scan_max, WeightFunction};
use iep_core::Sign;

fn main() -> iep_core::error::Result<()> {
    let (k0, delta) = (1.0, 0.25);
    for eps in [1e-2, 1e-3] {
        let w = WeightFunction::new(delta, eps)?;
        let mut b01: f64 = 0.0;
        let mut b10: f64 = 0.0;
        for j in Sign::BOTH {
            for p in Sign::BOTH {
                for s in Sign::BOTH {
                    b01 = b01.max(scan_max(&scan_b01(j, p, s, k0, &w, 200)?));
                    for c in Sign::BOTH {
                        b10 = b10.max(scan_max(&scan_b10(j, p, s, c, k0, &w, -4.0, 4.0, 801)?));
                    }
                }
            }
        }
        println!("eps {eps:.0e}: max weighted b01 {b01:.4}  max weighted b10 {b10:.4}");
    }
    for j in Sign::BOTH {
        for p in Sign::BOTH {
            let r = b11_asymptotics_check(j, p, Sign::Plus, k0)?;
            println!(
                "b11 j {:+} p {:+}: decay exponent {:.3} (expected {:.1}), towards own limit {:.3}",
                j.value(),
                p.value(),
                r.stated_fit.exponent,
                r.expected_exponent,
                r.computed_fit.exponent
            );
        }
    }
    Ok(())
}
