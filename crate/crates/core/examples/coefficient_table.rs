//! Interaction coefficients and envelope-equation constants at the unit carrier.

use iep_core::coefficients::coefficient_table;

fn main() -> iep_core::error::Result<()> {
    let t = coefficient_table(1.0)?;
    println!("{}", serde_json::to_string_pretty(&t).expect("table serializes"));
    println!("nu1 {:.6}  nu1_tilde {:.6}  nu2 {:.6}  nu2_tilde {:.6}", t.nu1, t.nu1_tilde, t.nu2, t.nu2_tilde);
    Ok(())
}
