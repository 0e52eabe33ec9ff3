//! Quadratic and cubic interaction kernels of the diagonalized system and the
//! corrector / NLS coefficients derived from them.
//!
//! In diagonal variables `rho = U_1 + U_-1`, `v = q (U_-1 - U_1)` the system reads
//!
//! ```text
//! d_t U_j = j Omega U_j + i sum alpha^j_{mn}(k, k-l, l) U_m(k-l) U_n(l)
//!                       + i sum cubic^j(k; p1, p2, p3) rho(p1) rho(p2) rho(p3) + ...
//! ```
//!
//! Slots are always named `(k, kl, l)`: output wavenumber, wavenumber of the
//! first factor and wavenumber of the second factor, with `k = kl + l`.

use serde::{Deserialize, Serialize};

use crate::dispersion::{
    bracket_sq, group_velocity, nonresonance_report, omega, omega_deriv, pair_margin_label, q_hat,
    q_hat_deriv, DerivOrder, DispersionReport,
};
use crate::error::{Error, Result};
use crate::{ByComponent, Sign};

/// Quadratic kernel `alpha^j_{mn}(k, k-l, l)`.
pub fn alpha(j: Sign, m: Sign, n: Sign, k: f64, kl: f64, l: f64) -> f64 {
    let (j, mn, n) = (j.value(), (m * n).value(), n.value());
    let bracket = mn * q_hat(kl) * q_hat(l) - 1.0 - 1.0 / (bracket_sq(k) * bracket_sq(kl) * bracket_sq(l));
    n * 0.5 * k * q_hat(l) + j * k / (4.0 * q_hat(k)) * bracket
}

/// Partial derivative of [`alpha`] in its output slot `k`, the other two slots held fixed.
pub fn dk_alpha(j: Sign, m: Sign, n: Sign, at_k: f64, kl: f64, l: f64) -> f64 {
    let (j, mn, n) = (j.value(), (m * n).value(), n.value());
    let q = q_hat(at_k);
    let dq = q_hat_deriv(at_k);
    let b = bracket_sq(at_k);
    let prod = bracket_sq(kl) * bracket_sq(l);
    // d/dk [k / q(k)]
    let d_ratio = 1.0 / q - at_k * dq / (q * q);
    // d/dk [k / (q(k) <k>^2)]
    let d_ratio_b = d_ratio / b - 2.0 * at_k * at_k / (q * b * b);
    n * 0.5 * q_hat(l) + j / 4.0 * (d_ratio * (mn * q_hat(kl) * q_hat(l) - 1.0) - d_ratio_b / prod)
}

/// Symmetrized kernel for a product of two distinct terms, one in component `m`
/// at wavenumber `p` and one in component `n` at wavenumber `r`:
/// `alpha^j_{mn}(k, p, r) + alpha^j_{nm}(k, r, p)`.
pub fn sigma(j: Sign, m: Sign, n: Sign, k: f64, p: f64, r: f64) -> f64 {
    alpha(j, m, n, k, p, r) + alpha(j, n, m, k, r, p)
}

/// Printed cubic kernel `beta^j(k, k-l, l-s, s)`, independent of the factor components.
pub fn beta(j: Sign, k: f64, kl: f64, ls: f64, s: f64) -> f64 {
    let denom = 2.0 * bracket_sq(k) * bracket_sq(kl) * bracket_sq(ls) * bracket_sq(s);
    -(j.value() * k / (6.0 * q_hat(k))) * ((2.0 - k * k) / denom - 1.0)
}

/// Cubic kernel of the diagonalized system, `cubic^j(k; p1, p2, p3)` with `k = p1 + p2 + p3`,
/// multiplying `rho(p1) rho(p2) rho(p3)` (symmetric in the three factors).
///
/// It collects the cubic part of `-d_x rho / (1 + rho)`, i.e. `-d_x(rho^3 / 3)`, and of
/// `-d_x phi`, where the cubic Poisson term is
/// `phi_3 = <d>^-2 (-phi_1 phi_2 - phi_1^3 / 6)`, `phi_1 = <d>^-2 rho`,
/// `phi_2 = -<d>^-2 phi_1^2 / 2`.
pub fn cubic_kernel(j: Sign, p1: f64, p2: f64, p3: f64) -> f64 {
    let k = p1 + p2 + p3;
    k * j.value() / (2.0 * q_hat(k)) * (1.0 / 3.0 + poisson_cubic_symbol(p1, p2, p3))
}

/// Symmetrized Fourier symbol of the cubic Poisson term `phi_3`.
pub fn poisson_cubic_symbol(p1: f64, p2: f64, p3: f64) -> f64 {
    let k = p1 + p2 + p3;
    let outer = 1.0 / (bracket_sq(k) * bracket_sq(p1) * bracket_sq(p2) * bracket_sq(p3));
    let pair_sum = 1.0 / bracket_sq(k - p1) + 1.0 / bracket_sq(k - p2) + 1.0 / bracket_sq(k - p3);
    outer * (pair_sum / 6.0 - 1.0 / 6.0)
}

/// Corrector and NLS coefficients for carrier wavenumber `k0`.
///
/// Ansatz conventions (`E = e^{i(k0 x + w0 t)}`, `F = e^{i(k0 x - w0 t)}`, envelopes in lab frame):
///
/// ```text
/// U_j = delta_{j,1} eps A E + delta_{j,-1} eps B F + c.c.
///     + eps^2 [ gamma_a0 |A|^2 + gamma_b0 |B|^2 ]
///     + eps^2 [ gamma_a2 A^2 E^2 + gamma_b2 B^2 F^2 + gamma_f11 A B E F + c.c. ]
///     + eps^2 [ delta_{j,1} I E + delta_{j,-1} J F + c.c. ]
/// ```
///
/// with `d_theta A = -(i/2) w'' A_XX + i nu1 A|A|^2`, `d_theta B = (i/2) w'' B_XX + i nu2 B|B|^2`,
/// `d_T I - c_g I_X = i nu1_tilde A|B|^2`, `d_T J + c_g J_X = i nu2_tilde B|A|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub k0: f64,
    pub omega0: f64,
    pub cg: f64,
    pub omega2: f64,
    pub gamma_a2: ByComponent<f64>,
    pub gamma_b2: ByComponent<f64>,
    pub gamma_a0: ByComponent<f64>,
    pub gamma_b0: ByComponent<f64>,
    pub gamma_f11: ByComponent<f64>,
    /// Products `A conj(B) E conj(F)` and `conj(A) B conj(E) F` carry no eps^2 corrector.
    pub gamma_f1m1: ByComponent<f64>,
    pub gamma_fm11: ByComponent<f64>,
    pub nu1: f64,
    pub nu1_tilde: f64,
    pub nu2: f64,
    pub nu2_tilde: f64,
    /// Every denominator used, labelled by the matching nonresonance margin.
    pub denominators: Vec<(String, f64)>,
}

pub fn coefficient_table(k0: f64) -> Result<CoefficientTable> {
    let report = nonresonance_report(k0)?;
    if let Some(label) = report.flagged.first() {
        return Err(Error::NearResonance {
            label: label.clone(),
            value: report.margin(label).unwrap_or(0.0),
        });
    }
    Ok(build_table(&report))
}

fn checked(report: &DispersionReport, label: &str, value: f64, denominators: &mut Vec<(String, f64)>) -> f64 {
    debug_assert!(
        report
            .margin(label)
            .map(|m| (m - value).abs() <= 1e-12 * (1.0 + value.abs()))
            .unwrap_or(false),
        "denominator {label} does not match its margin"
    );
    denominators.push((label.to_string(), value));
    value
}

fn build_table(report: &DispersionReport) -> CoefficientTable {
    use Sign::{Minus, Plus};
    let k0 = report.k0;
    let w0 = omega(k0);
    let cg = group_velocity(k0);
    let w1_0 = omega_deriv(0.0, DerivOrder::First);
    let mut dens = Vec::new();

    let mut gamma_a2 = ByComponent { plus: 0.0, minus: 0.0 };
    let mut gamma_b2 = gamma_a2;
    let mut gamma_a0 = gamma_a2;
    let mut gamma_b0 = gamma_a2;
    let mut gamma_f11 = gamma_a2;
    for j in Sign::BOTH {
        let jv = j.value();
        // E^2: frequency 2 w0 against j w(2 k0).
        let den = 2.0 * w0 - jv * omega(2.0 * k0);
        let label = if j == Plus { "2w0-w(2k0)" } else { "2w0+w(2k0)" };
        let den = checked(report, label, den, &mut dens);
        let g = alpha(j, Plus, Plus, 2.0 * k0, k0, k0) / den;
        set(&mut gamma_a2, j, g);

        // F^2: frequency -2 w0 against j w(2 k0); equals -(2w0 + j w(2k0)).
        let den = -2.0 * w0 - jv * omega(2.0 * k0);
        let label = if j == Plus { "2w0+w(2k0)" } else { "2w0-w(2k0)" };
        let den = -checked(report, label, -den, &mut dens);
        set(&mut gamma_b2, j, alpha(j, Minus, Minus, 2.0 * k0, k0, k0) / den);

        // E F: frequency 0 against j w(2 k0), i.e. the (1 - 1) w0 - j w(2 k0) margin.
        let den = -jv * omega(2.0 * k0);
        let den = checked(report, &pair_margin_label(Plus, Plus, j), den, &mut dens);
        set(&mut gamma_f11, j, sigma(j, Plus, Minus, 2.0 * k0, k0, k0) / den);

        // Mean terms: the k -> 0 limit of the quadratic kernel, from both orderings of the pair.
        let slope_a = dk_alpha(j, Plus, Plus, 0.0, k0, -k0) + dk_alpha(j, Plus, Plus, 0.0, -k0, k0);
        let label = if j == Plus { "cg-w'(0)" } else { "cg+w'(0)" };
        let den = checked(report, label, cg - jv * w1_0, &mut dens);
        set(&mut gamma_a0, j, slope_a / den);

        let slope_b = dk_alpha(j, Minus, Minus, 0.0, k0, -k0) + dk_alpha(j, Minus, Minus, 0.0, -k0, k0);
        let label = if j == Plus { "cg+w'(0)" } else { "cg-w'(0)" };
        let den = -checked(report, label, cg + jv * w1_0, &mut dens);
        set(&mut gamma_b0, j, slope_b / den);
    }

    let cubic_p = cubic_kernel(Plus, k0, k0, -k0);
    let cubic_m = cubic_kernel(Minus, k0, k0, -k0);
    let mut nu1 = 3.0 * cubic_p;
    let mut nu1_tilde = 6.0 * cubic_p;
    let mut nu2 = 3.0 * cubic_m;
    let mut nu2_tilde = 6.0 * cubic_m;
    for j in Sign::BOTH {
        // A E with the mean terms, conj(A) conj(E) with A^2 E^2.
        nu1 += sigma(Plus, Plus, j, k0, k0, 0.0) * gamma_a0.get(j);
        nu1 += sigma(Plus, Plus, j, k0, -k0, 2.0 * k0) * gamma_a2.get(j);
        // A E with the B mean terms, conj(B) conj(F) with A B E F.
        nu1_tilde += sigma(Plus, Plus, j, k0, k0, 0.0) * gamma_b0.get(j);
        nu1_tilde += sigma(Plus, Minus, j, k0, -k0, 2.0 * k0) * gamma_f11.get(j);

        nu2 += sigma(Minus, Minus, j, k0, k0, 0.0) * gamma_b0.get(j);
        nu2 += sigma(Minus, Minus, j, k0, -k0, 2.0 * k0) * gamma_b2.get(j);
        nu2_tilde += sigma(Minus, Minus, j, k0, k0, 0.0) * gamma_a0.get(j);
        nu2_tilde += sigma(Minus, Plus, j, k0, -k0, 2.0 * k0) * gamma_f11.get(j);
    }

    CoefficientTable {
        k0,
        omega0: w0,
        cg,
        omega2: report.omega2,
        gamma_a2,
        gamma_b2,
        gamma_a0,
        gamma_b0,
        gamma_f11,
        gamma_f1m1: ByComponent { plus: 0.0, minus: 0.0 },
        gamma_fm11: ByComponent { plus: 0.0, minus: 0.0 },
        nu1,
        nu1_tilde,
        nu2,
        nu2_tilde,
        denominators: dens,
    }
}

fn set(target: &mut ByComponent<f64>, j: Sign, value: f64) {
    match j {
        Sign::Plus => target.plus = value,
        Sign::Minus => target.minus = value,
    }
}

/// Smallest denominator magnitude used by the table.
pub fn smallest_denominator(table: &CoefficientTable) -> f64 {
    table
        .denominators
        .iter()
        .map(|(_, v)| v.abs())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Sign::Plus;

    #[test]
    fn alpha_reference_value() {
        // q(1) = sqrt(1.5), q(2) = sqrt(1.2), <2>^2 = 5
        let q1 = 1.5f64.sqrt();
        let q2 = 1.2f64.sqrt();
        let expected = q1 + 2.0 / (4.0 * q2) * (q1 * q1 - 1.0 - 1.0 / 20.0);
        let a = alpha(Plus, Plus, Plus, 2.0, 1.0, 1.0);
        assert!((a - expected).abs() < 1e-14);
        assert!((a - 1.43014).abs() < 1e-5);
    }

    #[test]
    fn beta_reference_value() {
        let expected = -(1.0 / (6.0 * 1.5f64.sqrt())) * (1.0 / 32.0 - 1.0);
        assert!((beta(Plus, 1.0, 1.0, 1.0, -1.0) - expected).abs() < 1e-15);
        assert!((expected - 0.1319).abs() < 1e-4);
    }

    #[test]
    fn table_basics() {
        let t = coefficient_table(1.0).unwrap();
        assert!((t.gamma_a2.plus - 5.53).abs() < 0.01);
        assert_eq!(t.gamma_f1m1.plus, 0.0);
        assert_eq!(t.gamma_fm11.minus, 0.0);
        assert!(t.denominators.iter().all(|(_, d)| d.abs() > 1e-3));
    }
}
