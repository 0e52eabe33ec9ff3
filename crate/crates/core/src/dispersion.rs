//! Linear dispersion relation `omega(k) = k q(k)`, `q(k) = sqrt((2 + k^2) / (1 + k^2))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Sign;

/// Margins smaller than this in absolute value are flagged as near-resonant.
pub const RESONANCE_THRESHOLD: f64 = 1e-8;

/// `<k>^2 = 1 + k^2`.
pub fn bracket_sq(k: f64) -> f64 {
    1.0 + k * k
}

/// `g(k) = (2 + k^2) / (1 + k^2) = 1 + 1 / (1 + k^2)`.
fn g(k: f64) -> f64 {
    1.0 + 1.0 / bracket_sq(k)
}

/// Symbol of `q(|d_x|)`; even, with `1 < q <= sqrt(2)`.
pub fn q_hat(k: f64) -> f64 {
    g(k).sqrt()
}

pub fn omega(k: f64) -> f64 {
    k * q_hat(k)
}

/// Derivative order accepted by [`omega_deriv`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
    Third,
}

impl TryFrom<u32> for DerivOrder {
    type Error = Error;

    fn try_from(order: u32) -> Result<Self> {
        match order {
            1 => Ok(DerivOrder::First),
            2 => Ok(DerivOrder::Second),
            3 => Ok(DerivOrder::Third),
            o => Err(Error::InvalidParameter(format!(
                "derivative order must be 1, 2 or 3, got {o}"
            ))),
        }
    }
}

/// Derivatives of `h = 1/(1+k^2)` and hence of `g = 1 + h`: returns (g', g'', g''').
fn g_derivs(k: f64) -> (f64, f64, f64) {
    let h = 1.0 / bracket_sq(k);
    let h2 = h * h;
    let h3 = h2 * h;
    let d1 = -2.0 * k * h2;
    let d2 = -2.0 * h2 + 8.0 * k * k * h3;
    let d3 = 24.0 * k * h3 - 48.0 * k * k * k * h3 * h;
    (d1, d2, d3)
}

/// Analytic derivative of `omega` of the given order.
pub fn omega_deriv(k: f64, order: DerivOrder) -> f64 {
    let s = q_hat(k);
    let (g1, g2, g3) = g_derivs(k);
    let s1 = g1 / (2.0 * s);
    let s2 = g2 / (2.0 * s) - g1 * g1 / (4.0 * s * s * s);
    let s3 = g3 / (2.0 * s) - 3.0 * g1 * g2 / (4.0 * s.powi(3)) + 3.0 * g1.powi(3) / (8.0 * s.powi(5));
    match order {
        DerivOrder::First => s + k * s1,
        DerivOrder::Second => 2.0 * s1 + k * s2,
        DerivOrder::Third => 3.0 * s2 + k * s3,
    }
}

/// Derivative of `q_hat`.
pub fn q_hat_deriv(k: f64) -> f64 {
    let (g1, _, _) = g_derivs(k);
    g1 / (2.0 * q_hat(k))
}

pub fn group_velocity(k0: f64) -> f64 {
    omega_deriv(k0, DerivOrder::First)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    pub k0: f64,
    pub omega0: f64,
    pub cg: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub nonresonance_margins: Vec<Margin>,
    /// Labels of margins with absolute value below [`RESONANCE_THRESHOLD`].
    pub flagged: Vec<String>,
}

impl DispersionReport {
    pub fn margin(&self, label: &str) -> Option<f64> {
        self.nonresonance_margins
            .iter()
            .find(|m| m.label == label)
            .map(|m| m.value)
    }

    pub fn min_abs_margin(&self) -> f64 {
        self.nonresonance_margins
            .iter()
            .map(|m| m.value.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Label of the margin `(j1 - j2) omega0 - j omega((j1 + j2) k0)`.
pub fn pair_margin_label(j1: Sign, j2: Sign, j: Sign) -> String {
    format!("({j1}-{j2})w0-{j}w(({j1}+{j2})k0)")
}

pub fn nonresonance_report(k0: f64) -> Result<DispersionReport> {
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::InvalidParameter(format!("k0 must be positive, got {k0}")));
    }
    let omega0 = omega(k0);
    let cg = group_velocity(k0);
    let w1_at_0 = omega_deriv(0.0, DerivOrder::First);
    let mut margins = vec![
        Margin { label: "2w0-w(2k0)".into(), value: 2.0 * omega0 - omega(2.0 * k0) },
        Margin { label: "2w0+w(2k0)".into(), value: 2.0 * omega0 + omega(2.0 * k0) },
        Margin { label: "3w0-w(3k0)".into(), value: 3.0 * omega0 - omega(3.0 * k0) },
        Margin { label: "3w0+w(3k0)".into(), value: 3.0 * omega0 + omega(3.0 * k0) },
    ];
    for j1 in Sign::BOTH {
        for j2 in Sign::BOTH {
            for j in Sign::BOTH {
                let value = (j1.value() - j2.value()) * omega0
                    - j.value() * omega((j1.value() + j2.value()) * k0);
                // (j1 = -j2) gives the k = 0 output; its margin is the frequency alone.
                margins.push(Margin { label: pair_margin_label(j1, j2, j), value });
            }
        }
    }
    margins.push(Margin { label: "cg-w'(0)".into(), value: cg - w1_at_0 });
    margins.push(Margin { label: "cg+w'(0)".into(), value: cg + w1_at_0 });
    let flagged = margins
        .iter()
        .filter(|m| m.value.abs() < RESONANCE_THRESHOLD)
        .map(|m| m.label.clone())
        .collect();
    Ok(DispersionReport {
        k0,
        omega0,
        cg,
        omega2: omega_deriv(k0, DerivOrder::Second),
        omega3: omega_deriv(k0, DerivOrder::Third),
        nonresonance_margins: margins,
        flagged,
    })
}
