#![allow(dead_code)]

use num_complex::Complex64;

use iep_core::dispersion::bracket_sq;
use iep_core::spectral::{PeriodicGrid, RealField, SpectralField};

pub fn inv_bracket(f: &RealField) -> RealField {
    f.apply_multiplier(|k| Complex64::new(1.0 / bracket_sq(k), 0.0)).unwrap()
}

pub fn add(a: &RealField, b: &RealField) -> RealField {
    a.zip_map(b, |x, y| x + y).unwrap()
}

/// Three-term small-amplitude inverse of `d_x^2 phi = e^phi - 1 - rho`:
/// `phi_1 = <d>^-2 rho`, `phi_2 = -<d>^-2 phi_1^2 / 2`, `phi_3 = -<d>^-2 (phi_1 phi_2 + phi_1^3 / 6)`.
pub fn poisson_series(rho: &RealField) -> RealField {
    let phi1 = inv_bracket(rho);
    let phi2 = inv_bracket(&phi1.map(|p| -0.5 * p * p));
    let src = phi1.zip_map(&phi2, |p1, p2| -(p1 * p2 + p1 * p1 * p1 / 6.0)).unwrap();
    add(&add(&phi1, &phi2), &inv_bracket(&src))
}

/// The same series with the cubic term in the printed form `-(1/6)(2 + d^2)(1 - d^2)^-2 phi_1^3`.
pub fn poisson_series_printed(rho: &RealField) -> RealField {
    let phi1 = inv_bracket(rho);
    let phi2 = inv_bracket(&phi1.map(|p| -0.5 * p * p));
    let cube = phi1.map(|p| p * p * p);
    let phi3 = cube
        .apply_multiplier(|k| Complex64::new(-(2.0 - k * k) / (6.0 * bracket_sq(k) * bracket_sq(k)), 0.0))
        .unwrap();
    add(&add(&phi1, &phi2), &phi3)
}

pub fn gaussian(grid: &PeriodicGrid, amp: f64, width: f64) -> RealField {
    let c = 0.5 * grid.length();
    RealField::from_fn(grid, |x| amp * (-(x - c) * (x - c) / (width * width)).exp())
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_diff_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Centered finite difference.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
