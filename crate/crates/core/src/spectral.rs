//! Periodic grids, FFT-based spectra, Fourier multipliers, Sobolev norms and dealiasing.
//!
//! Convention: the forward transform carries the factor `1/N`, so a field is
//! `f(x) = sum_j c_j exp(i k_j x)` with `k_j = 2 pi j / L`. With this scaling the
//! continuum identity `int_0^L |f|^2 dx = L sum_j |c_j|^2` holds exactly for
//! band-limited samples, and `sobolev_norm` is normalized to match it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, L)` with `N` points, `N` a power of two.
#[derive(Clone)]
pub struct PeriodicGrid {
    length: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("length", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl PeriodicGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("N must be a power of two >= 2, got {n}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            length,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Largest resolved wavenumber `pi N / L`.
    pub fn kmax(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// Spacing of the wavenumber lattice, `2 pi / L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed mode number of storage index `i` (FFT order), in `[-N/2, N/2)`.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Storage index of a signed mode number, if it is on the grid.
    pub fn index(&self, mode: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if mode < -half || mode >= half {
            None
        } else if mode >= 0 {
            Some(mode as usize)
        } else {
            Some((mode + self.n as i64) as usize)
        }
    }

    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    pub fn wavenumber(&self, i: usize) -> f64 {
        self.dk() * self.mode(i) as f64
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n).map(|i| i as f64 * dx).collect()
    }

    /// Tabulate a symbol on the grid wavenumbers.
    pub fn symbol(&self, m: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let k = self.wavenumber(i);
            let v = m(k);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteMultiplier { k });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Real-valued symbol, tabulated without finiteness checks (callers guarantee finiteness).
    pub fn real_symbol(&self, m: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| m(self.wavenumber(i))).collect()
    }

    pub fn forward(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward_in_place(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    pub fn inverse(&self, coefs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = coefs.to_vec();
        self.inverse_in_place(&mut buf);
        buf
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inverse.process(buf);
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut buf);
        buf
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&self, coefs: &[Complex64]) -> Vec<f64> {
        let mut buf = coefs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn check_same(&self, other: &PeriodicGrid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Fourier coefficients of a field, in FFT storage order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    grid: PeriodicGrid,
    coefs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: PeriodicGrid, coefs: Vec<Complex64>) -> Result<Self> {
        if coefs.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {} points",
                coefs.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, coefs })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            grid: grid.clone(),
            coefs: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn coefs(&self) -> &[Complex64] {
        &self.coefs
    }

    pub fn coefs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefs
    }

    pub fn into_coefs(self) -> Vec<Complex64> {
        self.coefs
    }

    /// Coefficient of signed mode `j`, zero if the mode is not on the grid.
    pub fn mode(&self, j: i64) -> Complex64 {
        self.grid
            .index(j)
            .map(|i| self.coefs[i])
            .unwrap_or_default()
    }

    pub fn multiply(&self, m: impl Fn(f64) -> Complex64) -> Result<Spectrum> {
        let sym = self.grid.symbol(m)?;
        let coefs = self.coefs.iter().zip(&sym).map(|(c, s)| c * s).collect();
        Ok(Spectrum {
            grid: self.grid.clone(),
            coefs,
        })
    }

    /// `order`-th spectral derivative. The Nyquist mode is zeroed for odd orders.
    pub fn derivative(&self, order: u32) -> Spectrum {
        let mut out = self.clone();
        for (i, c) in out.coefs.iter_mut().enumerate() {
            let ik = Complex64::new(0.0, self.grid.wavenumber(i));
            *c *= ik.powu(order);
        }
        if order % 2 == 1 {
            let nyq = self.grid.nyquist_index();
            out.coefs[nyq] = Complex64::new(0.0, 0.0);
        }
        out
    }

    pub fn dealias(&self) -> Spectrum {
        let mut out = self.clone();
        dealias_in_place(&self.grid, &mut out.coefs);
        out
    }

    /// Discrete `H^s` norm, `sqrt(L sum_j |c_j|^2 (1 + k_j^2)^s)`.
    pub fn sobolev_norm(&self, s: u32) -> f64 {
        sobolev_norm_coefs(&self.grid, &self.coefs, s)
    }

    pub fn to_real(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.grid.inverse_real(&self.coefs),
        }
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            values: self.grid.inverse(&self.coefs),
        }
    }

    /// Largest violation of `c(-k) = conj(c(k))` over the paired modes.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid.n();
        (1..n / 2)
            .map(|i| (self.coefs[i] - self.coefs[n - i].conj()).norm())
            .fold(self.coefs[0].im.abs(), f64::max)
    }
}

/// Zero all modes with `|j| > N/3` (the two-thirds rule), including the Nyquist mode.
pub fn dealias_in_place(grid: &PeriodicGrid, coefs: &mut [Complex64]) {
    let n = grid.n() as i64;
    for (i, c) in coefs.iter_mut().enumerate() {
        if 3 * grid.mode(i).abs() > n {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

pub fn sobolev_norm_coefs(grid: &PeriodicGrid, coefs: &[Complex64], s: u32) -> f64 {
    let sum: f64 = coefs
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = grid.wavenumber(i);
            c.norm_sqr() * (1.0 + k * k).powi(s as i32)
        })
        .sum();
    (grid.length() * sum).sqrt()
}

/// Common behaviour of real and complex sampled fields.
pub trait SpectralField: Sized {
    fn grid(&self) -> &PeriodicGrid;
    fn spectrum(&self) -> Spectrum;
    fn from_spectrum(spec: &Spectrum) -> Self;

    /// Multiply the spectrum mode by mode with `m(k)`.
    ///
    /// For a `RealField` the result keeps the real part; this is exact when `m`
    /// satisfies `m(-k) = conj(m(k))`.
    fn apply_multiplier(&self, m: impl Fn(f64) -> Complex64) -> Result<Self> {
        Ok(Self::from_spectrum(&self.spectrum().multiply(m)?))
    }

    fn sobolev_norm(&self, s: u32) -> f64 {
        self.spectrum().sobolev_norm(s)
    }

    fn dealias(&self) -> Self {
        Self::from_spectrum(&self.spectrum().dealias())
    }

    fn derivative(&self, order: u32) -> Self {
        Self::from_spectrum(&self.spectrum().derivative(order))
    }
}

#[derive(Clone, Debug)]
pub struct RealField {
    grid: PeriodicGrid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.n()],
        }
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.points().into_iter().map(f).collect(),
        }
    }

    /// Random real field with spectrum `u_j exp(-k^2 / (2 width^2))`, `u_j` uniform in the unit square.
    pub fn random_smooth(grid: &PeriodicGrid, seed: u64, width: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = grid.n();
        let mut coefs = vec![Complex64::new(0.0, 0.0); n];
        for i in 1..n / 2 {
            let k = grid.wavenumber(i);
            let envelope = (-k * k / (2.0 * width * width)).exp();
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * envelope;
            coefs[i] = c;
            coefs[n - i] = c.conj();
        }
        coefs[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        Self {
            grid: grid.clone(),
            values: grid.inverse_real(&coefs),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Trapezoid integral over one period (spectrally exact for band-limited fields).
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn zip_map(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<RealField> {
        self.grid.check_same(&other.grid)?;
        Ok(RealField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl SpectralField for RealField {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn spectrum(&self) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coefs: self.grid.forward_real(&self.values),
        }
    }

    fn from_spectrum(spec: &Spectrum) -> Self {
        spec.to_real()
    }
}

#[derive(Clone, Debug)]
pub struct ComplexField {
    grid: PeriodicGrid,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: PeriodicGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    pub fn from_fn(grid: &PeriodicGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid: grid.clone(),
            values: grid.points().into_iter().map(f).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()).sqrt()
    }

    pub fn real_part(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|c| c.re).collect(),
        }
    }
}

impl SpectralField for ComplexField {
    fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    fn spectrum(&self) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coefs: self.grid.forward(&self.values),
        }
    }

    fn from_spectrum(spec: &Spectrum) -> Self {
        spec.to_complex()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers_are_the_arithmetic_set() {
        let g = PeriodicGrid::new(4.0, 8).unwrap();
        let ks = g.wavenumbers();
        let expected: Vec<f64> = [0, 1, 2, 3, -4, -3, -2, -1]
            .iter()
            .map(|&j| 2.0 * PI * j as f64 / 4.0)
            .collect();
        assert_eq!(ks, expected);
        assert_eq!(g.index(-4), Some(4));
        assert_eq!(g.index(4), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(PeriodicGrid::new(1.0, 12).is_err());
        assert!(PeriodicGrid::new(0.0, 16).is_err());
    }

    #[test]
    fn identity_multiplier() {
        let g = PeriodicGrid::new(2.0 * PI, 32).unwrap();
        let f = RealField::from_fn(&g, |x| (x.sin() * 2.0).exp());
        let h = f.apply_multiplier(|_| Complex64::new(1.0, 0.0)).unwrap();
        for (a, b) in f.values().iter().zip(h.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn non_finite_multiplier_reports_k() {
        let g = PeriodicGrid::new(2.0 * PI, 16).unwrap();
        let f = RealField::zeros(&g);
        let err = f
            .apply_multiplier(|k| Complex64::new(1.0 / k, 0.0))
            .unwrap_err();
        match err {
            Error::NonFiniteMultiplier { k } => assert_eq!(k, 0.0),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn dealias_keeps_low_band_and_kills_top_band() {
        let g = PeriodicGrid::new(2.0 * PI, 64).unwrap();
        let low = RealField::from_fn(&g, |x| (3.0 * x).cos() + (21.0 * x).sin());
        let d = low.dealias();
        for (a, b) in low.values().iter().zip(d.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        let top = RealField::from_fn(&g, |x| (25.0 * x).cos());
        assert!(top.dealias().max_abs() < 1e-13);
    }
}
