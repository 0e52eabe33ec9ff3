//! Weight function, low/high frequency projections, the normal-form kernels
//! `b^{0,1}`, `b^{1,0}`, `b^{1,1}` and the modified energy.
//!
//! Kernel slots are `(k, km, m)` with `km = k - m`: output wavenumber, wavenumber of
//! the carrier-packet factor and wavenumber of the error factor. The `+` branch pairs
//! with the packet rotating like `e^{Omega t}`, the `-` branch with `e^{-Omega t}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispersion::{bracket_sq, omega, q_hat};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerFit};
use crate::spectral::{PeriodicGrid, RealField, SpectralField};
use crate::Sign;

/// Largest grid accepted by the dense bilinear form.
pub const DENSE_LIMIT: usize = 512;

/// `theta(k) = 1` for `|k| > delta`, `eps + (1 - eps)|k| / delta` otherwise.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub delta: f64,
    pub epsilon: f64,
}

impl WeightFunction {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        if !(delta > 0.0) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "weight needs delta > 0 and eps in (0, 1), got delta = {delta}, eps = {epsilon}"
            )));
        }
        Ok(Self { delta, epsilon })
    }

    pub fn value(&self, k: f64) -> f64 {
        let a = k.abs();
        if a > self.delta {
            1.0
        } else {
            self.epsilon + (1.0 - self.epsilon) * a / self.delta
        }
    }

    /// `theta_0 = theta - eps`, vanishing at `k = 0`.
    pub fn shifted(&self, k: f64) -> f64 {
        self.value(k) - self.epsilon
    }
}

/// `P0 = 1_{|k| <= delta}`, `P1 = 1 - P0`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projectors {
    pub delta: f64,
}

impl Projectors {
    pub fn low(&self, k: f64) -> f64 {
        if k.abs() <= self.delta {
            1.0
        } else {
            0.0
        }
    }

    pub fn high(&self, k: f64) -> f64 {
        1.0 - self.low(k)
    }

    pub fn apply_low<F: SpectralField>(&self, f: &F) -> Result<F> {
        f.apply_multiplier(|k| Complex64::new(self.low(k), 0.0))
    }

    pub fn apply_high<F: SpectralField>(&self, f: &F) -> Result<F> {
        f.apply_multiplier(|k| Complex64::new(self.high(k), 0.0))
    }
}

/// Quadratic symbol `zeta^{+-}_{j,p}(k, km, m)`.
pub fn zeta(j: Sign, p: Sign, sign: Sign, k: f64, km: f64, m: f64) -> f64 {
    let (jv, pv, sv) = (j.value(), p.value(), sign.value());
    let qk = q_hat(k);
    pv * q_hat(m) + sv * q_hat(km) + sv * jv * pv / qk * q_hat(km) * q_hat(m)
        - jv / qk
        - (jv / qk) / (bracket_sq(k) * bracket_sq(km) * bracket_sq(m))
}

/// Normal-form denominator `j w(k) -+ w(km) - p w(m)`.
pub fn resonance(j: Sign, p: Sign, sign: Sign, k: f64, km: f64, m: f64) -> f64 {
    j.value() * omega(k) - sign.value() * omega(km) - p.value() * omega(m)
}

/// Whether `km` lies within `delta` of `+k0` or `-k0`.
pub fn in_packet_band(km: f64, k0: f64, delta: f64) -> bool {
    (km - k0).abs() <= delta || (km + k0).abs() <= delta
}

/// Low-frequency kernel
/// `P0(k) k zeta / (j w(k) -+ w(km) - p w(m)) theta(m) / (2 theta(k))`,
/// zero outside `|k| <= delta`, `|km -+ k0| <= delta` and at `k = 0`.
pub fn kernel_b01(j: Sign, p: Sign, sign: Sign, k: f64, km: f64, m: f64, k0: f64, w: &WeightFunction, proj: &Projectors) -> Result<f64> {
    if proj.low(k) == 0.0 || !in_packet_band(km, k0, w.delta) || k == 0.0 {
        return Ok(0.0);
    }
    let den = resonance(j, p, sign, k, km, m);
    if den == 0.0 {
        return Err(Error::SingularKernel { k, km, m });
    }
    Ok(k * zeta(j, p, sign, k, km, m) / den * w.value(m) / (2.0 * w.value(k)))
}

/// High-frequency kernel against the low-frequency error component, with the packet
/// factor at `carrier k0`: `P1(k) k zeta / (j w(k) -+ w(c k0) - p w(k - c k0)) theta_0(k - c k0) / (2 theta(k))`.
/// Returns 0 where `theta_0` vanishes.
#[allow(clippy::too_many_arguments)]
pub fn kernel_b10(j: Sign, p: Sign, sign: Sign, carrier: Sign, k: f64, k0: f64, w: &WeightFunction, proj: &Projectors) -> Result<f64> {
    let km = carrier.value() * k0;
    let m = k - km;
    let weight = w.shifted(m);
    if proj.high(k) == 0.0 || weight == 0.0 {
        return Ok(0.0);
    }
    let den = resonance(j, p, sign, k, km, m);
    if den == 0.0 {
        return Err(Error::SingularKernel { k, km, m });
    }
    Ok(k * zeta(j, p, sign, k, km, m) / den * weight / (2.0 * w.value(k)))
}

/// High-high kernel `k zeta / (2 (j w(k) -+ w(km) - p w(m)))`.
pub fn kernel_b11(j: Sign, p: Sign, sign: Sign, k: f64, km: f64, m: f64) -> Result<f64> {
    let den = resonance(j, p, sign, k, km, m);
    if den == 0.0 {
        return Err(Error::SingularKernel { k, km, m });
    }
    Ok(0.5 * k * zeta(j, p, sign, k, km, m) / den)
}

/// Large-`k` behaviour of `b^{1,1}` along `km = sign k0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub j: Sign,
    pub p: Sign,
    pub sign: Sign,
    pub ks: Vec<f64>,
    pub values: Vec<f64>,
    /// Limit profile stated for the kernel: `+-q(k0) k / (j km -+ w(km))` for `j = p`,
    /// the constant `-1` for `j = -p`.
    pub stated_limit: Vec<f64>,
    pub stated_fit: PowerFit,
    /// Limit obtained from the kernel itself: same profile for `j = p`, `-1/2` for `j = -p`.
    pub computed_limit: Vec<f64>,
    pub computed_fit: PowerFit,
    /// Exponent the lemma implies for `|b - limit|`: -1 for `j = p`, -2 for `j = -p`.
    pub expected_exponent: f64,
}

pub const ASYMPTOTIC_KS: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

pub fn b11_asymptotics_check(j: Sign, p: Sign, sign: Sign, k0: f64) -> Result<AsymptoticsReport> {
    let km = sign.value() * k0;
    let ks = ASYMPTOTIC_KS.to_vec();
    let mut values = Vec::new();
    let mut stated = Vec::new();
    let mut computed = Vec::new();
    for &k in &ks {
        values.push(kernel_b11(j, p, sign, k, km, k - km)?);
        if j == p {
            let lim = sign.value() * q_hat(k0) * k / (j.value() * km - sign.value() * omega(km));
            stated.push(lim);
            computed.push(lim);
        } else {
            stated.push(-1.0);
            computed.push(-0.5);
        }
    }
    let gap = |lim: &[f64]| -> Vec<f64> { values.iter().zip(lim).map(|(v, l)| (v - l).abs()).collect() };
    let stated_fit = fit_power_law(&ks, &gap(&stated))?;
    let computed_fit = fit_power_law(&ks, &gap(&computed))?;
    Ok(AsymptoticsReport {
        j,
        p,
        sign,
        ks,
        values,
        stated_limit: stated,
        stated_fit,
        computed_limit: computed,
        computed_fit,
        expected_exponent: if j == p { -1.0 } else { -2.0 },
    })
}

/// One sample of a kernel scan.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: f64,
    pub km: f64,
    pub m: f64,
    pub value: f64,
    /// `theta(k) * value`.
    pub bound_product: f64,
}

/// `b^{0,1}` on an `n x n` grid covering `|k| <= delta`, `|km - sign k0| <= delta`.
pub fn scan_b01(j: Sign, p: Sign, sign: Sign, k0: f64, w: &WeightFunction, n: usize) -> Result<Vec<ScanRow>> {
    let proj = Projectors { delta: w.delta };
    let centre = sign.value() * k0;
    let pts = |c: f64| -> Vec<f64> {
        (0..n)
            .map(|i| c - w.delta + 2.0 * w.delta * (i as f64 + 0.5) / n as f64)
            .collect()
    };
    let ks = pts(0.0);
    let kms = pts(centre);
    let rows: Result<Vec<Vec<ScanRow>>> = ks
        .par_iter()
        .map(|&k| {
            kms.iter()
                .map(|&km| {
                    let m = k - km;
                    let value = kernel_b01(j, p, sign, k, km, m, k0, w, &proj)?;
                    Ok(ScanRow { k, km, m, value, bound_product: w.value(k) * value })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

/// `b^{1,0}` along `k` in `[lo, hi]` (points with `|k| <= delta` give 0).
#[allow(clippy::too_many_arguments)]
pub fn scan_b10(j: Sign, p: Sign, sign: Sign, carrier: Sign, k0: f64, w: &WeightFunction, lo: f64, hi: f64, n: usize) -> Result<Vec<ScanRow>> {
    let proj = Projectors { delta: w.delta };
    (0..n)
        .map(|i| {
            let k = lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64;
            let km = carrier.value() * k0;
            let value = kernel_b10(j, p, sign, carrier, k, k0, w, &proj)?;
            Ok(ScanRow { k, km, m: k - km, value, bound_product: w.value(k) * value })
        })
        .collect()
}

pub fn scan_max(rows: &[ScanRow]) -> f64 {
    rows.iter().fold(0.0, |m, r| m.max(r.bound_product.abs()))
}

/// Dense application of `B^{1,1,sign}_{j,p}(h, f)` on a periodic grid:
/// `B(k) = P1(k) sum_m b(k, k - m, m) h(k - m) f(m)` over modes with `h(k - m) != 0`,
/// `|k - m -+ k0| <= delta` and `|m| > delta`.
pub fn apply_b11(j: Sign, p: Sign, sign: Sign, h: &RealField, f: &RealField, k0: f64, delta: f64) -> Result<RealField> {
    let grid = h.grid();
    if f.grid() != grid {
        return Err(Error::GridMismatch("B11 factors on different grids".into()));
    }
    let n = grid.n();
    if n > DENSE_LIMIT {
        return Err(Error::TooLarge { n, limit: DENSE_LIMIT });
    }
    let hh = h.spectrum();
    let ff = f.spectrum();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (ik, slot) in out.iter_mut().enumerate() {
        let k = grid.wavenumber(ik);
        if k.abs() <= delta || ik == grid.nyquist_index() {
            continue;
        }
        let mk = grid.mode(ik);
        let mut acc = Complex64::new(0.0, 0.0);
        for im in 0..n {
            let m = grid.wavenumber(im);
            if m.abs() <= delta || im == grid.nyquist_index() {
                continue;
            }
            let Some(ikm) = grid.index(mk - grid.mode(im)) else { continue };
            let km = grid.wavenumber(ikm);
            let hv = hh.coefs()[ikm];
            if hv == Complex64::new(0.0, 0.0) || !in_packet_band(km, k0, delta) {
                continue;
            }
            acc += kernel_b11(j, p, sign, k, km, m)? * hv * ff.coefs()[im];
        }
        *slot = acc;
    }
    Ok(RealField::new(grid.clone(), grid.inverse_real(&out))?)
}

/// `L sum_k conj(f_k) g_k (k^2)^l`, i.e. `int d^l f d^l g dx`.
fn derivative_inner(grid: &PeriodicGrid, f: &[Complex64], g: &[Complex64], l: u32) -> f64 {
    let sum: f64 = f
        .iter()
        .zip(g)
        .enumerate()
        .map(|(i, (a, b))| {
            let k = grid.wavenumber(i);
            (a.conj() * b).re * (k * k).powi(l as i32)
        })
        .sum();
    grid.length() * sum
}

/// Pair of real fields indexed by the component sign (index 0 is `j = 1`).
pub type ComponentPair = [RealField; 2];

/// `sum_{l <= s} sum_j (|d^l R0_j|^2 + |d^l R1_j|^2)`.
pub fn seminorm_sum(r1: &ComponentPair, r0: &ComponentPair, s: u32) -> f64 {
    let mut total = 0.0;
    for f in r1.iter().chain(r0.iter()) {
        let c = f.spectrum();
        for l in 0..=s {
            total += derivative_inner(f.grid(), c.coefs(), c.coefs(), l);
        }
    }
    total
}

/// Modified energy
/// `E_s = sum_{l <= s} sum_j [ (|d^l R0_j|^2 + |d^l R1_j|^2) / 2
///        + eps sum_p int d^l R1_j d^l (B^{+}_{j,p}(psi_c, R1_p) + B^{-}_{j,p}(phi_c, R1_p)) ]`.
///
/// `r1` and `r0` are projected onto `P1` and `P0` before use.
#[allow(clippy::too_many_arguments)]
pub fn energy_functional(
    r1: &ComponentPair,
    r0: &ComponentPair,
    psi_c: &RealField,
    phi_c: &RealField,
    s: u32,
    eps: f64,
    k0: f64,
    delta: f64,
) -> Result<f64> {
    let grid = psi_c.grid();
    if grid.n() > DENSE_LIMIT {
        return Err(Error::TooLarge { n: grid.n(), limit: DENSE_LIMIT });
    }
    let proj = Projectors { delta };
    let r1: Vec<RealField> = r1.iter().map(|f| proj.apply_high(f)).collect::<Result<_>>()?;
    let r0: Vec<RealField> = r0.iter().map(|f| proj.apply_low(f)).collect::<Result<_>>()?;
    let base = 0.5 * seminorm_sum(&[r1[0].clone(), r1[1].clone()], &[r0[0].clone(), r0[1].clone()], s);
    if eps == 0.0 {
        return Ok(base);
    }
    let cross = energy_cross_term(&[r1[0].clone(), r1[1].clone()], psi_c, phi_c, s, k0, delta)?;
    Ok(base + eps * cross)
}

/// The eps-coefficient of [`energy_functional`] (inputs already projected).
pub fn energy_cross_term(r1: &ComponentPair, psi_c: &RealField, phi_c: &RealField, s: u32, k0: f64, delta: f64) -> Result<f64> {
    let grid = psi_c.grid().clone();
    let mut total = 0.0;
    for j in Sign::BOTH {
        let rj = r1[j.index()].spectrum();
        for p in Sign::BOTH {
            let rp = &r1[p.index()];
            let bp = apply_b11(j, p, Sign::Plus, psi_c, rp, k0, delta)?.spectrum();
            let bm = apply_b11(j, p, Sign::Minus, phi_c, rp, k0, delta)?.spectrum();
            for l in 0..=s {
                total += derivative_inner(&grid, rj.coefs(), bp.coefs(), l);
                total += derivative_inner(&grid, rj.coefs(), bm.coefs(), l);
            }
        }
    }
    Ok(total)
}

/// Real packet `A(x) e^{i sign k0 x} + c.c.` restricted to `|k -+ k0| <= delta`.
pub fn packet_field(grid: &PeriodicGrid, envelope: impl Fn(f64) -> Complex64, k0: f64, delta: f64) -> Result<RealField> {
    let raw = RealField::from_fn(grid, |x| 2.0 * (envelope(x) * Complex64::from_polar(1.0, k0 * x)).re);
    raw.apply_multiplier(|k| Complex64::new(if in_packet_band(k, k0, delta) { 1.0 } else { 0.0 }, 0.0))
}
