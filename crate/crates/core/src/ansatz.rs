//! Assembly of the bidirectional approximation on the fine grid, its exact time
//! derivative, and its residual in the full Euler-Poisson system.
//!
//! Every ansatz term has the form `eps^p a(X, T, theta) e^{i(n k0 x + f w0 t)}` in one
//! diagonal component. A slow-grid coefficient with mode number `m` lands exactly on
//! fine mode `m + n n0`, where `n0 = k0 L / (2 pi)` is the carrier mode number, because
//! `L_X = eps L`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{coefficient_table, CoefficientTable};
use crate::ep::{diagonalize, ep_rhs_with, physical_from_diagonal, EPState, PoissonConfig};
use crate::envelope::{nls_rhs, transport_rhs, EnvelopeSystem};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm_coefs, PeriodicGrid, RealField, SpectralField, Spectrum};
use crate::Sign;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzOrder {
    /// `eps A E + eps B F + c.c.`
    Leading,
    /// Leading order plus all eps^2 correctors.
    Second,
}

#[derive(Clone, Debug)]
pub struct AnsatzConfig {
    pub epsilon: f64,
    pub k0: f64,
    pub order: AnsatzOrder,
    pub table: CoefficientTable,
    fine: PeriodicGrid,
    slow: PeriodicGrid,
    carrier_mode: i64,
}

impl AnsatzConfig {
    pub fn new(
        epsilon: f64,
        k0: f64,
        order: AnsatzOrder,
        table: CoefficientTable,
        fine: PeriodicGrid,
        slow: PeriodicGrid,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 0.25) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0, 0.25], got {epsilon}")));
        }
        let n0 = k0 * fine.length() / (2.0 * PI);
        if (n0 - n0.round()).abs() > 1e-9 * n0.max(1.0) || n0.round() < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "k0 L / 2pi = {n0} is not a positive integer"
            )));
        }
        if (epsilon * fine.length() - slow.length()).abs() > 1e-9 * slow.length() {
            return Err(Error::InvalidParameter(format!(
                "slow length {} differs from eps L = {}",
                slow.length(),
                epsilon * fine.length()
            )));
        }
        if (table.k0 - k0).abs() > 1e-14 * k0 {
            return Err(Error::InvalidParameter("coefficient table built for another k0".into()));
        }
        Ok(Self {
            epsilon,
            k0,
            order,
            table,
            fine,
            slow,
            carrier_mode: n0.round() as i64,
        })
    }

    /// Build grids for a target slow length: `n0 = round(k0 L_X / (2 pi eps))`,
    /// `L = 2 pi n0 / k0`, `L_X = eps L`.
    pub fn with_domain(epsilon: f64, k0: f64, target_slow_length: f64, n: usize, n_x: usize, order: AnsatzOrder) -> Result<Self> {
        let n0 = (k0 * target_slow_length / (2.0 * PI * epsilon)).round().max(1.0);
        let length = 2.0 * PI * n0 / k0;
        let fine = PeriodicGrid::new(length, n)?;
        let slow = PeriodicGrid::new(epsilon * length, n_x)?;
        Self::new(epsilon, k0, order, coefficient_table(k0)?, fine, slow)
    }

    pub fn with_order(&self, order: AnsatzOrder) -> Self {
        Self { order, ..self.clone() }
    }

    pub fn fine(&self) -> &PeriodicGrid {
        &self.fine
    }

    pub fn slow(&self) -> &PeriodicGrid {
        &self.slow
    }

    pub fn carrier_mode(&self) -> i64 {
        self.carrier_mode
    }

    fn check_clock(&self, env: &EnvelopeSystem, t: f64) -> Result<()> {
        if env.grid() != &self.slow {
            return Err(Error::GridMismatch("envelopes are not on the configured slow grid".into()));
        }
        let (tt, th) = (self.epsilon * t, self.epsilon * self.epsilon * t);
        let tol = 1e-9 * (1.0 + tt.abs());
        if (env.big_t - tt).abs() > tol || (env.theta - th).abs() > tol || (env.epsilon - self.epsilon).abs() > 1e-15 {
            return Err(Error::ClockMismatch(format!(
                "envelopes at (T, theta) = ({}, {}), expected ({tt}, {th}) for t = {t}",
                env.big_t, env.theta
            )));
        }
        Ok(())
    }
}

/// One carrier-envelope term of the ansatz.
struct Term {
    component: Sign,
    wave: i64,
    freq: i32,
    eps_power: i32,
    /// Lab-frame amplitude and its derivative in `t`, sampled on the slow grid.
    amp: Vec<Complex64>,
    damp: Vec<Complex64>,
    /// Real amplitude with no carrier: enters once, without a conjugate partner.
    real_mean: bool,
}

fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn scale(s: f64, a: &[Complex64]) -> Vec<Complex64> {
    a.iter().map(|x| s * x).collect()
}

/// `d(x y) = dx y + x dy`.
fn dprod(x: &[Complex64], dx: &[Complex64], y: &[Complex64], dy: &[Complex64]) -> Vec<Complex64> {
    (0..x.len()).map(|i| dx[i] * y[i] + x[i] * dy[i]).collect()
}

fn terms(cfg: &AnsatzConfig, env: &EnvelopeSystem) -> Result<Vec<Term>> {
    use Sign::{Minus, Plus};
    let eps = cfg.epsilon;
    let cg = cfg.table.cg;
    let grid = &cfg.slow;
    let a = env.a_lab();
    let b = env.b_lab();
    let a_x = a.derivative(1);
    let b_x = b.derivative(1);
    let a_th = nls_rhs(grid, a.values(), &env.nls_a);
    let b_th = nls_rhs(grid, b.values(), &env.nls_b);
    let da: Vec<Complex64> = (0..grid.n()).map(|i| eps * cg * a_x[i] + eps * eps * a_th[i]).collect();
    let db: Vec<Complex64> = (0..grid.n()).map(|i| -eps * cg * b_x[i] + eps * eps * b_th[i]).collect();
    let av = a.values().to_vec();
    let bv = b.values().to_vec();

    let mut out = vec![
        Term { component: Plus, wave: 1, freq: 1, eps_power: 1, amp: av.clone(), damp: da.clone(), real_mean: false },
        Term { component: Minus, wave: 1, freq: -1, eps_power: 1, amp: bv.clone(), damp: db.clone(), real_mean: false },
    ];
    if cfg.order == AnsatzOrder::Leading {
        return Ok(out);
    }

    let a_conj: Vec<Complex64> = av.iter().map(|z| z.conj()).collect();
    let da_conj: Vec<Complex64> = da.iter().map(|z| z.conj()).collect();
    let b_conj: Vec<Complex64> = bv.iter().map(|z| z.conj()).collect();
    let db_conj: Vec<Complex64> = db.iter().map(|z| z.conj()).collect();
    let abs_a = mul(&av, &a_conj);
    let d_abs_a = dprod(&av, &da, &a_conj, &da_conj);
    let abs_b = mul(&bv, &b_conj);
    let d_abs_b = dprod(&bv, &db, &b_conj, &db_conj);
    let sq_a = mul(&av, &av);
    let d_sq_a = dprod(&av, &da, &av, &da);
    let sq_b = mul(&bv, &bv);
    let d_sq_b = dprod(&bv, &db, &bv, &db);
    let ab = mul(&av, &bv);
    let d_ab = dprod(&av, &da, &bv, &db);

    let t = &cfg.table;
    for j in Sign::BOTH {
        let specs: [(f64, &Vec<Complex64>, &Vec<Complex64>, i64, i32, bool); 5] = [
            (t.gamma_a0.get(j), &abs_a, &d_abs_a, 0, 0, true),
            (t.gamma_a2.get(j), &sq_a, &d_sq_a, 2, 2, false),
            (t.gamma_b0.get(j), &abs_b, &d_abs_b, 0, 0, true),
            (t.gamma_b2.get(j), &sq_b, &d_sq_b, 2, -2, false),
            (t.gamma_f11.get(j), &ab, &d_ab, 2, 0, false),
        ];
        for (g, amp, damp, wave, freq, real_mean) in specs {
            out.push(Term {
                component: j,
                wave,
                freq,
                eps_power: 2,
                amp: scale(g, amp),
                damp: scale(g, damp),
                real_mean,
            });
        }
    }
    let di = scale(eps, &transport_rhs(&env.i, &env.a, &env.b, env.big_t, &env.transport)?);
    let dj = scale(eps, &transport_rhs(&env.j, &env.a, &env.b, env.big_t, &env.transport)?);
    out.push(Term { component: Plus, wave: 1, freq: 1, eps_power: 2, amp: env.i.values().to_vec(), damp: di, real_mean: false });
    out.push(Term { component: Minus, wave: 1, freq: -1, eps_power: 2, amp: env.j.values().to_vec(), damp: dj, real_mean: false });
    Ok(out)
}

/// Diagonal spectra `[U_1, U_-1]` (and their time derivatives if requested) at time `t`.
fn place(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64, derivative: bool) -> Result<[Vec<Complex64>; 2]> {
    cfg.check_clock(env, t)?;
    let fine = &cfg.fine;
    let slow = &cfg.slow;
    let n0 = cfg.carrier_mode;
    let w0 = cfg.table.omega0;
    let mut out = [vec![ZERO; fine.n()], vec![ZERO; fine.n()]];
    let half_slow = (slow.n() / 2) as i64;
    for term in terms(cfg, env)? {
        let amp_hat = slow.forward(&term.amp);
        let damp_hat = if derivative { slow.forward(&term.damp) } else { Vec::new() };
        let phase = Complex64::from_polar(cfg.epsilon.powi(term.eps_power), term.freq as f64 * w0 * t);
        let rot = I * (term.freq as f64 * w0);
        let dst = &mut out[term.component.index()];
        for (s, a_hat) in amp_hat.iter().enumerate() {
            let m = slow.mode(s);
            if m == -half_slow {
                continue;
            }
            let value = if derivative { phase * (rot * a_hat + damp_hat[s]) } else { phase * a_hat };
            let mode = m + term.wave * n0;
            let idx = fine.index(mode).ok_or_else(|| {
                Error::InvalidGrid(format!("fine grid too coarse for carrier mode {mode}"))
            })?;
            if term.real_mean {
                dst[idx] += value;
            } else {
                dst[idx] += value;
                let idx_c = fine.index(-mode).ok_or_else(|| {
                    Error::InvalidGrid(format!("fine grid too coarse for carrier mode {}", -mode))
                })?;
                dst[idx_c] += value.conj();
            }
        }
    }
    Ok(out)
}

/// Diagonal spectra `[U_1, U_-1]` of the ansatz at time `t`.
pub fn assemble_diagonal(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64) -> Result<[Spectrum; 2]> {
    let [u1, um1] = place(cfg, env, t, false)?;
    Ok([Spectrum::new(cfg.fine.clone(), u1)?, Spectrum::new(cfg.fine.clone(), um1)?])
}

fn to_state(grid: &PeriodicGrid, u: &[Vec<Complex64>; 2], t: f64) -> Result<EPState> {
    let (rho, v) = physical_from_diagonal(grid, &u[0], &u[1]);
    EPState::new(
        RealField::new(grid.clone(), grid.inverse_real(&rho))?,
        RealField::new(grid.clone(), grid.inverse_real(&v))?,
        t,
    )
}

/// Physical state `(rho, v)` of the ansatz at time `t`.
pub fn assemble(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64) -> Result<EPState> {
    to_state(&cfg.fine, &place(cfg, env, t, false)?, t)
}

/// Exact `(d_t rho, d_t v)` of the ansatz from the carrier phases and the envelope equations.
pub fn ansatz_time_derivative(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64) -> Result<(RealField, RealField)> {
    let s = to_state(&cfg.fine, &place(cfg, env, t, true)?, t)?;
    Ok((s.rho, s.v))
}

/// Diagonal spectra of `d_t U_j` of the ansatz.
pub fn ansatz_time_derivative_diagonal(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64) -> Result<[Spectrum; 2]> {
    let [u1, um1] = place(cfg, env, t, true)?;
    Ok([Spectrum::new(cfg.fine.clone(), u1)?, Spectrum::new(cfg.fine.clone(), um1)?])
}

#[derive(Clone, Debug)]
pub struct Residual {
    pub rho: RealField,
    pub v: RealField,
    /// `s -> sqrt(|res_rho|_{H^s}^2 + |res_v|_{H^s}^2)`.
    pub norms: BTreeMap<u32, f64>,
}

impl Residual {
    /// Residual in diagonal variables `(res_U1, res_U-1)`.
    pub fn diagonal(&self) -> (RealField, RealField) {
        diagonalize(&EPState { rho: self.rho.clone(), v: self.v.clone(), t: 0.0 })
    }
}

/// `res = -d_t U_app + RHS(U_app)` for the full system, with an exact Poisson solve and
/// undealiased products. Norms are reported for `s = 0..=s_max`.
pub fn residual(cfg: &AnsatzConfig, env: &EnvelopeSystem, t: f64, poisson: &PoissonConfig, s_max: u32) -> Result<Residual> {
    let state = assemble(cfg, env, t)?;
    let (dr, dv) = ansatz_time_derivative(cfg, env, t)?;
    let (fr, fv) = ep_rhs_with(&state, poisson, false)?;
    let rho = fr.zip_map(&dr, |f, d| f - d)?;
    let v = fv.zip_map(&dv, |f, d| f - d)?;
    let grid = &cfg.fine;
    let r_hat = grid.forward_real(rho.values());
    let v_hat = grid.forward_real(v.values());
    let norms = (0..=s_max)
        .map(|s| {
            let a = sobolev_norm_coefs(grid, &r_hat, s);
            let b = sobolev_norm_coefs(grid, &v_hat, s);
            (s, (a * a + b * b).sqrt())
        })
        .collect();
    Ok(Residual { rho, v, norms })
}

/// Restrict a real field to the band `|k - k_c| <= half_width` and its mirror image.
pub fn band_restrict(field: &RealField, center: f64, half_width: f64) -> RealField {
    let grid = field.grid();
    let mut c = grid.forward_real(field.values());
    for (i, z) in c.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        if (k.abs() - center).abs() > half_width {
            *z = ZERO;
        }
    }
    RealField::new(grid.clone(), grid.inverse_real(&c)).expect("length")
}
