//! Pseudo-spectral time integration of the full ion Euler-Poisson system.
//!
//! The state is advanced in the diagonal variables `U_{+-1} = (rho -+ q^{-1} v) / 2`
//! with an integrating-factor (Lawson) RK4 scheme: the linear part `j Omega`,
//! `Omega^(k) = i w(k)`, is applied exactly in Fourier space and only the
//! nonlinear remainder goes through the Runge-Kutta stages.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::{bracket_sq, omega, q_hat};
use crate::error::{Error, Result};
use crate::spectral::{dealias_in_place, PeriodicGrid, RealField, SpectralField};
use crate::Sign;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest linear wave speed, `sup |w'| = w'(0) = sqrt(2)`.
pub const MAX_WAVE_SPEED: f64 = std::f64::consts::SQRT_2;

#[derive(Clone, Debug)]
pub struct EPState {
    pub rho: RealField,
    pub v: RealField,
    pub t: f64,
}

impl EPState {
    pub fn new(rho: RealField, v: RealField, t: f64) -> Result<Self> {
        if rho.grid() != v.grid() {
            return Err(Error::GridMismatch("rho and v live on different grids".into()));
        }
        Ok(Self { rho, v, t })
    }

    pub fn zeros(grid: &PeriodicGrid) -> Self {
        Self {
            rho: RealField::zeros(grid),
            v: RealField::zeros(grid),
            t: 0.0,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.rho.grid()
    }

    pub fn min_density(&self) -> f64 {
        1.0 + self.rho.min()
    }

    /// Total mass perturbation `int rho dx`.
    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }

    /// Quadratic-order energy `int (rho^2 + v^2 + phi^2 + (d_x phi)^2) / 2 dx`.
    pub fn quadratic_energy(&self, cfg: &PoissonConfig) -> Result<f64> {
        let phi = solve_poisson(&self.rho, cfg)?;
        let phi_x = phi.derivative(1);
        let dx = self.grid().dx();
        let sum: f64 = (0..self.grid().n())
            .map(|i| {
                let (r, v, p, px) = (self.rho.values()[i], self.v.values()[i], phi.values()[i], phi_x.values()[i]);
                r * r + v * v + p * p + px * px
            })
            .sum();
        Ok(0.5 * sum * dx)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PoissonConfig {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 100 }
    }
}

#[derive(Clone, Debug)]
pub struct PoissonSolution {
    pub phi: Vec<f64>,
    pub iterations: usize,
    pub defect: f64,
}

/// Solve `d_x^2 phi = exp(phi) - 1 - rho` by the fixed point
/// `phi <- (1 - d_x^2)^{-1} (rho + phi + 1 - exp(phi))`, starting from `(1 - d_x^2)^{-1} rho`.
pub fn solve_poisson(rho: &RealField, cfg: &PoissonConfig) -> Result<RealField> {
    let sol = solve_poisson_values(rho.grid(), rho.values(), cfg)?;
    RealField::new(rho.grid().clone(), sol.phi)
}

pub fn solve_poisson_values(grid: &PeriodicGrid, rho: &[f64], cfg: &PoissonConfig) -> Result<PoissonSolution> {
    if !(cfg.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("Poisson tol must be positive, got {}", cfg.tol)));
    }
    let inv = grid.real_symbol(|k| 1.0 / bracket_sq(k));
    let n = grid.n();
    let mut buf: Vec<Complex64> = rho.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    grid.forward_in_place(&mut buf);
    for (c, s) in buf.iter_mut().zip(&inv) {
        *c *= s;
    }
    grid.inverse_in_place(&mut buf);
    let mut phi: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mut next = vec![0.0; n];
    let mut prev_defect = f64::INFINITY;
    let mut growth = 0;
    for it in 1..=cfg.max_iter {
        for i in 0..n {
            buf[i] = Complex64::new(rho[i] - phi[i].exp_m1() + phi[i], 0.0);
        }
        grid.forward_in_place(&mut buf);
        for (c, s) in buf.iter_mut().zip(&inv) {
            *c *= s;
        }
        grid.inverse_in_place(&mut buf);
        for i in 0..n {
            next[i] = buf[i].re;
        }
        // With (1 - d^2) next = rho + phi - expm1(phi), the defect of `next` is pointwise:
        // d^2 next - expm1(next) + rho = next - phi + expm1(phi) - expm1(next).
        let defect = (0..n)
            .map(|i| (next[i] - phi[i] + phi[i].exp_m1() - next[i].exp_m1()).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut phi, &mut next);
        if !defect.is_finite() {
            return Err(Error::PoissonDiverged { iteration: it, defect });
        }
        if defect <= cfg.tol {
            return Ok(PoissonSolution { phi, iterations: it, defect });
        }
        if defect > prev_defect {
            growth += 1;
            if growth >= 5 {
                return Err(Error::PoissonDiverged { iteration: it, defect });
            }
        } else {
            growth = 0;
        }
        prev_defect = defect;
    }
    Err(Error::PoissonNotConverged { iterations: cfg.max_iter, defect: prev_defect })
}

/// `max |d_x^2 phi - (exp(phi) - 1 - rho)|` with a spectral second derivative.
pub fn poisson_defect(rho: &RealField, phi: &RealField) -> Result<f64> {
    let phi_xx = phi.derivative(2);
    let mut worst = 0.0f64;
    for ((p2, p), r) in phi_xx.values().iter().zip(phi.values()).zip(rho.values()) {
        worst = worst.max((p2 - (p.exp_m1() - r)).abs());
    }
    Ok(worst)
}

/// Diagonal variables `(U_1, U_-1)` of a physical state.
pub fn diagonalize(state: &EPState) -> (RealField, RealField) {
    let grid = state.grid();
    let rho = state.rho.spectrum();
    let v = state.v.spectrum();
    let mut u1 = rho.clone();
    let mut um1 = rho.clone();
    for i in 0..grid.n() {
        let qv = v.coefs()[i] / q_hat(grid.wavenumber(i));
        u1.coefs_mut()[i] = 0.5 * (rho.coefs()[i] - qv);
        um1.coefs_mut()[i] = 0.5 * (rho.coefs()[i] + qv);
    }
    (u1.to_real(), um1.to_real())
}

/// Physical state `rho = U_1 + U_-1`, `v = q (U_-1 - U_1)`.
pub fn undiagonalize(u1: &RealField, um1: &RealField, t: f64) -> Result<EPState> {
    if u1.grid() != um1.grid() {
        return Err(Error::GridMismatch("U_1 and U_-1 live on different grids".into()));
    }
    let grid = u1.grid().clone();
    let a = u1.spectrum();
    let b = um1.spectrum();
    let (rho, v) = physical_from_diagonal(&grid, a.coefs(), b.coefs());
    EPState::new(
        RealField::new(grid.clone(), grid.inverse_real(&rho))?,
        RealField::new(grid.clone(), grid.inverse_real(&v))?,
        t,
    )
}

/// Spectra of `(rho, v)` from diagonal spectra.
pub fn physical_from_diagonal(grid: &PeriodicGrid, u1: &[Complex64], um1: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rho = Vec::with_capacity(grid.n());
    let mut v = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        rho.push(u1[i] + um1[i]);
        v.push(q_hat(grid.wavenumber(i)) * (um1[i] - u1[i]));
    }
    (rho, v)
}

/// Right-hand side of the physical system,
/// `d_t rho = -d_x v - d_x(rho v)`, `d_t v = -v d_x v - d_x rho / (1 + rho) - d_x phi(rho)`.
/// Products are formed from dealiased inputs and the output is dealiased.
pub fn ep_rhs(state: &EPState, cfg: &PoissonConfig) -> Result<(RealField, RealField)> {
    ep_rhs_with(state, cfg, true)
}

/// [`ep_rhs`] with dealiasing switched on or off; without it the products are exact
/// whenever the doubled spectral support still fits on the grid.
pub fn ep_rhs_with(state: &EPState, cfg: &PoissonConfig, dealias: bool) -> Result<(RealField, RealField)> {
    let ws = Workspace::new(state.grid());
    let grid = state.grid();
    let mut rho = state.rho.spectrum().into_coefs();
    let mut v = state.v.spectrum().into_coefs();
    if dealias {
        dealias_in_place(grid, &mut rho);
        dealias_in_place(grid, &mut v);
    }
    let (nr, nv) = ws.nonlinear_physical(&rho, &v, cfg, dealias)?;
    let mut drho = Vec::with_capacity(grid.n());
    let mut dv = Vec::with_capacity(grid.n());
    for i in 0..grid.n() {
        let ik = Complex64::new(0.0, ws.k[i]);
        drho.push(nr[i] - ik * v[i]);
        dv.push(nv[i] - ik * rho[i] * (1.0 + ws.inv_bracket[i]));
    }
    drho[grid.nyquist_index()] = ZERO;
    dv[grid.nyquist_index()] = ZERO;
    Ok((
        RealField::new(grid.clone(), grid.inverse_real(&drho))?,
        RealField::new(grid.clone(), grid.inverse_real(&dv))?,
    ))
}

/// Tabulated symbols and scratch buffers for one grid.
struct Workspace {
    grid: PeriodicGrid,
    k: Vec<f64>,
    q: Vec<f64>,
    inv_bracket: Vec<f64>,
    omega: Vec<f64>,
}

impl Workspace {
    fn new(grid: &PeriodicGrid) -> Self {
        Self {
            grid: grid.clone(),
            k: grid.wavenumbers(),
            q: grid.real_symbol(q_hat),
            inv_bracket: grid.real_symbol(|k| 1.0 / bracket_sq(k)),
            omega: grid.real_symbol(omega),
        }
    }

    fn to_x(&self, coefs: &[Complex64]) -> Vec<f64> {
        self.grid.inverse_real(coefs)
    }

    fn deriv_x(&self, coefs: &[Complex64]) -> Vec<f64> {
        let mut d: Vec<Complex64> = coefs
            .iter()
            .zip(&self.k)
            .map(|(c, &k)| c * Complex64::new(0.0, k))
            .collect();
        d[self.grid.nyquist_index()] = ZERO;
        self.grid.inverse_real(&d)
    }

    /// Nonlinear parts `(N_rho, N_v)` in Fourier space from (already dealiased) spectra of rho, v:
    /// `N_rho = -d_x(rho v)`,
    /// `N_v = -v v_x + rho_x rho / (1 + rho) - d_x(phi - <d>^-2 rho)`.
    fn nonlinear_physical(
        &self,
        rho_hat: &[Complex64],
        v_hat: &[Complex64],
        cfg: &PoissonConfig,
        dealias_out: bool,
    ) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let n = self.grid.n();
        let rho = self.to_x(rho_hat);
        let v = self.to_x(v_hat);
        let rho_x = self.deriv_x(rho_hat);
        let v_x = self.deriv_x(v_hat);
        let min_density = rho.iter().fold(f64::INFINITY, |m, r| m.min(1.0 + r));
        if !(min_density > 0.0) {
            return Err(Error::Vacuum { min_density });
        }
        let phi = solve_poisson_values(&self.grid, &rho, cfg)?.phi;
        let phi_lin: Vec<Complex64> = rho_hat
            .iter()
            .zip(&self.inv_bracket)
            .map(|(c, s)| c * s)
            .collect();
        let phi_lin_x = self.to_x(&phi_lin);

        let mut flux = vec![ZERO; n];
        let mut momentum = vec![ZERO; n];
        let mut potential = vec![ZERO; n];
        for i in 0..n {
            flux[i] = Complex64::new(rho[i] * v[i], 0.0);
            momentum[i] = Complex64::new(-v[i] * v_x[i] + rho_x[i] * rho[i] / (1.0 + rho[i]), 0.0);
            potential[i] = Complex64::new(phi[i] - phi_lin_x[i], 0.0);
        }
        self.grid.forward_in_place(&mut flux);
        self.grid.forward_in_place(&mut momentum);
        self.grid.forward_in_place(&mut potential);
        let mut nr = vec![ZERO; n];
        let mut nv = vec![ZERO; n];
        for i in 0..n {
            let ik = Complex64::new(0.0, self.k[i]);
            nr[i] = -ik * flux[i];
            nv[i] = momentum[i] - ik * potential[i];
        }
        nr[self.grid.nyquist_index()] = ZERO;
        nv[self.grid.nyquist_index()] = ZERO;
        if dealias_out {
            dealias_in_place(&self.grid, &mut nr);
            dealias_in_place(&self.grid, &mut nv);
        }
        Ok((nr, nv))
    }

    /// Nonlinear part of `d_t U_j` for both components: `(N_rho - j q^{-1} N_v) / 2`.
    fn nonlinear_diagonal(&self, u: &[Vec<Complex64>; 2], cfg: &PoissonConfig, dealias: bool) -> Result<[Vec<Complex64>; 2]> {
        let n = self.grid.n();
        let mut rho = vec![ZERO; n];
        let mut v = vec![ZERO; n];
        for i in 0..n {
            rho[i] = u[0][i] + u[1][i];
            v[i] = self.q[i] * (u[1][i] - u[0][i]);
        }
        if dealias {
            dealias_in_place(&self.grid, &mut rho);
            dealias_in_place(&self.grid, &mut v);
        }
        let (nr, nv) = self.nonlinear_physical(&rho, &v, cfg, dealias)?;
        let mut out = [vec![ZERO; n], vec![ZERO; n]];
        for i in 0..n {
            let w = nv[i] / self.q[i];
            out[0][i] = 0.5 * (nr[i] - w);
            out[1][i] = 0.5 * (nr[i] + w);
        }
        Ok(out)
    }
}

/// Public access to the nonlinear part of the diagonalized right-hand side,
/// `(N_{U_1}, N_{U_-1})` in Fourier coefficients, for the given diagonal spectra.
pub fn diagonal_nonlinearity(
    grid: &PeriodicGrid,
    u1: &[Complex64],
    um1: &[Complex64],
    cfg: &PoissonConfig,
    dealias: bool,
) -> Result<[Vec<Complex64>; 2]> {
    let ws = Workspace::new(grid);
    ws.nonlinear_diagonal(&[u1.to_vec(), um1.to_vec()], cfg, dealias)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub poisson: PoissonConfig,
    /// Stability constant in `dt <= cfl dx / (max|v| + sqrt 2)`.
    pub cfl: f64,
    pub dealias: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            poisson: PoissonConfig::default(),
            cfl: 0.5,
            dealias: true,
        }
    }
}

/// Observer decision after each callback.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Integrating-factor RK4 integrator on a fixed grid.
pub struct EpSolver {
    cfg: SolverConfig,
    ws: Workspace,
}

/// Spectral diagonal state used inside the integrator.
#[derive(Clone, Debug)]
pub struct DiagonalState {
    pub u: [Vec<Complex64>; 2],
    pub t: f64,
}

impl EpSolver {
    pub fn new(grid: &PeriodicGrid, cfg: SolverConfig) -> Self {
        Self {
            cfg,
            ws: Workspace::new(grid),
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.ws.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn to_diagonal(&self, state: &EPState) -> Result<DiagonalState> {
        if state.grid() != self.grid() {
            return Err(Error::GridMismatch("state grid differs from solver grid".into()));
        }
        let (u1, um1) = diagonalize(state);
        Ok(DiagonalState {
            u: [u1.spectrum().into_coefs(), um1.spectrum().into_coefs()],
            t: state.t,
        })
    }

    pub fn to_physical(&self, d: &DiagonalState) -> Result<EPState> {
        let grid = self.grid();
        let (rho, v) = physical_from_diagonal(grid, &d.u[0], &d.u[1]);
        EPState::new(
            RealField::new(grid.clone(), grid.inverse_real(&rho))?,
            RealField::new(grid.clone(), grid.inverse_real(&v))?,
            d.t,
        )
    }

    /// Largest stable step for the given state.
    pub fn cfl_bound(&self, d: &DiagonalState) -> f64 {
        let grid = self.grid();
        let v: Vec<Complex64> = (0..grid.n()).map(|i| self.ws.q[i] * (d.u[1][i] - d.u[0][i])).collect();
        let vmax = grid.inverse_real(&v).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.cfg.cfl * grid.dx() / (vmax + MAX_WAVE_SPEED)
    }

    fn propagate(&self, u: &[Vec<Complex64>; 2], tau: f64) -> [Vec<Complex64>; 2] {
        let mut out = u.clone();
        for (c, j) in Sign::BOTH.iter().enumerate() {
            for (i, z) in out[c].iter_mut().enumerate() {
                *z *= Complex64::from_polar(1.0, j.value() * self.ws.omega[i] * tau);
            }
        }
        out
    }

    fn nonlinear(&self, u: &[Vec<Complex64>; 2]) -> Result<[Vec<Complex64>; 2]> {
        self.ws.nonlinear_diagonal(u, &self.cfg.poisson, self.cfg.dealias)
    }

    /// One Lawson RK4 step without the stability check.
    pub fn step_diagonal_unchecked(&self, d: &DiagonalState, dt: f64) -> Result<DiagonalState> {
        let h = 0.5 * dt;
        let axpy = |a: &[Vec<Complex64>; 2], s: f64, b: &[Vec<Complex64>; 2]| -> [Vec<Complex64>; 2] {
            let mut out = a.clone();
            for c in 0..2 {
                for (o, x) in out[c].iter_mut().zip(&b[c]) {
                    *o += s * x;
                }
            }
            out
        };
        let u0 = &d.u;
        let k1 = self.nonlinear(u0)?;
        let u0_half = self.propagate(u0, h);
        let k1_half = self.propagate(&k1, h);
        let k2 = self.nonlinear(&axpy(&u0_half, h, &k1_half))?;
        let k3 = self.nonlinear(&axpy(&u0_half, h, &k2))?;
        let k3_half = self.propagate(&k3, h);
        let k4 = self.nonlinear(&axpy(&self.propagate(u0, dt), dt, &k3_half))?;

        // u1 = E u0 + dt/6 (E k1 + 2 E_h (k2 + k3) + k4)
        let mut mid = k2.clone();
        for c in 0..2 {
            for (m, x) in mid[c].iter_mut().zip(&k3[c]) {
                *m += x;
            }
        }
        let mid = self.propagate(&mid, h);
        let mut acc = self.propagate(&k1, dt);
        for c in 0..2 {
            for i in 0..acc[c].len() {
                acc[c][i] += 2.0 * mid[c][i] + k4[c][i];
            }
        }
        let mut next = axpy(&self.propagate(u0, dt), dt / 6.0, &acc);
        let nyq = self.grid().nyquist_index();
        for c in next.iter_mut() {
            c[nyq] = ZERO;
        }
        let t = d.t + dt;
        if next.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { t });
        }
        Ok(DiagonalState { u: next, t })
    }

    pub fn step_diagonal(&self, d: &DiagonalState, dt: f64) -> Result<DiagonalState> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let bound = self.cfl_bound(d);
        if dt > bound {
            return Err(Error::Cfl { dt, bound });
        }
        self.step_diagonal_unchecked(d, dt)
    }

    pub fn step(&self, state: &EPState, dt: f64) -> Result<EPState> {
        let d = self.to_diagonal(state)?;
        self.to_physical(&self.step_diagonal(&d, dt)?)
    }

    /// Integrate to `t_end` with steps of at most `dt` (the last step is shortened to land on
    /// `t_end`). The observer sees the initial state, every `stride`-th step and the final state.
    /// On failure the error carries the last good state.
    pub fn run(
        &self,
        state: &EPState,
        t_end: f64,
        dt: f64,
        stride: usize,
        mut observer: impl FnMut(usize, &EPState) -> Result<Control>,
    ) -> Result<EPState> {
        let mut d = self.to_diagonal(state)?;
        let stride = stride.max(1);
        let mut step = 0usize;
        if observer(0, state)? == Control::Stop {
            return Ok(state.clone());
        }
        while d.t < t_end - 1e-12 * t_end.abs().max(1.0) {
            let h = dt.min(t_end - d.t);
            match self.step_diagonal(&d, h) {
                Ok(next) => d = next,
                Err(e) => {
                    return Err(Error::Aborted {
                        t: d.t,
                        reason: Box::new(e),
                        last_good: Box::new(self.to_physical(&d)?),
                    })
                }
            }
            step += 1;
            let last = d.t >= t_end - 1e-12 * t_end.abs().max(1.0);
            if step % stride == 0 || last {
                let s = self.to_physical(&d)?;
                if observer(step, &s)? == Control::Stop {
                    return Ok(s);
                }
            }
        }
        self.to_physical(&d)
    }

    /// Integrate a diagonal state to `t_end` without observers.
    pub fn advance_diagonal(&self, d: &DiagonalState, t_end: f64, dt: f64) -> Result<DiagonalState> {
        let mut d = d.clone();
        while d.t < t_end - 1e-12 * t_end.abs().max(1.0) {
            let h = dt.min(t_end - d.t);
            d = self.step_diagonal(&d, h)?;
        }
        Ok(d)
    }
}

/// Write `(x, rho, v)` as CSV to `dir/snap_<runid>_<stepindex>.csv`.
pub fn write_snapshot(dir: &std::path::Path, run_id: &str, step: usize, state: &EPState) -> Result<std::path::PathBuf> {
    use std::io::Write;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(format!("snap_{run_id}_{step}.csv"));
    let mut out = String::with_capacity(state.grid().n() * 60);
    out.push_str(&format!("# t = {:.17e}\nx,rho,v\n", state.t));
    for ((x, r), v) in state.grid().points().iter().zip(state.rho.values()).zip(state.v.values()) {
        out.push_str(&format!("{x:.17e},{r:.17e},{v:.17e}\n"));
    }
    let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_gives_zero_potential() {
        let g = PeriodicGrid::new(20.0, 64).unwrap();
        let phi = solve_poisson(&RealField::zeros(&g), &PoissonConfig::default()).unwrap();
        assert_eq!(phi.max_abs(), 0.0);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let g = PeriodicGrid::new(20.0, 64).unwrap();
        let (dr, dv) = ep_rhs(&EPState::zeros(&g), &PoissonConfig::default()).unwrap();
        assert_eq!(dr.max_abs(), 0.0);
        assert_eq!(dv.max_abs(), 0.0);
    }

    #[test]
    fn vacuum_is_rejected() {
        let g = PeriodicGrid::new(20.0, 64).unwrap();
        let rho = RealField::from_fn(&g, |x| -1.5 * (2.0 * std::f64::consts::PI * x / 20.0).cos());
        let s = EPState::new(rho, RealField::zeros(&g), 0.0).unwrap();
        assert!(matches!(ep_rhs(&s, &PoissonConfig::default()), Err(Error::Vacuum { .. })));
    }
}
