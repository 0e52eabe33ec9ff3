//! Slow-scale envelopes: split-step NLS for `A`, `B`, transport of the
//! interaction correctors `I`, `J`, and the algebraic second-order correctors.
//!
//! `A` and `B` are stored in their comoving frames, `A(xi, theta)` with
//! `xi = X + c_g T` and `B(eta, theta)` with `eta = X - c_g T`; `I` and `J` are
//! stored in the lab frame `X`. Lab-frame values are obtained by exact Fourier
//! phase shifts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::spectral::{ComplexField, PeriodicGrid, RealField, SpectralField};
use crate::Sign;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvelopeRole {
    A,
    B,
    I,
    J,
}

#[derive(Clone, Debug)]
pub struct Envelope {
    field: ComplexField,
    role: EnvelopeRole,
}

impl Envelope {
    pub fn new(grid: PeriodicGrid, values: Vec<Complex64>, role: EnvelopeRole) -> Result<Self> {
        Ok(Self {
            field: ComplexField::new(grid, values)?,
            role,
        })
    }

    pub fn zeros(grid: &PeriodicGrid, role: EnvelopeRole) -> Self {
        Self {
            field: ComplexField::zeros(grid),
            role,
        }
    }

    /// Periodized Gaussian `amplitude exp(-(X - center)^2 / width^2)`, distances taken modulo `L_X`.
    pub fn gaussian(grid: &PeriodicGrid, role: EnvelopeRole, amplitude: Complex64, width: f64, center: f64) -> Self {
        let len = grid.length();
        let field = ComplexField::from_fn(grid, |x| {
            let d = (x - center).rem_euclid(len);
            let d = if d > 0.5 * len { d - len } else { d };
            amplitude * (-(d * d) / (width * width)).exp()
        });
        Self { field, role }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.field.grid()
    }

    pub fn role(&self) -> EnvelopeRole {
        self.role
    }

    pub fn values(&self) -> &[Complex64] {
        self.field.values()
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        Envelope::new(self.grid().clone(), values, self.role)
    }

    /// `int |A|^2 dX`.
    pub fn mass(&self) -> f64 {
        self.field.l2_norm().powi(2)
    }

    pub fn sobolev_norm(&self, s: u32) -> f64 {
        self.field.sobolev_norm(s)
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid().forward(self.values())
    }

    /// Values at `X + shift` (exact for band-limited envelopes).
    pub fn shifted(&self, shift: f64) -> Envelope {
        let values = shift_values(self.grid(), self.values(), shift);
        Envelope {
            field: ComplexField::new(self.grid().clone(), values).expect("same length"),
            role: self.role,
        }
    }

    pub fn derivative(&self, order: u32) -> Vec<Complex64> {
        self.field.derivative(order).into_values()
    }
}

fn shift_values(grid: &PeriodicGrid, values: &[Complex64], shift: f64) -> Vec<Complex64> {
    if shift == 0.0 {
        return values.to_vec();
    }
    let mut buf = grid.forward(values);
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= Complex64::from_polar(1.0, grid.wavenumber(i) * shift);
    }
    grid.inverse_in_place(&mut buf);
    buf
}

/// Parameters of `d_theta A = -dir (i/2) w'' A_XX + i nu A |A|^2` (`dir = +1` for `A`, `-1` for `B`).
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlsParams {
    pub omega2: f64,
    pub nu: f64,
    pub direction: Sign,
}

impl NlsParams {
    pub fn for_a(table: &CoefficientTable) -> Self {
        Self { omega2: table.omega2, nu: table.nu1, direction: Sign::Plus }
    }

    pub fn for_b(table: &CoefficientTable) -> Self {
        Self { omega2: table.omega2, nu: table.nu2, direction: Sign::Minus }
    }
}

/// Right-hand side of the NLS equation in physical space.
pub fn nls_rhs(grid: &PeriodicGrid, values: &[Complex64], p: &NlsParams) -> Vec<Complex64> {
    let mut xx = grid.forward(values);
    for (i, c) in xx.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        *c *= -k * k;
    }
    grid.inverse_in_place(&mut xx);
    values
        .iter()
        .zip(&xx)
        .map(|(a, axx)| -p.direction.value() * 0.5 * p.omega2 * I * axx + I * p.nu * a * a.norm_sqr())
        .collect()
}

/// Strang split step: half nonlinear phase rotation, exact linear step, half rotation.
pub fn nls_step(env: &Envelope, p: &NlsParams, dtheta: f64) -> Result<Envelope> {
    if !(dtheta > 0.0) {
        return Err(Error::InvalidParameter(format!("dtheta must be positive, got {dtheta}")));
    }
    let grid = env.grid();
    let rotate = |v: &mut [Complex64], h: f64| {
        for a in v.iter_mut() {
            *a *= Complex64::from_polar(1.0, p.nu * a.norm_sqr() * h);
        }
    };
    let mut v = env.values().to_vec();
    rotate(&mut v, 0.5 * dtheta);
    grid.forward_in_place(&mut v);
    for (i, c) in v.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        *c *= Complex64::from_polar(1.0, p.direction.value() * 0.5 * p.omega2 * k * k * dtheta);
    }
    grid.inverse_in_place(&mut v);
    rotate(&mut v, 0.5 * dtheta);
    if v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { t: dtheta });
    }
    env.with_values(v)
}

/// Parameters of the interaction transport
/// `d_T I - c_g I_X = i nu1_tilde A |B|^2` and `d_T J + c_g J_X = i nu2_tilde B |A|^2`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportParams {
    pub cg: f64,
    pub nu1_tilde: f64,
    pub nu2_tilde: f64,
}

impl TransportParams {
    pub fn from_table(table: &CoefficientTable) -> Self {
        Self { cg: table.cg, nu1_tilde: table.nu1_tilde, nu2_tilde: table.nu2_tilde }
    }

    /// Advection direction: `+1` for `I` (moves left), `-1` for `J`.
    fn direction(role: EnvelopeRole) -> Result<f64> {
        match role {
            EnvelopeRole::I => Ok(1.0),
            EnvelopeRole::J => Ok(-1.0),
            r => Err(Error::InvalidParameter(format!("transport applies to I or J, got {r:?}"))),
        }
    }
}

/// Source term at slow time `big_t`, with `a`, `b` given in their comoving frames.
pub fn transport_source(role: EnvelopeRole, a: &Envelope, b: &Envelope, big_t: f64, p: &TransportParams) -> Result<Vec<Complex64>> {
    let a_lab = a.shifted(p.cg * big_t);
    let b_lab = b.shifted(-p.cg * big_t);
    let src = match role {
        EnvelopeRole::I => a_lab
            .values()
            .iter()
            .zip(b_lab.values())
            .map(|(x, y)| I * p.nu1_tilde * x * y.norm_sqr())
            .collect(),
        EnvelopeRole::J => b_lab
            .values()
            .iter()
            .zip(a_lab.values())
            .map(|(y, x)| I * p.nu2_tilde * y * x.norm_sqr())
            .collect(),
        r => return Err(Error::InvalidParameter(format!("transport applies to I or J, got {r:?}"))),
    };
    Ok(src)
}

/// `d_T` of `I` or `J` in physical space at slow time `big_t`.
pub fn transport_rhs(target: &Envelope, a: &Envelope, b: &Envelope, big_t: f64, p: &TransportParams) -> Result<Vec<Complex64>> {
    let dir = TransportParams::direction(target.role())?;
    let src = transport_source(target.role(), a, b, big_t, p)?;
    let dx = target.derivative(1);
    Ok(dx.iter().zip(&src).map(|(d, s)| dir * p.cg * d + s).collect())
}

/// Advance `I` or `J` from `big_t` to `big_t + dt` with `a`, `b` frozen in theta: exact
/// advection by a Fourier phase and Simpson quadrature of the Duhamel source integral.
pub fn transport_step(target: &Envelope, a: &Envelope, b: &Envelope, big_t: f64, dt: f64, p: &TransportParams) -> Result<Envelope> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dT must be positive, got {dt}")));
    }
    let dir = TransportParams::direction(target.role())?;
    let grid = target.grid();
    if a.grid() != grid || b.grid() != grid {
        return Err(Error::GridMismatch("envelopes on different slow grids".into()));
    }
    let s0 = grid.forward(&transport_source(target.role(), a, b, big_t, p)?);
    let s1 = grid.forward(&transport_source(target.role(), a, b, big_t + 0.5 * dt, p)?);
    let s2 = grid.forward(&transport_source(target.role(), a, b, big_t + dt, p)?);
    let mut c = target.spectrum();
    for i in 0..grid.n() {
        let k = grid.wavenumber(i);
        let full = Complex64::from_polar(1.0, dir * p.cg * k * dt);
        let half = Complex64::from_polar(1.0, dir * p.cg * k * 0.5 * dt);
        c[i] = full * c[i] + dt / 6.0 * (full * s0[i] + 4.0 * half * s1[i] + s2[i]);
    }
    grid.inverse_in_place(&mut c);
    target.with_values(c)
}

/// Closed-form solution of `h_T - c h_X = F+(X + cT) F-(X - cT)^2`, `h(0) = 0`:
/// `h = F+(X + cT) / (2c) int_{X - cT}^{X + cT} F-(tau)^2 dtau`.
/// The integral is evaluated spectrally (`2 sin(K c T) / K`, with `2 c T` on the mean mode).
pub fn characteristics_oracle(fp: &Envelope, fm: &Envelope, big_t: f64, cg: f64) -> Result<Envelope> {
    let grid = fp.grid();
    if fm.grid() != grid {
        return Err(Error::GridMismatch("oracle profiles on different grids".into()));
    }
    let sq: Vec<Complex64> = fm.values().iter().map(|z| z * z).collect();
    let mut g = grid.forward(&sq);
    for (i, c) in g.iter_mut().enumerate() {
        let k = grid.wavenumber(i);
        let w = if k == 0.0 { 2.0 * cg * big_t } else { 2.0 * (k * cg * big_t).sin() / k };
        *c *= w;
    }
    grid.inverse_in_place(&mut g);
    let fp_shift = fp.shifted(cg * big_t);
    let values = fp_shift.values().iter().zip(&g).map(|(f, s)| f * s / (2.0 * cg)).collect();
    Envelope::new(grid.clone(), values, EnvelopeRole::I)
}

/// Algebraic eps^2 correctors built pointwise from lab-frame envelopes.
#[derive(Clone, Debug)]
pub struct SecondOrderFields {
    pub a0: [RealField; 2],
    pub a2: [ComplexField; 2],
    pub b0: [RealField; 2],
    pub b2: [ComplexField; 2],
    pub f11: [ComplexField; 2],
}

/// Correctors from lab-frame `a`, `b` (index 0 of each array is `j = 1`, index 1 is `j = -1`).
pub fn second_order_fields(a: &Envelope, b: &Envelope, table: &CoefficientTable) -> Result<SecondOrderFields> {
    let grid = a.grid();
    if b.grid() != grid {
        return Err(Error::GridMismatch("A and B on different slow grids".into()));
    }
    let real = |g: f64, f: &dyn Fn(usize) -> f64| {
        RealField::new(grid.clone(), (0..grid.n()).map(|i| g * f(i)).collect()).expect("length")
    };
    let cplx = |g: f64, f: &dyn Fn(usize) -> Complex64| {
        ComplexField::new(grid.clone(), (0..grid.n()).map(|i| g * f(i)).collect()).expect("length")
    };
    let av = a.values();
    let bv = b.values();
    let abs_a = |i: usize| av[i].norm_sqr();
    let abs_b = |i: usize| bv[i].norm_sqr();
    let sq_a = |i: usize| av[i] * av[i];
    let sq_b = |i: usize| bv[i] * bv[i];
    let ab = |i: usize| av[i] * bv[i];
    let per = |j: Sign| {
        (
            real(table.gamma_a0.get(j), &abs_a),
            cplx(table.gamma_a2.get(j), &sq_a),
            real(table.gamma_b0.get(j), &abs_b),
            cplx(table.gamma_b2.get(j), &sq_b),
            cplx(table.gamma_f11.get(j), &ab),
        )
    };
    let (a0p, a2p, b0p, b2p, fp) = per(Sign::Plus);
    let (a0m, a2m, b0m, b2m, fm) = per(Sign::Minus);
    Ok(SecondOrderFields {
        a0: [a0p, a0m],
        a2: [a2p, a2m],
        b0: [b0p, b0m],
        b2: [b2p, b2m],
        f11: [fp, fm],
    })
}

/// The four envelopes together with their slow clocks `T = eps t`, `theta = eps^2 t`.
#[derive(Clone, Debug)]
pub struct EnvelopeSystem {
    pub a: Envelope,
    pub b: Envelope,
    pub i: Envelope,
    pub j: Envelope,
    pub big_t: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub nls_a: NlsParams,
    pub nls_b: NlsParams,
    pub transport: TransportParams,
}

impl EnvelopeSystem {
    /// Start from `A`, `B` at `T = theta = 0` with `I = J = 0`.
    pub fn new(a: Envelope, b: Envelope, epsilon: f64, table: &CoefficientTable) -> Result<Self> {
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch("A and B on different slow grids".into()));
        }
        let grid = a.grid().clone();
        Ok(Self {
            a: Envelope { role: EnvelopeRole::A, ..a },
            b: Envelope { role: EnvelopeRole::B, ..b },
            i: Envelope::zeros(&grid, EnvelopeRole::I),
            j: Envelope::zeros(&grid, EnvelopeRole::J),
            big_t: 0.0,
            theta: 0.0,
            epsilon,
            nls_a: NlsParams::for_a(table),
            nls_b: NlsParams::for_b(table),
            transport: TransportParams::from_table(table),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        self.a.grid()
    }

    /// `A` evaluated in the lab frame, `A(X + c_g T)`.
    pub fn a_lab(&self) -> Envelope {
        self.a.shifted(self.transport.cg * self.big_t)
    }

    /// `B(X - c_g T)`.
    pub fn b_lab(&self) -> Envelope {
        self.b.shifted(-self.transport.cg * self.big_t)
    }

    /// One step of length `d_big_t` in `T`: NLS half step in theta, transport with theta frozen,
    /// NLS half step.
    pub fn advance(&mut self, d_big_t: f64) -> Result<()> {
        let half = 0.5 * self.epsilon * d_big_t;
        if half > 0.0 {
            self.a = nls_step(&self.a, &self.nls_a, half)?;
            self.b = nls_step(&self.b, &self.nls_b, half)?;
        }
        let i_next = transport_step(&self.i, &self.a, &self.b, self.big_t, d_big_t, &self.transport)?;
        let j_next = transport_step(&self.j, &self.a, &self.b, self.big_t, d_big_t, &self.transport)?;
        self.i = i_next;
        self.j = j_next;
        if half > 0.0 {
            self.a = nls_step(&self.a, &self.nls_a, half)?;
            self.b = nls_step(&self.b, &self.nls_b, half)?;
        }
        self.big_t += d_big_t;
        self.theta += 2.0 * half;
        Ok(())
    }

    /// Advance to slow time `target` with steps no longer than `max_step`.
    pub fn advance_to(&mut self, target: f64, max_step: f64) -> Result<()> {
        let span = target - self.big_t;
        if span < -1e-12 {
            return Err(Error::ClockMismatch(format!("cannot go back from T = {} to {target}", self.big_t)));
        }
        if span <= 1e-15 {
            return Ok(());
        }
        let steps = (span / max_step).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.advance(h)?;
        }
        self.big_t = target;
        self.theta = self.epsilon * target;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_linear_phase() {
        let g = PeriodicGrid::new(2.0 * std::f64::consts::PI, 32).unwrap();
        let kk = 3.0;
        let env = Envelope::new(g.clone(), g.points().iter().map(|x| Complex64::from_polar(1.0, kk * x)).collect(), EnvelopeRole::A).unwrap();
        let p = NlsParams { omega2: -0.3, nu: 0.0, direction: Sign::Plus };
        let out = nls_step(&env, &p, 0.1).unwrap();
        let phase = Complex64::from_polar(1.0, 0.5 * p.omega2 * kk * kk * 0.1);
        for (o, e) in out.values().iter().zip(env.values()) {
            assert!((o - e * phase).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_nonlinear_phase() {
        let g = PeriodicGrid::new(10.0, 16).unwrap();
        let c = Complex64::new(0.6, -0.2);
        let env = Envelope::new(g.clone(), vec![c; 16], EnvelopeRole::A).unwrap();
        let p = NlsParams { omega2: 0.0, nu: 1.7, direction: Sign::Plus };
        let out = nls_step(&env, &p, 0.3).unwrap();
        let expected = c * Complex64::from_polar(1.0, 1.7 * c.norm_sqr() * 0.3);
        assert!((out.values()[5] - expected).norm() < 1e-14);
    }

    #[test]
    fn oracle_vanishes_at_zero_time() {
        let g = PeriodicGrid::new(40.0, 64).unwrap();
        let fp = Envelope::gaussian(&g, EnvelopeRole::A, Complex64::new(1.0, 0.0), 2.0, 0.0);
        let h = characteristics_oracle(&fp, &fp, 0.0, 1.0).unwrap();
        assert!(h.field().max_abs() == 0.0);
    }
}
