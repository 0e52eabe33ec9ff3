//! Experiment orchestration: single validation runs, epsilon sweeps with exponent fits,
//! residual-scaling experiments and report files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{assemble, residual, AnsatzConfig, AnsatzOrder};
use crate::envelope::{Envelope, EnvelopeRole, EnvelopeSystem};
use crate::ep::{diagonalize, solve_poisson_values, write_snapshot, Control, EPState, EpSolver, SolverConfig, MAX_WAVE_SPEED};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, PowerFit};
use crate::spectral::SpectralField;

fn default_k0() -> f64 {
    1.0
}
fn default_eps_list() -> Vec<f64> {
    vec![0.14, 0.10, 0.07]
}
fn default_t0() -> f64 {
    0.25
}
fn default_n() -> usize {
    8192
}
fn default_n_x() -> usize {
    512
}
fn default_s() -> u32 {
    2
}
fn default_order() -> AnsatzOrder {
    AnsatzOrder::Second
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_slow_length() -> f64 {
    160.0
}
fn default_stations() -> usize {
    50
}
fn default_envelope_step() -> f64 {
    0.01
}

/// Gaussian envelope data `amp exp(-(X - center)^2 / width^2)` for `A` and `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeInit {
    pub a_amplitude: f64,
    pub b_amplitude: f64,
    pub width: f64,
    pub a_center: f64,
    pub b_center: f64,
}

impl Default for EnvelopeInit {
    fn default() -> Self {
        Self { a_amplitude: 0.1, b_amplitude: 0.1, width: 4.0, a_center: 0.0, b_center: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_k0")]
    pub k0: f64,
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    #[serde(rename = "T0", default = "default_t0")]
    pub t0: f64,
    #[serde(rename = "N", default = "default_n")]
    pub n: usize,
    #[serde(rename = "N_X", default = "default_n_x")]
    pub n_x: usize,
    /// Fixed EP step; `None` picks the step from the stability bound of the initial state.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_s")]
    pub sobolev_s: u32,
    #[serde(default = "default_order")]
    pub ansatz_order: AnsatzOrder,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Target slow period `L_X`; the fine period is adjusted so that `k0 L / 2 pi` is an integer.
    #[serde(default = "default_slow_length")]
    pub slow_length: f64,
    #[serde(default)]
    pub envelope: EnvelopeInit,
    #[serde(default = "default_stations")]
    pub stations: usize,
    /// Largest slow-time step of the envelope solver.
    #[serde(default = "default_envelope_step")]
    pub envelope_step: f64,
    /// Write a snapshot every this many stations.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.eps_list.is_empty() {
            return bad("eps_list is empty".into());
        }
        if self.eps_list.windows(2).any(|w| !(w[0] > w[1])) {
            return bad("eps_list must be strictly decreasing".into());
        }
        if !(self.k0 > 0.0) || !(self.t0 > 0.0) || !(self.slow_length > 0.0) {
            return bad("k0, T0 and slow_length must be positive".into());
        }
        if self.stations < 1 || !(self.envelope_step > 0.0) {
            return bad("need at least one station and a positive envelope step".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        for &eps in &self.eps_list {
            self.ansatz(eps, self.ansatz_order)?;
        }
        Ok(())
    }

    pub fn ansatz(&self, eps: f64, order: AnsatzOrder) -> Result<AnsatzConfig> {
        AnsatzConfig::with_domain(eps, self.k0, self.slow_length, self.n, self.n_x, order)
    }

    pub fn envelopes(&self, acfg: &AnsatzConfig) -> Result<EnvelopeSystem> {
        let e = &self.envelope;
        let slow = acfg.slow();
        let a = Envelope::gaussian(slow, EnvelopeRole::A, Complex64::new(e.a_amplitude, 0.0), e.width, e.a_center);
        let b = Envelope::gaussian(slow, EnvelopeRole::B, Complex64::new(e.b_amplitude, 0.0), e.width, e.b_center);
        EnvelopeSystem::new(a, b, acfg.epsilon, &acfg.table)
    }

    /// `t_end = T0 / eps^2`.
    pub fn horizon(&self, eps: f64) -> f64 {
        self.t0 / (eps * eps)
    }
}

/// Per-epsilon outcome of a validation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub epsilon: f64,
    pub carrier_mode: i64,
    pub length: f64,
    pub slow_length: f64,
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    /// `|U - eps Psi - eps Phi|_{H^s}` in the diagonal variables.
    pub err_leading_diag: Vec<f64>,
    /// The same in `(rho, v)`.
    pub err_leading_phys: Vec<f64>,
    /// Error against the ansatz of the configured order, diagonal and physical.
    pub err_ansatz_diag: Vec<f64>,
    pub err_ansatz_phys: Vec<f64>,
    pub sup_err_leading_diag: f64,
    pub sup_err_leading_phys: f64,
    pub sup_err_ansatz_diag: f64,
    pub sup_err_ansatz_phys: f64,
    /// `sup_t` of the residual `L^2` and `H^s` norms at the sampled residual times.
    pub residual: ResidualEntry,
    pub mass_drift: f64,
    pub max_poisson_defect: f64,
    /// Relative `L^2` drift of `A` and `B` under the envelope solver.
    pub nls_mass_drift: f64,
    /// Set when the EP solver aborted; the series stop at the last good station.
    pub aborted: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub times: Vec<f64>,
    pub leading_l2: f64,
    pub second_l2: f64,
    pub leading_hs: f64,
    pub second_hs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedFit {
    pub name: String,
    pub fit: PowerFit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub entries: Vec<RunEntry>,
    pub fits: Vec<NamedFit>,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self { version: crate::VERSION.to_string(), config: config.clone(), entries: Vec::new(), fits: Vec::new(), checks: Vec::new() }
    }

    pub fn fit(&self, name: &str) -> Option<&PowerFit> {
        self.fits.iter().find(|f| f.name == name).map(|f| &f.fit)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Wall-clock seconds per epsilon, kept out of [`RunReport`] so reports stay byte-identical.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timings {
    pub seconds: Vec<(f64, f64)>,
}

fn diff_state(a: &EPState, b: &EPState) -> Result<EPState> {
    EPState::new(a.rho.zip_map(&b.rho, |x, y| x - y)?, a.v.zip_map(&b.v, |x, y| x - y)?, a.t)
}

fn pair_norm(x: f64, y: f64) -> f64 {
    (x * x + y * y).sqrt()
}

/// `(diagonal, physical)` `H^s` norms of `a - b`.
fn error_norms(a: &EPState, b: &EPState, s: u32) -> Result<(f64, f64)> {
    let d = diff_state(a, b)?;
    let (u1, um1) = diagonalize(&d);
    Ok((
        pair_norm(u1.sobolev_norm(s), um1.sobolev_norm(s)),
        pair_norm(d.rho.sobolev_norm(s), d.v.sobolev_norm(s)),
    ))
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(*x))
}

/// Slow times `T = eps t` at which residuals are sampled.
pub const RESIDUAL_SLOW_TIMES: [f64; 3] = [0.0, 0.5, 1.0];
/// Carrier phases sampled per slow time.
pub const RESIDUAL_PHASES: usize = 8;

/// Sup over [`RESIDUAL_SLOW_TIMES`] of the residual norms of both ansatz orders.
pub fn residual_entry(cfg: &ExperimentConfig, eps: f64) -> Result<ResidualEntry> {
    let lead = cfg.ansatz(eps, AnsatzOrder::Leading)?;
    let second = lead.with_order(AnsatzOrder::Second);
    let mut env = cfg.envelopes(&lead)?;
    let poisson = SolverConfig::default().poisson;
    // Fixed slow times keep the relative position of the two packets independent of eps;
    // around each one the carrier phase is swept over half a period, since the overlap of the
    // counter-propagating packets makes the residual norm oscillate with it.
    let period = std::f64::consts::PI / lead.table.omega0;
    let mut times = Vec::new();
    for big_t in RESIDUAL_SLOW_TIMES {
        for m in 0..RESIDUAL_PHASES {
            let t = big_t / eps + period * m as f64 / RESIDUAL_PHASES as f64;
            if t <= cfg.horizon(eps) {
                times.push(t);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    let mut out = ResidualEntry { times: times.clone(), ..Default::default() };
    let s = cfg.sobolev_s;
    for &t in &times {
        env.advance_to(eps * t, cfg.envelope_step)?;
        let rl = residual(&lead, &env, t, &poisson, s)?;
        let rs = residual(&second, &env, t, &poisson, s)?;
        out.leading_l2 = out.leading_l2.max(rl.norms[&0]);
        out.second_l2 = out.second_l2.max(rs.norms[&0]);
        out.leading_hs = out.leading_hs.max(rl.norms[&s]);
        out.second_hs = out.second_hs.max(rs.norms[&s]);
    }
    Ok(out)
}

/// Start from the ansatz, evolve EP to `T0 / eps^2` and the envelopes on their own clocks,
/// and record the error at equally spaced stations.
pub fn run_validation(cfg: &ExperimentConfig, eps: f64) -> Result<RunEntry> {
    let acfg = cfg.ansatz(eps, cfg.ansatz_order)?;
    let lead = acfg.with_order(AnsatzOrder::Leading);
    let grid = acfg.fine().clone();
    let mut env = cfg.envelopes(&acfg)?;
    let (mass_a0, mass_b0) = (env.a.mass(), env.b.mass());
    let initial = assemble(&acfg, &env, 0.0)?;
    let solver = EpSolver::new(&grid, SolverConfig::default());

    let t_end = cfg.horizon(eps);
    let stations = cfg.stations;
    let station_dt = t_end / stations as f64;
    let dt_target = match cfg.dt {
        Some(dt) => dt,
        // linear waves carry |v| <= sqrt(2) |rho|; keep a factor 1.5 of headroom
        None => {
            let vmax = 1.5 * (initial.v.max_abs() + MAX_WAVE_SPEED * initial.rho.max_abs());
            solver.config().cfl * grid.dx() / (vmax + MAX_WAVE_SPEED)
        }
    };
    let per_station = (station_dt / dt_target).ceil().max(1.0) as usize;
    let dt = station_dt / per_station as f64;

    let mass0 = initial.mass();
    let s = cfg.sobolev_s;
    let poisson = solver.config().poisson;
    let mut entry = RunEntry {
        epsilon: eps,
        carrier_mode: acfg.carrier_mode(),
        length: grid.length(),
        slow_length: acfg.slow().length(),
        dt,
        steps: 0,
        times: Vec::new(),
        err_leading_diag: Vec::new(),
        err_leading_phys: Vec::new(),
        err_ansatz_diag: Vec::new(),
        err_ansatz_phys: Vec::new(),
        sup_err_leading_diag: 0.0,
        sup_err_leading_phys: 0.0,
        sup_err_ansatz_diag: 0.0,
        sup_err_ansatz_phys: 0.0,
        residual: residual_entry(cfg, eps)?,
        mass_drift: 0.0,
        max_poisson_defect: 0.0,
        nls_mass_drift: 0.0,
        aborted: None,
    };
    let run_id = format!("eps{eps}");
    let snap_dir = cfg.output_dir.join("snapshots");

    let outcome = solver.run(&initial, t_end, dt, per_station, |step, state| {
        let t = state.t;
        env.advance_to(eps * t, cfg.envelope_step)?;
        let app = assemble(&acfg, &env, t)?;
        let app_lead = assemble(&lead, &env, t)?;
        let (ld, lp) = error_norms(state, &app_lead, s)?;
        let (ad, ap) = error_norms(state, &app, s)?;
        entry.times.push(state.t);
        entry.err_leading_diag.push(ld);
        entry.err_leading_phys.push(lp);
        entry.err_ansatz_diag.push(ad);
        entry.err_ansatz_phys.push(ap);
        entry.steps = step;
        entry.mass_drift = entry.mass_drift.max((state.mass() - mass0).abs());
        let sol = solve_poisson_values(&grid, state.rho.values(), &poisson)?;
        entry.max_poisson_defect = entry.max_poisson_defect.max(sol.defect);
        let drift = ((env.a.mass() - mass_a0) / mass_a0.max(f64::MIN_POSITIVE))
            .abs()
            .max(if mass_b0 > 0.0 { ((env.b.mass() - mass_b0) / mass_b0).abs() } else { 0.0 });
        entry.nls_mass_drift = entry.nls_mass_drift.max(drift);
        if let Some(every) = cfg.snapshot_every {
            if (step / per_station) % every.max(1) == 0 {
                write_snapshot(&snap_dir, &run_id, step, state)?;
            }
        }
        Ok(Control::Continue)
    });
    match outcome {
        Ok(_) => {}
        Err(Error::Aborted { t, reason, .. }) => entry.aborted = Some(format!("aborted at t = {t}: {reason}")),
        Err(e) => return Err(e),
    }
    entry.sup_err_leading_diag = sup(&entry.err_leading_diag);
    entry.sup_err_leading_phys = sup(&entry.err_leading_phys);
    entry.sup_err_ansatz_diag = sup(&entry.err_ansatz_diag);
    entry.sup_err_ansatz_phys = sup(&entry.err_ansatz_phys);
    Ok(entry)
}

fn named_fit(name: &str, eps: &[f64], ys: &[f64]) -> Option<NamedFit> {
    fit_power_law(eps, ys).ok().map(|fit| NamedFit { name: name.to_string(), fit })
}

pub const ERROR_EXPONENT_MIN: f64 = 1.3;
pub const ERROR_EXPONENT_SE_MAX: f64 = 0.15;
pub const RESIDUAL_LEADING_RANGE: (f64, f64) = (1.3, 2.1);
pub const RESIDUAL_GAIN_MIN: f64 = 0.8;

fn residual_fits(eps: &[f64], res: &[ResidualEntry], fits: &mut Vec<NamedFit>) {
    let col = |f: fn(&ResidualEntry) -> f64| -> Vec<f64> { res.iter().map(f).collect() };
    fits.extend(named_fit("residual_leading_l2", eps, &col(|r| r.leading_l2)));
    fits.extend(named_fit("residual_second_l2", eps, &col(|r| r.second_l2)));
    fits.extend(named_fit("residual_leading_hs", eps, &col(|r| r.leading_hs)));
    fits.extend(named_fit("residual_second_hs", eps, &col(|r| r.second_hs)));
}

fn residual_checks(report: &RunReport) -> Vec<Check> {
    let (Some(l), Some(s)) = (report.fit("residual_leading_l2"), report.fit("residual_second_l2")) else {
        return vec![Check { name: "residual hierarchy".into(), passed: false, detail: "fit unavailable".into() }];
    };
    vec![
        Check {
            name: "residual leading exponent".into(),
            passed: l.exponent >= RESIDUAL_LEADING_RANGE.0 && l.exponent <= RESIDUAL_LEADING_RANGE.1,
            detail: format!("{:.3} +- {:.3}", l.exponent, l.std_error),
        },
        Check {
            name: "residual gain of second order".into(),
            passed: s.exponent - l.exponent >= RESIDUAL_GAIN_MIN,
            detail: format!("{:.3} - {:.3} = {:.3}", s.exponent, l.exponent, s.exponent - l.exponent),
        },
    ]
}

/// Residual norms of both ansatz orders for every epsilon, with exponent fits.
pub fn residual_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let res: Vec<ResidualEntry> = cfg.eps_list.par_iter().map(|&e| residual_entry(cfg, e)).collect::<Result<_>>()?;
    let mut report = RunReport::new(cfg);
    residual_fits(&cfg.eps_list, &res, &mut report.fits);
    report.checks = residual_checks(&report);
    for (e, r) in cfg.eps_list.iter().zip(res) {
        report.entries.push(residual_only_entry(*e, r));
    }
    Ok(report)
}

fn residual_only_entry(eps: f64, residual: ResidualEntry) -> RunEntry {
    RunEntry {
        epsilon: eps,
        carrier_mode: 0,
        length: 0.0,
        slow_length: 0.0,
        dt: 0.0,
        steps: 0,
        times: Vec::new(),
        err_leading_diag: Vec::new(),
        err_leading_phys: Vec::new(),
        err_ansatz_diag: Vec::new(),
        err_ansatz_phys: Vec::new(),
        sup_err_leading_diag: 0.0,
        sup_err_leading_phys: 0.0,
        sup_err_ansatz_diag: 0.0,
        sup_err_ansatz_phys: 0.0,
        residual,
        mass_drift: 0.0,
        max_poisson_defect: 0.0,
        nls_mass_drift: 0.0,
        aborted: None,
    }
}

/// Validation runs for every epsilon (in parallel), merged in epsilon order, with fits of
/// `sup_t err` and of the residual norms against epsilon.
pub fn sweep_and_fit(cfg: &ExperimentConfig) -> Result<(RunReport, Timings)> {
    cfg.validate()?;
    if cfg.eps_list.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: cfg.eps_list.len() });
    }
    let runs: Vec<(f64, Result<RunEntry>, f64)> = cfg
        .eps_list
        .par_iter()
        .map(|&e| {
            let start = Instant::now();
            let r = run_validation(cfg, e);
            (e, r, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut report = RunReport::new(cfg);
    let mut timings = Timings::default();
    for (e, r, secs) in runs {
        timings.seconds.push((e, secs));
        match r {
            Ok(entry) => report.entries.push(entry),
            Err(err) => report.checks.push(Check { name: format!("run eps = {e}"), passed: false, detail: err.to_string() }),
        }
    }
    let ok: Vec<&RunEntry> = report.entries.iter().filter(|r| r.aborted.is_none()).collect();
    for r in report.entries.iter().filter(|r| r.aborted.is_some()) {
        report.checks.push(Check { name: format!("run eps = {}", r.epsilon), passed: false, detail: r.aborted.clone().unwrap_or_default() });
    }
    if ok.len() < 3 {
        report.checks.push(Check { name: "error exponent".into(), passed: false, detail: format!("only {} surviving runs", ok.len()) });
        return Ok((report, timings));
    }
    let eps: Vec<f64> = ok.iter().map(|r| r.epsilon).collect();
    let col = |f: fn(&RunEntry) -> f64| -> Vec<f64> { ok.iter().map(|r| f(r)).collect() };
    let mut fits = Vec::new();
    fits.extend(named_fit("error_leading_diag", &eps, &col(|r| r.sup_err_leading_diag)));
    fits.extend(named_fit("error_leading_phys", &eps, &col(|r| r.sup_err_leading_phys)));
    fits.extend(named_fit("error_ansatz_diag", &eps, &col(|r| r.sup_err_ansatz_diag)));
    fits.extend(named_fit("error_ansatz_phys", &eps, &col(|r| r.sup_err_ansatz_phys)));
    let res: Vec<ResidualEntry> = ok.iter().map(|r| r.residual.clone()).collect();
    residual_fits(&eps, &res, &mut fits);
    report.fits = fits;
    let check = match report.fit("error_leading_diag") {
        Some(f) => Check {
            name: "error exponent".into(),
            passed: f.exponent >= ERROR_EXPONENT_MIN && f.std_error <= ERROR_EXPONENT_SE_MAX,
            detail: format!("{:.3} +- {:.3}", f.exponent, f.std_error),
        },
        None => Check { name: "error exponent".into(), passed: false, detail: "fit unavailable".into() },
    };
    report.checks.push(check);
    let rc = residual_checks(&report);
    report.checks.extend(rc);
    Ok((report, timings))
}

/// A single validation run at the largest epsilon, with integrity checks.
pub fn validate_run(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let eps = cfg.eps_list[0];
    let entry = run_validation(cfg, eps)?;
    let mut report = RunReport::new(cfg);
    let init = entry.err_ansatz_diag.first().copied().unwrap_or(f64::NAN);
    report.checks.push(Check { name: "initial error".into(), passed: init <= 1e-10, detail: format!("{init:.3e}") });
    report.checks.push(Check { name: "completed".into(), passed: entry.aborted.is_none(), detail: entry.aborted.clone().unwrap_or_else(|| "ok".into()) });
    report.checks.push(Check { name: "mass drift".into(), passed: entry.mass_drift <= 1e-10, detail: format!("{:.3e}", entry.mass_drift) });
    report.checks.push(Check {
        name: "poisson defect".into(),
        passed: entry.max_poisson_defect <= 1e-12,
        detail: format!("{:.3e}", entry.max_poisson_defect),
    });
    report.checks.push(Check { name: "nls mass drift".into(), passed: entry.nls_mass_drift <= 1e-10, detail: format!("{:.3e}", entry.nls_mass_drift) });
    report.entries.push(entry);
    Ok(report)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Plotdata,
}

/// Column names of the time-series CSV after `epsilon,t`.
pub const CSV_NORMS: [&str; 4] = ["err_leading_diag", "err_leading_phys", "err_ansatz_diag", "err_ansatz_phys"];

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn report_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn report_csv(report: &RunReport) -> String {
    let mut out = format!("epsilon,t,{}\n", CSV_NORMS.join(","));
    for e in &report.entries {
        for i in 0..e.times.len() {
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                e.epsilon, e.times[i], e.err_leading_diag[i], e.err_leading_phys[i], e.err_ansatz_diag[i], e.err_ansatz_phys[i]
            ));
        }
    }
    out
}

/// Write the report in `format` under `dir`; returns the files written.
pub fn emit(report: &RunReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    match format {
        ReportFormat::Json => {
            let path = dir.join("report.json");
            write(&path, &report_json(report)?)?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let path = dir.join("timeseries.csv");
            write(&path, &report_csv(report))?;
            Ok(vec![path])
        }
        ReportFormat::Plotdata => {
            let pdir = dir.join("plotdata");
            let mut files = Vec::new();
            let mut manifest: BTreeMap<String, String> = BTreeMap::new();
            for e in &report.entries {
                let series: [(&str, &Vec<f64>); 4] = [
                    (CSV_NORMS[0], &e.err_leading_diag),
                    (CSV_NORMS[1], &e.err_leading_phys),
                    (CSV_NORMS[2], &e.err_ansatz_diag),
                    (CSV_NORMS[3], &e.err_ansatz_phys),
                ];
                for (name, ys) in series {
                    if ys.is_empty() {
                        continue;
                    }
                    let file = format!("{name}_eps{}.dat", e.epsilon);
                    let body: String = e.times.iter().zip(ys.iter()).map(|(t, y)| format!("{t:.17e} {y:.17e}\n")).collect();
                    let path = pdir.join(&file);
                    write(&path, &body)?;
                    manifest.insert(file, format!("t vs {name} at eps = {}", e.epsilon));
                    files.push(path);
                }
            }
            let mut text = format!("# curves: {}\n", manifest.len());
            for (file, label) in &manifest {
                text.push_str(&format!("{file}\t{label}\n"));
            }
            let path = pdir.join("manifest.txt");
            write(&path, &text)?;
            files.push(path);
            Ok(files)
        }
    }
}

pub fn write_timings(timings: &Timings, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("timings.json");
    write(&path, &serde_json::to_string_pretty(timings)?)?;
    Ok(path)
}
