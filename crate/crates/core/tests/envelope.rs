mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use iep_core::coefficients::coefficient_table;
use iep_core::envelope::{
    characteristics_oracle, nls_rhs, nls_step, second_order_fields, transport_rhs, transport_step, Envelope,
    EnvelopeRole, EnvelopeSystem, NlsParams, TransportParams,
};
use iep_core::spectral::PeriodicGrid;
use iep_core::{Error, Sign};

fn slow_grid() -> PeriodicGrid {
    PeriodicGrid::new(160.0, 512).unwrap()
}

fn centered(grid: &PeriodicGrid, role: EnvelopeRole, amp: f64, width: f64) -> Envelope {
    Envelope::gaussian(grid, role, Complex64::new(amp, 0.0), width, 0.0)
}

/// Bright soliton of `d_theta A = -(i/2) w'' A_XX + i nu A |A|^2` for `w'' < 0 < nu`.
fn soliton(grid: &PeriodicGrid, amp: f64, omega2: f64, nu: f64, theta: f64) -> Vec<Complex64> {
    let kappa = amp * (nu / omega2.abs()).sqrt();
    let len = grid.length();
    grid.points()
        .iter()
        .map(|x| {
            let d = if *x > 0.5 * len { x - len } else { *x };
            Complex64::from_polar(amp / (kappa * d).cosh(), 0.5 * nu * amp * amp * theta)
        })
        .collect()
}

fn solve_nls(env: &Envelope, p: &NlsParams, theta: f64, dtheta: f64) -> Envelope {
    let steps = (theta / dtheta).round() as usize;
    let mut e = env.clone();
    for _ in 0..steps {
        e = nls_step(&e, p, dtheta).unwrap();
    }
    e
}

#[test]
fn nls_mass_is_conserved() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    for (role, p) in [(EnvelopeRole::A, NlsParams::for_a(&t)), (EnvelopeRole::B, NlsParams::for_b(&t))] {
        let env = centered(&g, role, 1.0, 2.0);
        let out = solve_nls(&env, &p, 0.25, 0.001);
        assert!((out.mass() - env.mass()).abs() <= 1e-10 * env.mass());
    }
}

#[test]
fn nls_soliton_is_reproduced() {
    let t = coefficient_table(1.0).unwrap();
    let g = PeriodicGrid::new(40.0, 512).unwrap();
    let p = NlsParams::for_a(&t);
    let a0 = Envelope::new(g.clone(), soliton(&g, 0.5, t.omega2, t.nu1, 0.0), EnvelopeRole::A).unwrap();
    let out = solve_nls(&a0, &p, 1.0, 1e-3);
    let exact = soliton(&g, 0.5, t.omega2, t.nu1, 1.0);
    let err = common::max_diff_c(out.values(), &exact);
    assert!(err < 1e-6, "err {err}");
}

#[test]
fn nls_mirror_for_counter_propagating_packet() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let a0 = centered(&g, EnvelopeRole::A, 0.8, 3.0);
    let a = solve_nls(&a0, &NlsParams::for_a(&t), 0.5, 0.01);
    let b = solve_nls(&a0, &NlsParams::for_b(&t), 0.5, 0.01);
    let conj: Vec<Complex64> = a.values().iter().map(|z| z.conj()).collect();
    assert!(common::max_diff_c(b.values(), &conj) < 1e-12);
}

#[test]
fn nls_strang_splitting_is_second_order() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let p = NlsParams::for_a(&t);
    let a0 = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let r = [0.04, 0.02, 0.01].map(|h| solve_nls(&a0, &p, 0.8, h));
    let e1 = common::max_diff_c(r[0].values(), r[1].values());
    let e2 = common::max_diff_c(r[1].values(), r[2].values());
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn nls_rhs_matches_step_derivative() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let p = NlsParams::for_a(&t);
    let a0 = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let h = 1e-4;
    let fwd = nls_step(&a0, &p, h).unwrap();
    let rhs = nls_rhs(&g, a0.values(), &p);
    let fd: Vec<Complex64> = fwd.values().iter().zip(a0.values()).map(|(x, y)| (x - y) / h).collect();
    assert!(common::max_diff_c(&fd, &rhs) < 1e-3);
    assert!(nls_step(&a0, &p, 0.0).is_err());
}

#[test]
fn transport_matches_characteristics() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let fp = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let fm = centered(&g, EnvelopeRole::B, 0.7, 2.5);
    // zero epsilon freezes the envelopes in theta
    let mut sys = EnvelopeSystem::new(fp.clone(), fm.clone(), 0.0, &t).unwrap();
    sys.advance_to(5.0, 0.05).unwrap();
    let oracle = characteristics_oracle(&fp, &fm, 5.0, t.cg).unwrap();
    let expect: Vec<Complex64> = oracle.values().iter().map(|h| Complex64::new(0.0, t.nu1_tilde) * h).collect();
    let err = common::max_diff_c(sys.i.values(), &expect);
    assert!(err <= 1e-6, "err {err}");
    let expect_j: Vec<Complex64> = characteristics_oracle(&fm.shifted(0.0), &fp, 5.0, t.cg)
        .unwrap()
        .values()
        .iter()
        .map(|h| Complex64::new(0.0, t.nu2_tilde) * h)
        .collect();
    // J is the mirror image: reflect X -> -X
    let n = g.n();
    let reflect = |v: &[Complex64]| (0..n).map(|i| v[(n - i) % n]).collect::<Vec<_>>();
    assert!(common::max_diff_c(&reflect(sys.j.values()), &expect_j) <= 1e-6);
}

#[test]
fn transport_without_partner_stays_zero() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let a = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let b = Envelope::zeros(&g, EnvelopeRole::B);
    let mut sys = EnvelopeSystem::new(a, b, 0.1, &t).unwrap();
    sys.advance_to(3.0, 0.05).unwrap();
    assert_eq!(sys.i.field().max_abs(), 0.0);
    assert!(sys.j.field().max_abs() == 0.0);
}

#[test]
fn interaction_corrector_saturates_after_packets_separate() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let a = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let b = centered(&g, EnvelopeRole::B, 1.0, 2.0);
    let mut sys = EnvelopeSystem::new(a, b, 0.0, &t).unwrap();
    sys.advance_to(20.0, 0.05).unwrap();
    let early = sys.i.sobolev_norm(2);
    sys.advance_to(40.0, 0.05).unwrap();
    let late = sys.i.sobolev_norm(2);
    assert!(early > 0.1);
    assert!((late - early).abs() <= 1e-6 * early, "{early} vs {late}");
}

#[test]
fn transport_rhs_is_consistent_with_step() {
    let t = coefficient_table(1.0).unwrap();
    let p = TransportParams::from_table(&t);
    let g = slow_grid();
    let a = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let b = centered(&g, EnvelopeRole::B, 1.0, 2.0);
    let i0 = centered(&g, EnvelopeRole::I, 0.3, 4.0);
    let h = 1e-4;
    let next = transport_step(&i0, &a, &b, 0.5, h, &p).unwrap();
    let rhs = transport_rhs(&i0, &a, &b, 0.5, &p).unwrap();
    let fd: Vec<Complex64> = next.values().iter().zip(i0.values()).map(|(x, y)| (x - y) / h).collect();
    assert!(common::max_diff_c(&fd, &rhs) < 1e-3);
    assert!(matches!(transport_step(&a, &a, &b, 0.0, h, &p), Err(Error::InvalidParameter(_))));
}

#[test]
fn clock_cannot_run_backwards() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let a = centered(&g, EnvelopeRole::A, 1.0, 2.0);
    let mut sys = EnvelopeSystem::new(a.clone(), a, 0.1, &t).unwrap();
    sys.advance_to(1.0, 0.1).unwrap();
    assert!((sys.theta - 0.1).abs() < 1e-15);
    assert!(matches!(sys.advance_to(0.5, 0.1), Err(Error::ClockMismatch(_))));
}

#[test]
fn correctors_are_pointwise_products() {
    let t = coefficient_table(1.0).unwrap();
    let g = slow_grid();
    let a = Envelope::gaussian(&g, EnvelopeRole::A, Complex64::new(0.3, 0.4), 2.0, 5.0);
    let b = Envelope::gaussian(&g, EnvelopeRole::B, Complex64::new(-0.2, 0.1), 3.0, -5.0);
    let f = second_order_fields(&a, &b, &t).unwrap();
    for i in [0, 100, 300, 511] {
        let (x, y) = (a.values()[i], b.values()[i]);
        for j in Sign::BOTH {
            let c = j.index();
            assert!((f.a0[c].values()[i] - t.gamma_a0.get(j) * x.norm_sqr()).abs() < 1e-15);
            assert!((f.a2[c].values()[i] - t.gamma_a2.get(j) * x * x).norm() < 1e-15);
            assert!((f.f11[c].values()[i] - t.gamma_f11.get(j) * x * y).norm() < 1e-15);
            assert!((f.b2[c].values()[i] - t.gamma_b2.get(j) * y * y).norm() < 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_is_invertible(shift in -50.0f64..50.0, width in 2.0f64..6.0) {
        let g = slow_grid();
        let a = centered(&g, EnvelopeRole::A, 1.0, width);
        let back = a.shifted(shift).shifted(-shift);
        prop_assert!(common::max_diff_c(back.values(), a.values()) < 1e-12);
    }

    #[test]
    fn nls_preserves_mass(amp in 0.1f64..1.5, width in 1.5f64..5.0) {
        let t = coefficient_table(1.0).unwrap();
        let g = slow_grid();
        let a = centered(&g, EnvelopeRole::A, amp, width);
        let out = solve_nls(&a, &NlsParams::for_a(&t), 0.1, 0.01);
        prop_assert!((out.mass() - a.mass()).abs() <= 1e-11 * a.mass());
    }
}
