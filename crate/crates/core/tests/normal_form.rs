use num_complex::Complex64;
use proptest::prelude::*;

use iep_core::dispersion::{omega, q_hat};
use iep_core::normal_form::{
    apply_b11, b11_asymptotics_check, energy_cross_term, energy_functional, in_packet_band, kernel_b01, kernel_b10,
    kernel_b11, packet_field, resonance, scan_b01, scan_b10, scan_max, seminorm_sum, zeta, Projectors,
    WeightFunction, DENSE_LIMIT,
};
use iep_core::spectral::{PeriodicGrid, RealField};
use iep_core::Error;
use iep_core::Sign::{self, Minus, Plus};

const DELTA: f64 = 0.25;

fn energy_grid() -> PeriodicGrid {
    PeriodicGrid::new(2.0 * std::f64::consts::PI * 16.0, 256).unwrap()
}

fn packet(g: &PeriodicGrid, amp: f64) -> RealField {
    let c = 0.5 * g.length();
    packet_field(g, |x| Complex64::new(amp * (-(x - c).powi(2) / 64.0).exp(), 0.0), 1.0, DELTA).unwrap()
}

fn random_pair(g: &PeriodicGrid, seed: u64) -> [RealField; 2] {
    [RealField::random_smooth(g, seed, 1.5), RealField::random_smooth(g, seed + 1, 1.5)]
}

fn triples() -> Vec<(Sign, Sign, Sign)> {
    let mut v = Vec::new();
    for j in Sign::BOTH {
        for p in Sign::BOTH {
            for s in Sign::BOTH {
                v.push((j, p, s));
            }
        }
    }
    v
}

#[test]
fn weight_is_validated() {
    assert!(WeightFunction::new(0.0, 0.1).is_err());
    assert!(WeightFunction::new(0.25, 1.0).is_err());
    assert!(WeightFunction::new(0.25, 0.0).is_err());
}

#[test]
fn projectors_split_the_identity() {
    let g = energy_grid();
    let proj = Projectors { delta: DELTA };
    let f = RealField::random_smooth(&g, 3, 2.0);
    let lo = proj.apply_low(&f).unwrap();
    let hi = proj.apply_high(&f).unwrap();
    let sum = lo.zip_map(&hi, |a, b| a + b).unwrap();
    let diff = sum.values().iter().zip(f.values()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-13);
    let twice = proj.apply_low(&lo).unwrap();
    assert!(twice.values().iter().zip(lo.values()).all(|(a, b)| (a - b).abs() < 1e-14));
    assert!(proj.apply_high(&lo).unwrap().max_abs() < 1e-14);
}

#[test]
fn zeta_reference_value() {
    // j = p = sign = 1 at (2, 1, 1)
    let (q1, q2) = (q_hat(1.0), q_hat(2.0));
    let expect = q1 + q1 + q1 * q1 / q2 - 1.0 / q2 - 1.0 / (q2 * 5.0 * 2.0 * 2.0);
    assert!((zeta(Plus, Plus, Plus, 2.0, 1.0, 1.0) - expect).abs() < 1e-14);
    assert!((resonance(Plus, Plus, Plus, 2.0, 1.0, 1.0) - (omega(2.0) - 2.0 * omega(1.0))).abs() < 1e-15);
}

#[test]
fn zeta_grows_at_most_linearly() {
    for (j, p, s) in triples() {
        let a = zeta(j, p, s, 100.0, s.value(), 100.0 - s.value()).abs();
        let b = zeta(j, p, s, 1000.0, s.value(), 1000.0 - s.value()).abs();
        assert!(b <= a * 1.01 + 1e-9, "j={j} p={p} s={s}");
    }
}

#[test]
fn low_kernel_support() {
    let w = WeightFunction::new(DELTA, 0.01).unwrap();
    let proj = Projectors { delta: DELTA };
    // output outside the low band, packet factor outside its band, and the origin
    assert_eq!(kernel_b01(Plus, Plus, Plus, 0.5, 1.0, -0.5, 1.0, &w, &proj).unwrap(), 0.0);
    assert_eq!(kernel_b01(Plus, Plus, Plus, 0.1, 1.5, -1.4, 1.0, &w, &proj).unwrap(), 0.0);
    assert_eq!(kernel_b01(Plus, Plus, Plus, 0.0, 1.0, -1.0, 1.0, &w, &proj).unwrap(), 0.0);
    assert!(kernel_b01(Plus, Plus, Plus, 0.1, 1.0, -0.9, 1.0, &w, &proj).unwrap() != 0.0);
    assert!(in_packet_band(-1.1, 1.0, DELTA) && !in_packet_band(0.5, 1.0, DELTA));
}

#[test]
fn weighted_low_kernel_is_uniform_in_epsilon() {
    for (j, p, s) in triples() {
        let coarse = scan_max(&scan_b01(j, p, s, 1.0, &WeightFunction::new(DELTA, 1e-2).unwrap(), 120).unwrap());
        let fine = scan_max(&scan_b01(j, p, s, 1.0, &WeightFunction::new(DELTA, 1e-3).unwrap(), 120).unwrap());
        assert!(coarse.is_finite() && coarse > 0.0);
        assert!(fine / coarse <= 1.1, "j={j} p={p} s={s}: {fine} / {coarse}");
    }
}

#[test]
fn high_low_kernel_stays_finite_at_carrier() {
    let w = WeightFunction::new(DELTA, 1e-2).unwrap();
    let proj = Projectors { delta: DELTA };
    for (j, p, s) in triples() {
        for c in Sign::BOTH {
            let scan = scan_max(&scan_b10(j, p, s, c, 1.0, &w, -4.0, 4.0, 801).unwrap());
            let k0 = c.value();
            for k in [k0 - 1e-6, k0, k0 + 1e-6] {
                let v = kernel_b10(j, p, s, c, k, 1.0, &w, &proj).unwrap();
                assert!(v.is_finite() && v.abs() * w.value(k) <= 2.0 * scan, "j={j} p={p} s={s} c={c} k={k}");
            }
        }
    }
}

#[test]
fn high_kernel_is_even_under_reflection() {
    for (j, p, s) in triples() {
        for (k, km) in [(3.0, 1.0), (7.5, -1.2), (-2.0, 0.9)] {
            let a = kernel_b11(j, p, s, k, km, k - km).unwrap();
            let b = kernel_b11(j, p, s, -k, -km, km - k).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
    }
}

#[test]
fn high_kernel_decay_on_diagonal_pairs() {
    for (j, s) in [(Plus, Plus), (Plus, Minus), (Minus, Plus), (Minus, Minus)] {
        let r = b11_asymptotics_check(j, j, s, 1.0).unwrap();
        assert!((r.stated_fit.exponent + 1.0).abs() <= 0.4, "j={j} s={s}: {}", r.stated_fit.exponent);
        assert_eq!(r.expected_exponent, -1.0);
    }
}

#[test]
fn high_kernel_limit_on_off_diagonal_pairs() {
    for (j, s) in [(Plus, Plus), (Plus, Minus), (Minus, Plus), (Minus, Minus)] {
        let r = b11_asymptotics_check(j, -j, s, 1.0).unwrap();
        // the kernel tends to -1/2 with an O(1/k) remainder
        let last = *r.values.last().unwrap();
        assert!((last + 0.5).abs() < 0.05, "j={j} s={s}: {last}");
        assert!((r.computed_fit.exponent + 1.0).abs() <= 0.2);
        assert!(r.stated_fit.exponent.abs() < 0.1);
    }
}

#[test]
fn dense_form_refuses_large_grids() {
    let g = PeriodicGrid::new(100.0, 2 * DENSE_LIMIT).unwrap();
    let f = RealField::zeros(&g);
    assert!(matches!(apply_b11(Plus, Plus, Plus, &f, &f, 1.0, DELTA), Err(Error::TooLarge { .. })));
    let pair = [f.clone(), f.clone()];
    assert!(matches!(energy_functional(&pair, &pair, &f, &f, 0, 0.1, 1.0, DELTA), Err(Error::TooLarge { .. })));
}

#[test]
fn energy_reduces_to_half_norm_without_coupling() {
    let g = energy_grid();
    let r = random_pair(&g, 11);
    let zero = [RealField::zeros(&g), RealField::zeros(&g)];
    let psi = packet(&g, 1.0);
    for s in 0..=2 {
        let reference = seminorm_sum(&r, &zero, s);
        let e = energy_functional(&r, &r, &psi, &psi, s, 0.0, 1.0, DELTA).unwrap();
        assert!((2.0 * e / reference - 1.0).abs() < 1e-12);
        let e_free = energy_functional(&r, &r, &RealField::zeros(&g), &RealField::zeros(&g), s, 0.1, 1.0, DELTA).unwrap();
        assert!((e_free - e).abs() < 1e-12 * e);
    }
    assert_eq!(energy_functional(&zero, &zero, &psi, &psi, 2, 0.1, 1.0, DELTA).unwrap(), 0.0);
}

#[test]
fn energy_is_affine_in_epsilon() {
    let g = energy_grid();
    let r = random_pair(&g, 21);
    let psi = packet(&g, 1.0);
    let phi = packet(&g, 0.6);
    let e0 = energy_functional(&r, &r, &psi, &phi, 1, 0.0, 1.0, DELTA).unwrap();
    let e1 = energy_functional(&r, &r, &psi, &phi, 1, 0.05, 1.0, DELTA).unwrap();
    let e2 = energy_functional(&r, &r, &psi, &phi, 1, 0.1, 1.0, DELTA).unwrap();
    assert!(((e2 - e0) - 2.0 * (e1 - e0)).abs() < 1e-10 * e0);
    let proj = Projectors { delta: DELTA };
    let r1 = [proj.apply_high(&r[0]).unwrap(), proj.apply_high(&r[1]).unwrap()];
    let cross = energy_cross_term(&r1, &psi, &phi, 1, 1.0, DELTA).unwrap();
    assert!((e1 - e0 - 0.05 * cross).abs() < 1e-10 * e0);
}

#[test]
fn energy_deviation_shrinks_with_epsilon() {
    let g = energy_grid();
    let psi = packet(&g, 1.0);
    let phi = packet(&g, 1.0);
    let zero = [RealField::zeros(&g), RealField::zeros(&g)];
    for seed in [1, 5, 9] {
        let r = random_pair(&g, seed);
        let reference = seminorm_sum(&r, &zero, 2);
        let dev: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|e| (2.0 * energy_functional(&r, &r, &psi, &phi, 2, *e, 1.0, DELTA).unwrap() / reference - 1.0).abs())
            .collect();
        assert!(dev[0] > dev[1] && dev[1] > dev[2], "{dev:?}");
        assert!(dev[2] <= 0.25);
    }
}

#[test]
fn bilinear_form_is_linear_in_each_factor() {
    let g = PeriodicGrid::new(2.0 * std::f64::consts::PI * 8.0, 128).unwrap();
    let h = packet_field(&g, |x| Complex64::new((-(x - 25.0).powi(2) / 30.0).exp(), 0.0), 1.0, DELTA).unwrap();
    let f1 = RealField::random_smooth(&g, 2, 2.0);
    let f2 = RealField::random_smooth(&g, 3, 2.0);
    let sum = f1.zip_map(&f2, |a, b| a + 2.0 * b).unwrap();
    let b = |f: &RealField| apply_b11(Plus, Minus, Plus, &h, f, 1.0, DELTA).unwrap();
    let lhs = b(&sum);
    let rhs = b(&f1).zip_map(&b(&f2), |a, c| a + 2.0 * c).unwrap();
    let diff = lhs.values().iter().zip(rhs.values()).fold(0.0f64, |m, (a, c)| m.max((a - c).abs()));
    assert!(diff < 1e-12 * (1.0 + lhs.max_abs()));
    assert_eq!(apply_b11(Plus, Plus, Plus, &RealField::zeros(&g), &f1, 1.0, DELTA).unwrap().max_abs(), 0.0);
}

proptest! {
    #[test]
    fn weight_range_and_evenness(k in -5.0f64..5.0, eps in 1e-4f64..0.5) {
        let w = WeightFunction::new(DELTA, eps).unwrap();
        let v = w.value(k);
        prop_assert!(v >= eps && v <= 1.0);
        prop_assert_eq!(v, w.value(-k));
        prop_assert!(w.shifted(k) >= 0.0);
    }

    #[test]
    fn zeta_even_under_reflection(k in -10.0f64..10.0, km in -3.0f64..3.0) {
        for (j, p, s) in triples() {
            let a = zeta(j, p, s, k, km, k - km);
            let b = zeta(j, p, s, -k, -km, km - k);
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
