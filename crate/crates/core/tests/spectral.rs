mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use iep_core::dispersion::q_hat;
use iep_core::spectral::{dealias_in_place, sobolev_norm_coefs, ComplexField, PeriodicGrid, RealField, SpectralField};

fn grid(n: usize) -> PeriodicGrid {
    PeriodicGrid::new(2.0 * PI * 3.0, n).unwrap()
}

#[test]
fn derivative_of_sine_is_cosine() {
    let g = PeriodicGrid::new(2.0 * PI, 64).unwrap();
    let f = RealField::from_fn(&g, |x| x.sin());
    let d = f.apply_multiplier(|k| Complex64::new(0.0, k)).unwrap();
    let expect: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
    assert!(common::max_diff(d.values(), &expect) < 1e-12);
}

#[test]
fn q_multiplier_on_unit_mode() {
    let g = PeriodicGrid::new(2.0 * PI, 32).unwrap();
    let f = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, x));
    let out = f.apply_multiplier(|k| Complex64::new(q_hat(k), 0.0)).unwrap();
    let s = 1.5f64.sqrt();
    for (o, i) in out.values().iter().zip(f.values()) {
        assert!((o - s * i).norm() < 1e-13);
    }
}

#[test]
fn sobolev_norm_of_single_mode() {
    let g = PeriodicGrid::new(2.0 * PI, 32).unwrap();
    // 2 cos(2x) has unit coefficients at k = +-2
    let f = RealField::from_fn(&g, |x| 2.0 * (2.0 * x).cos());
    let expect = (2.0 * PI * 2.0 * 5.0f64).sqrt();
    assert!((f.sobolev_norm(1) - expect).abs() < 1e-12);
    assert_eq!(RealField::zeros(&g).sobolev_norm(3), 0.0);
}

#[test]
fn sobolev_norm_matches_direct_sum() {
    let g = grid(128);
    let f = common::gaussian(&g, 1.0, 1.3);
    // independent: naive DFT and explicit sum
    let n = g.n();
    let mut total = 0.0;
    for j in 0..n {
        let mode = g.mode(j) as f64;
        let k = 2.0 * PI * mode / g.length();
        let mut c = Complex64::new(0.0, 0.0);
        for (i, v) in f.values().iter().enumerate() {
            c += v * Complex64::from_polar(1.0, -2.0 * PI * mode * i as f64 / n as f64);
        }
        c /= n as f64;
        total += c.norm_sqr() * (1.0 + k * k).powi(2);
    }
    let direct = (g.length() * total).sqrt();
    assert!((f.sobolev_norm(2) - direct).abs() < 1e-12 * direct);
}

#[test]
fn top_band_mode_is_removed() {
    let g = PeriodicGrid::new(2.0 * PI, 32).unwrap();
    let f = RealField::from_fn(&g, |x| (14.0 * x).cos());
    assert!(f.dealias().max_abs() < 1e-14);
    let low = RealField::from_fn(&g, |x| (5.0 * x).sin());
    assert!(common::max_diff(low.dealias().values(), low.values()) < 1e-14);
}

fn coeffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip(vals in coeffs(64)) {
        let g = grid(64);
        let back = g.inverse_real(&g.forward_real(&vals));
        prop_assert!(common::max_diff(&back, &vals) < 1e-12);
    }

    #[test]
    fn parseval(vals in coeffs(64)) {
        let g = grid(64);
        let f = RealField::new(g.clone(), vals.clone()).unwrap();
        let direct: f64 = vals.iter().map(|v| v * v).sum::<f64>() * g.dx();
        let spec = f.sobolev_norm(0).powi(2);
        prop_assert!((direct - spec).abs() < 1e-12 * direct.max(1.0));
    }

    #[test]
    fn conjugate_symmetry(vals in coeffs(64)) {
        let g = grid(64);
        let f = RealField::new(g, vals).unwrap();
        prop_assert!(f.spectrum().conjugate_symmetry_defect() < 1e-12);
    }

    #[test]
    fn multiplier_linearity(a in coeffs(64), b in coeffs(64), s in -3.0f64..3.0) {
        let g = grid(64);
        let fa = RealField::new(g.clone(), a).unwrap();
        let fb = RealField::new(g.clone(), b).unwrap();
        let m = |k: f64| Complex64::new(q_hat(k), k);
        let lhs = fa.zip_map(&fb, |x, y| x + s * y).unwrap().apply_multiplier(m).unwrap();
        let ra = fa.apply_multiplier(m).unwrap();
        let rb = fb.apply_multiplier(m).unwrap();
        let rhs = ra.zip_map(&rb, |x, y| x + s * y).unwrap();
        prop_assert!(common::max_diff(lhs.values(), rhs.values()) < 1e-12 * (1.0 + rhs.max_abs()));
    }

    #[test]
    fn real_output_for_symmetric_multiplier(vals in coeffs(64)) {
        let g = grid(64);
        let f = ComplexField::new(g.clone(), vals.iter().map(|v| Complex64::new(*v, 0.0)).collect()).unwrap();
        // m(-k) = conj(m(k)) with the Nyquist mode zeroed
        let nyq = g.wavenumber(g.nyquist_index()).abs();
        let out = f.apply_multiplier(|k| if k.abs() == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(q_hat(k), k.powi(3)) }).unwrap();
        let imag = out.values().iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        prop_assert!(imag < 1e-12 * out.l2_norm().max(1.0));
    }

    #[test]
    fn dealias_idempotent(vals in coeffs(64)) {
        let g = grid(64);
        let mut c = g.forward_real(&vals);
        dealias_in_place(&g, &mut c);
        let once = c.clone();
        dealias_in_place(&g, &mut c);
        prop_assert_eq!(once, c);
    }

    #[test]
    fn sobolev_monotone_in_s(vals in coeffs(64)) {
        let g = grid(64);
        let c = g.forward_real(&vals);
        let n: Vec<f64> = (0..4).map(|s| sobolev_norm_coefs(&g, &c, s)).collect();
        prop_assert!(n.windows(2).all(|w| w[0] <= w[1] * (1.0 + 1e-14)));
    }
}
