use std::f64::consts::TAU;

use fuplab::fup_core::{fourier_restricted_norm, FupInstance};
use fuplab::fup_operators::{
    amplitude_restricted_norm, hyperbolic_norm, neighborhood_intervals, phase_restricted_norm, phase_restricted_norm_with,
    synthetic_circle, AmplitudeKind, AmplitudeSpec, Phase, PhaseSpec, Quadrature, Rect,
};
use fuplab::generators::{gen_cantor, CantorSpec};
use fuplab::rational::{q, qi};
use fuplab::regular_sets::affine_map;
use proptest::prelude::*;

fn cantor(k: u32) -> fuplab::ClaimedSet {
    gen_cantor(&CantorSpec::new(3, vec![0, 2], k).unwrap()).unwrap()
}

fn wide_plateau() -> PhaseSpec {
    PhaseSpec::new(Phase::Linear, Rect::new((-1.0, 2.0), (-1.0, 2.0)).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_phase_translation_invariance(sx in -20i128..20, sy in -20i128..20) {
        let x = cantor(3);
        let h = 1.0 / 27.0;
        let one = AmplitudeSpec::new(AmplitudeKind::Constant { value: 1.0 }).unwrap();
        let base = amplitude_restricted_norm(&x.set, &x.set, h, &one, 1.0).unwrap().value;
        let xs = affine_map(&x, qi(1), q(sx, 27)).unwrap().set;
        let ys = affine_map(&x, qi(1), q(sy, 27)).unwrap().set;
        let moved = amplitude_restricted_norm(&xs, &ys, h, &one, 1.0).unwrap().value;
        prop_assert!((base - moved).abs() < 1e-9);
    }

    #[test]
    fn quadrature_weights_cover_the_neighborhood(k in 2u32..6, rho in 0.7f64..1.0) {
        let x = cantor(k);
        let h = 3f64.powi(-(k as i32));
        let ivs = neighborhood_intervals(&x.set, h, rho);
        let quad = Quadrature::on_intervals(&ivs, h / 10.0);
        let total: f64 = ivs.iter().map(|(a, b)| b - a).sum();
        let w: f64 = quad.weights.iter().sum();
        prop_assert!((w - total).abs() < 1e-9 * total.max(1.0));
        prop_assert!(ivs.windows(2).all(|p| p[0].1 < p[1].0));
    }
}

#[test]
fn single_node_per_cell_is_the_dft() {
    for k in 2..=5 {
        let x = cantor(k);
        let n = 3usize.pow(k);
        let h = 1.0 / n as f64;
        let quad = Quadrature::on_intervals(&neighborhood_intervals(&x.set, h, 1.0), h);
        let m = fuplab::fup_operators::kernel_norm(&quad, &quad, h, |a, b| num_complex::Complex64::from_polar(1.0, -TAU * a * b / h));
        let idx: Vec<usize> = x.set.cells().iter().map(|&c| c as usize).collect();
        let d = fourier_restricted_norm(&FupInstance::new(n, idx.clone(), idx).unwrap()).value;
        assert!((m.value - d).abs() < 1e-10);
    }
}

#[test]
fn quadrature_norm_converges_under_refinement() {
    let x = cantor(3);
    let h = 1.0 / 27.0;
    let spec = wide_plateau();
    let v: Vec<f64> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&m| phase_restricted_norm_with(&x.set, &x.set, h, &spec, 1.0, m).unwrap().value)
        .collect();
    let d1 = (v[1] - v[0]).abs();
    let d2 = (v[2] - v[1]).abs();
    let d3 = (v[3] - v[2]).abs();
    assert!(d2 < d1 && d3 < d2, "{v:?}");
    assert!(v.iter().all(|&s| s > 0.0 && s <= 1.0 + 1e-9));
}

#[test]
fn hyperbolic_norm_decays_on_the_circle_set() {
    let mut prev = f64::INFINITY;
    for k in 3..=5 {
        let (set, chi) = synthetic_circle(k).unwrap();
        let v = hyperbolic_norm(&set, 3f64.powi(-(k as i32)), &chi, 1.0).unwrap().value;
        assert!(v < prev, "k {k}: {v} ≥ {prev}");
        prev = v;
    }
}

#[test]
fn phase_norm_monotone_in_rho() {
    let x = cantor(3);
    let h = 1.0 / 27.0;
    let spec = wide_plateau();
    let a = phase_restricted_norm(&x.set, &x.set, h, &spec, 1.0).unwrap().value;
    let b = phase_restricted_norm(&x.set, &x.set, h, &spec, 0.9).unwrap().value;
    assert!(b >= a - 1e-12);
}
