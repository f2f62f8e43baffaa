use std::collections::BTreeSet;

use fuplab::fup_core::{
    fourier_norm_power, fourier_restricted_norm, scan_and_fit, shift_invariance_check, volume_baseline, FupInstance,
};
use fuplab::generators::{gen_cantor, CantorSpec};
use fuplab::linalg::spectral_norm;
use proptest::prelude::*;

fn subset(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..n, 1..=n).prop_map(|s| s.into_iter().collect())
}

fn instance() -> impl Strategy<Value = FupInstance> {
    (2usize..48).prop_flat_map(|n| (subset(n), subset(n)).prop_map(move |(x, y)| FupInstance::new(n, x, y).unwrap()))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect::<BTreeSet<_>>().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_at_most_one(inst in instance()) {
        let v = fourier_restricted_norm(&inst).value;
        prop_assert!(v <= 1.0 + 1e-9);
        prop_assert!(v > 0.0);
    }

    #[test]
    fn dense_matches_direct_svd(inst in instance()) {
        let a = fourier_restricted_norm(&inst).value;
        let b = spectral_norm(&inst.matrix());
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn enlarging_never_decreases(inst in instance(), extra_x in subset(48), extra_y in subset(48)) {
        let n = inst.n;
        let x2 = union(&inst.x_idx, &extra_x.iter().copied().filter(|&i| i < n).collect::<Vec<_>>());
        let y2 = union(&inst.y_idx, &extra_y.iter().copied().filter(|&i| i < n).collect::<Vec<_>>());
        let big = FupInstance::new(n, x2, y2).unwrap();
        prop_assert!(fourier_restricted_norm(&big).value >= fourier_restricted_norm(&inst).value - 1e-12);
    }

    #[test]
    fn shifts_preserve_the_norm(inst in instance(), x0 in -100i64..100, y0 in -100i64..100) {
        prop_assert!(shift_invariance_check(&inst, x0, y0).equal);
    }

    #[test]
    fn splitting_y_is_subadditive(inst in instance(), mask in any::<u64>()) {
        let (y1, y2): (Vec<usize>, Vec<usize>) = inst.y_idx.iter().partition(|&&j| mask >> (j % 64) & 1 == 1);
        prop_assume!(!y1.is_empty() && !y2.is_empty());
        let n1 = fourier_restricted_norm(&FupInstance::new(inst.n, inst.x_idx.clone(), y1).unwrap()).value;
        let n2 = fourier_restricted_norm(&FupInstance::new(inst.n, inst.x_idx.clone(), y2).unwrap()).value;
        prop_assert!(fourier_restricted_norm(&inst).value <= n1 + n2 + 1e-12);
    }

    #[test]
    fn power_iteration_matches_dense(inst in instance()) {
        let a = fourier_restricted_norm(&inst).value;
        let p = fourier_norm_power(&inst).value;
        prop_assert!((a - p).abs() < 1e-8, "{a} vs {p}");
    }

    #[test]
    fn cauchy_schwarz_baseline(inst in instance()) {
        prop_assert!(volume_baseline(&inst, 0.0, 1.0).measured <= ((inst.x_idx.len() * inst.y_idx.len()) as f64 / inst.n as f64).sqrt() + 1e-12);
    }
}

#[test]
fn singleton_gives_inverse_square_root() {
    for n in [3usize, 10, 81, 729] {
        let inst = FupInstance::new(n, vec![n / 2], vec![1]).unwrap();
        assert!((fourier_restricted_norm(&inst).value - (n as f64).powf(-0.5)).abs() < 1e-12);
    }
}

#[test]
fn cantor_norms_decrease() {
    let spec = CantorSpec::new(3, vec![0, 2], 2).unwrap();
    let fit = scan_and_fit(&spec, &spec, 2..=6).unwrap();
    assert!(fit.strictly_decreasing());
    assert!(fit.beta_fit > 0.0);
}

#[test]
fn cantor_instance_matches_sets() {
    let x = gen_cantor(&CantorSpec::new(3, vec![0, 2], 3).unwrap()).unwrap();
    let inst = FupInstance::from_sets(&x.set, &x.set, 27).unwrap();
    assert_eq!(inst.x_idx, vec![0, 2, 6, 8, 18, 20, 24, 26]);
}
