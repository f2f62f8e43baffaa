use fuplab::generators::{estimate_dimension, gen_cantor, gen_schottky_cover, CantorSpec, SchottkySpec};
use fuplab::rational::qi;
use fuplab::regular_sets::{verify_regularity, RegularSetApprox};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reference_constant_holds_at_every_depth(base in 3u32..6, mask in 1u32..31, depth in 3u32..8) {
        let alphabet: Vec<u32> = (0..base).filter(|d| mask >> d & 1 == 1).collect();
        prop_assume!(!alphabet.is_empty() && alphabet.len() < base as usize);
        prop_assume!((alphabet.len() as f64).powi(depth as i32) <= 20_000.0);
        let x = gen_cantor(&CantorSpec::new(base, alphabet.clone(), depth).unwrap()).unwrap();
        prop_assert!(x.verify().unwrap().verified);
        prop_assert_eq!(x.set.len(), alphabet.len().pow(depth));
        let w = 1.0 / alphabet.len().pow(depth) as f64;
        prop_assert!(x.set.weights().iter().all(|&v| (v - w).abs() < 1e-15));
    }
}

#[test]
fn cantor_fixtures() {
    let x = gen_cantor(&CantorSpec::new(3, vec![0, 2], 2).unwrap()).unwrap();
    assert_eq!(x.set.cells(), &[0, 2, 6, 8]);
    assert!((x.claim.delta - 2f64.ln() / 3f64.ln()).abs() < 1e-15);

    let full = gen_cantor(&CantorSpec::new(2, vec![0, 1], 5).unwrap()).unwrap();
    assert_eq!(full.claim.delta, 1.0);
    assert_eq!(full.set.components(), vec![(qi(0), qi(1))]);
    assert!(full.verify().unwrap().verified);

    let pt = gen_cantor(&CantorSpec::new(3, vec![0], 4).unwrap()).unwrap();
    assert_eq!(pt.claim.delta, 0.0);
    assert_eq!(pt.set.cells(), &[0]);
}

#[test]
fn bad_specs_rejected() {
    assert!(CantorSpec::new(3, vec![0, 3], 2).is_err());
    assert!(CantorSpec::new(3, vec![], 2).is_err());
    assert!(CantorSpec::new(1, vec![0], 2).is_err());
    assert!(CantorSpec::new(3, vec![0], 0).is_err());
}

#[test]
fn dimension_estimates() {
    let c = gen_cantor(&CantorSpec::new(3, vec![0, 2], 8).unwrap()).unwrap();
    let d = estimate_dimension(&c.set).unwrap();
    assert!((d.delta - 2f64.ln() / 3f64.ln()).abs() < 0.02, "{d:?}");
    let unit = gen_cantor(&CantorSpec::new(2, vec![0, 1], 10).unwrap()).unwrap().set;
    assert!((estimate_dimension(&unit).unwrap().delta - 1.0).abs() < 0.01);
    let pt = RegularSetApprox::point(qi(0));
    assert!(estimate_dimension(&pt).unwrap().delta.abs() < 0.01);
}

#[test]
fn schottky_covers_nest_and_shrink() {
    let mut prev: Option<Vec<(f64, f64)>> = None;
    let mut prev_len = f64::INFINITY;
    for depth in 0..=4 {
        let c = gen_schottky_cover(&SchottkySpec::symmetric(0.3, depth).unwrap()).unwrap();
        let len: f64 = c.arcs.iter().map(|(a, b)| b - a).sum();
        assert!(len < prev_len);
        if let Some(p) = &prev {
            for &(a, b) in &c.arcs {
                assert!(p.iter().any(|&(lo, hi)| lo - 1e-12 <= a && b <= hi + 1e-12));
            }
        }
        prev = Some(c.arcs);
        prev_len = len;
    }
}

#[test]
fn schottky_cover_reverifies_at_estimated_dimension() {
    let c = gen_schottky_cover(&SchottkySpec::symmetric(0.3, 5).unwrap()).unwrap();
    assert!(c.delta > 0.0 && c.delta < 1.0, "{}", c.delta);
    let w = 2f64.powi(-(c.grid_depth as i32));
    let cert = verify_regularity(&c.set, c.delta, 20.0, fuplab::Q::new(1, 1 << c.grid_depth) * qi(4), qi(1)).unwrap();
    assert!(cert.verified, "{cert:?} at cell width {w}");
}
