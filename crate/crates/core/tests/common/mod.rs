#![allow(dead_code)]

use fuplab::generators::{gen_cantor, CantorSpec};
use fuplab::rational::{q, qi, Q};
use fuplab::regular_sets::{intersect_interval, neighborhood, nonlinear_image, raise_upper_scale, MonotoneMap};
use fuplab::{ClaimedSet, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// Base in 3..=5, alphabet a proper subset with at least two digits.
pub fn random_cantor_spec<R: Rng>(rng: &mut R, depths: std::ops::RangeInclusive<u32>) -> CantorSpec {
    let base = rng.gen_range(3..=5u32);
    let size = rng.gen_range(2..base) as usize;
    let mut digits: Vec<u32> = (0..base).collect();
    digits.shuffle(rng);
    digits.truncate(size);
    CantorSpec::new(base, digits, rng.gen_range(depths)).unwrap()
}

pub struct LemmaOutcome {
    pub name: &'static str,
    pub claimed_c_r: f64,
    pub verified: bool,
}

/// `J` a first-level block whose neighbours are empty, else the hull.
pub fn separated_block(spec: &CantorSpec) -> ((Q, Q), (Q, Q)) {
    let l = spec.base as i128;
    let has = |d: i128| d >= 0 && d < l && spec.alphabet.contains(&(d as u32));
    for &a in &spec.alphabet {
        let a = a as i128;
        if !has(a - 1) && !has(a + 1) {
            return ((q(a, l), q(a + 1, l)), (q(a - 1, l), q(a + 2, l)));
        }
    }
    ((qi(0), qi(1)), (qi(-1), qi(2)))
}

/// Runs the four transformation lemmas and re-verifies each output at its
/// claimed constant.
pub fn lemma_suite(spec: &CantorSpec) -> Result<Vec<LemmaOutcome>> {
    let x: ClaimedSet = gen_cantor(spec)?;
    let cert = x.verify()?;
    let mut out = Vec::new();

    let raised = raise_upper_scale(&cert, qi(2))?;
    out.push(LemmaOutcome {
        name: "raise-upper-scale",
        claimed_c_r: raised.c_r,
        verified: raised.verify(&x.set)?.verified,
    });

    let fat = neighborhood(&x, qi(2))?;
    out.push(LemmaOutcome {
        name: "neighborhood",
        claimed_c_r: fat.claim.c_r,
        verified: fat.verify()?.verified,
    });

    let map = MonotoneMap::from_fn(|t| t + t * t / 4.0, |t| 1.0 + t / 2.0, 0.0, 1.0, 64)?;
    let bent = nonlinear_image(&x, &map, q(3, 2))?;
    out.push(LemmaOutcome {
        name: "nonlinear-image",
        claimed_c_r: bent.claim.c_r,
        verified: bent.verify()?.verified,
    });

    let (j, jp) = separated_block(spec);
    let cut = intersect_interval(&x, j, jp)?;
    out.push(LemmaOutcome {
        name: "intersect-interval",
        claimed_c_r: cut.claim.c_r,
        verified: cut.verify()?.verified,
    });
    Ok(out)
}
