//! Criterion benchmarks for fuplab; run with `cargo bench -p fuplab-bench`.

use fuplab::generators::{gen_cantor, CantorSpec};
use fuplab::rational::{pow, qi};
use fuplab::regular_sets::affine_map;
use fuplab::ClaimedSet;

/// Mid-third Cantor set of depth `k` on [0, 1].
pub fn cantor(k: u32) -> ClaimedSet {
    gen_cantor(&CantorSpec::new(3, vec![0, 2], k).expect("valid spec")).expect("generated")
}

/// The same set dilated onto `[0, 3^k]`.
pub fn dilated(k: u32) -> ClaimedSet {
    affine_map(&cantor(k), qi(pow(3, k)), qi(0)).expect("dilated")
}
