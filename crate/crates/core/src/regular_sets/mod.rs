//! Finite-resolution δ-regular sets with explicit measures.
//!
//! A set is a sorted list of closed cells `[origin + j·w, origin + (j+1)·w]`
//! with `w = scale / base^depth`, each carrying a positive mass spread
//! uniformly over the cell. A zero scale collapses the set to the point
//! `origin` (exactly one cell allowed).

mod lemmas;
mod structure;
mod verify;

pub use lemmas::{
    affine_map, intersect_interval, neighborhood, nonlinear_image, raise_upper_scale, MonotoneMap,
};
pub use structure::{
    cover_count, grid_cover, lebesgue_bound, missing_subinterval, missing_subinterval_threshold,
    split_at_grid, split_regular, tree_children, CoverResult, LebesgueBound, SplitPiece, TreeLevel,
};
pub use verify::{scan_regularity, scan_regularity_all_sizes, verify_regularity, RegularityCertificate, ScanStats};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{self, pow, qi, to_f64, Q};

/// Affine placement of the cell grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(with = "rational::serde_q")]
    pub origin: Q,
    #[serde(with = "rational::serde_q")]
    pub scale: Q,
}

impl Frame {
    pub fn unit() -> Self {
        Frame {
            origin: Q::zero(),
            scale: qi(1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct RegularSetApprox {
    base: u32,
    depth: u32,
    frame: Frame,
    cells: Vec<i64>,
    weights: Vec<f64>,
    cum: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    base: u32,
    depth: u32,
    frame: Frame,
    cells: Vec<i64>,
    weights: Vec<f64>,
}

impl TryFrom<RawSet> for RegularSetApprox {
    type Error = Error;
    fn try_from(r: RawSet) -> Result<Self> {
        RegularSetApprox::new(r.base, r.depth, r.frame, r.cells, r.weights)
    }
}

impl From<RegularSetApprox> for RawSet {
    fn from(s: RegularSetApprox) -> Self {
        RawSet {
            base: s.base,
            depth: s.depth,
            frame: s.frame,
            cells: s.cells,
            weights: s.weights,
        }
    }
}

impl RegularSetApprox {
    pub fn new(base: u32, depth: u32, frame: Frame, cells: Vec<i64>, weights: Vec<f64>) -> Result<Self> {
        if base < 2 {
            return Err(invalid("base", "must be at least 2"));
        }
        if (base as f64).powi(depth as i32) > 1e15 {
            return Err(invalid("depth", "base^depth overflows the grid"));
        }
        if frame.scale.is_negative() {
            return Err(invalid("frame.scale", "must be nonnegative"));
        }
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        if cells.len() != weights.len() {
            return Err(invalid("weights", "length differs from cells"));
        }
        if cells.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("cells", "must be strictly increasing"));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(invalid("weights", "must be positive and finite"));
        }
        if frame.scale.is_zero() && cells.len() != 1 {
            return Err(invalid("cells", "a point frame holds exactly one cell"));
        }
        let mut cum = Vec::with_capacity(weights.len() + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            cum.push(acc);
        }
        Ok(RegularSetApprox {
            base,
            depth,
            frame,
            cells,
            weights,
            cum,
        })
    }

    /// Cells with equal weights of total mass `mass`.
    pub fn uniform(base: u32, depth: u32, frame: Frame, cells: Vec<i64>, mass: f64) -> Result<Self> {
        let n = cells.len().max(1);
        let w = vec![mass / n as f64; cells.len()];
        Self::new(base, depth, frame, cells, w)
    }

    /// The point `{p}` carrying unit mass.
    pub fn point(p: Q) -> Self {
        Self::new(
            2,
            0,
            Frame {
                origin: p,
                scale: Q::zero(),
            },
            vec![0],
            vec![1.0],
        )
        .expect("valid point set")
    }

    /// `[a, b]` as a single cell of unit mass per unit length.
    pub fn interval(a: Q, b: Q) -> Result<Self> {
        if b <= a {
            return Err(invalid("interval", "needs a < b"));
        }
        let len = to_f64(&(b - a));
        Self::new(2, 0, Frame { origin: a, scale: b - a }, vec![0], vec![len])
    }

    pub fn base(&self) -> u32 {
        self.base
    }
    pub fn depth(&self) -> u32 {
        self.depth
    }
    pub fn frame(&self) -> &Frame {
        &self.frame
    }
    pub fn cells(&self) -> &[i64] {
        &self.cells
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.cells.len()
    }
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
    pub fn is_point(&self) -> bool {
        self.frame.scale.is_zero()
    }
    pub fn total_mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Cell width `scale / base^depth` (zero for a point).
    pub fn width(&self) -> Q {
        self.frame.scale / qi(pow(self.base, self.depth))
    }

    pub fn cell_interval(&self, i: usize) -> (Q, Q) {
        let w = self.width();
        let j = qi(self.cells[i] as i128);
        (self.frame.origin + j * w, self.frame.origin + (j + qi(1)) * w)
    }

    pub fn cell_interval_f64(&self, i: usize) -> (f64, f64) {
        let (a, b) = self.cell_interval(i);
        (to_f64(&a), to_f64(&b))
    }

    /// Leftmost and rightmost points.
    pub fn hull(&self) -> (Q, Q) {
        (self.cell_interval(0).0, self.cell_interval(self.len() - 1).1)
    }

    /// Maximal runs of contiguous cells as closed intervals.
    pub fn components(&self) -> Vec<(Q, Q)> {
        let mut out: Vec<(Q, Q)> = Vec::new();
        let mut i = 0;
        while i < self.cells.len() {
            let mut k = i;
            while k + 1 < self.cells.len() && self.cells[k + 1] == self.cells[k] + 1 {
                k += 1;
            }
            out.push((self.cell_interval(i).0, self.cell_interval(k).1));
            i = k + 1;
        }
        out
    }

    /// Lebesgue measure of the cell union.
    pub fn lebesgue_measure(&self) -> f64 {
        to_f64(&self.width()) * self.len() as f64
    }

    /// Converts an absolute coordinate to grid units.
    pub(crate) fn to_units(&self, x: &Q) -> Q {
        (x - self.frame.origin) / self.width()
    }

    pub(crate) fn to_units_f64(&self, x: f64) -> f64 {
        (x - to_f64(&self.frame.origin)) / to_f64(&self.width())
    }

    /// Cumulative mass of the part of the set left of `u` (grid units).
    pub(crate) fn cdf_units(&self, u: f64) -> f64 {
        let fl = u.floor();
        let j = fl as i64;
        let idx = self.cells.partition_point(|&c| c < j);
        let mut m = self.cum[idx];
        if idx < self.cells.len() && self.cells[idx] == j {
            m += self.weights[idx] * (u - fl);
        }
        m
    }

    /// Mass of the closed interval `[a, b]` in grid units.
    pub(crate) fn mass_units(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.cdf_units(b) - self.cdf_units(a)).max(0.0)
    }

    /// μ([a, b]) for absolute coordinates.
    pub fn measure(&self, a: f64, b: f64) -> f64 {
        if self.is_point() {
            let p = to_f64(&self.frame.origin);
            return if a <= p && p <= b { self.total_mass() } else { 0.0 };
        }
        self.mass_units(self.to_units_f64(a), self.to_units_f64(b))
    }

    /// Index range of cells meeting `[a, b]` in the closed sense (grid units).
    pub(crate) fn cells_meeting_closed(&self, a: &Q, b: &Q) -> std::ops::Range<usize> {
        let lo = a.ceil().to_integer() as i64 - 1;
        let hi = b.floor().to_integer() as i64;
        let s = self.cells.partition_point(|&c| c < lo);
        let e = self.cells.partition_point(|&c| c <= hi);
        s..e.max(s)
    }

    /// True when `[a, b]` (absolute, closed) meets the set.
    pub fn meets_closed(&self, a: &Q, b: &Q) -> bool {
        if self.is_point() {
            let p = &self.frame.origin;
            return a <= p && p <= b;
        }
        !self.cells_meeting_closed(&self.to_units(a), &self.to_units(b)).is_empty()
    }

    /// Positive-length overlap with `[a, b]`.
    pub fn meets_interior(&self, a: &Q, b: &Q) -> bool {
        if self.is_point() {
            return false;
        }
        let (ua, ub) = (self.to_units(a), self.to_units(b));
        if ub <= ua {
            return false;
        }
        let lo = ua.floor().to_integer() as i64;
        let hi = ub.ceil().to_integer() as i64 - 1;
        let s = self.cells.partition_point(|&c| c < lo);
        s < self.cells.len() && self.cells[s] <= hi
    }

    /// New set sharing the grid but keeping only cells selected by `keep`.
    pub(crate) fn filter_cells(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let mut cells = Vec::new();
        let mut weights = Vec::new();
        for i in 0..self.len() {
            if keep(i) {
                cells.push(self.cells[i]);
                weights.push(self.weights[i]);
            }
        }
        Self::new(self.base, self.depth, self.frame.clone(), cells, weights)
    }

    pub(crate) fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.base, self.depth, self.frame.clone(), self.cells.clone(), weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Regularity parameters a lemma asserts for its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityClaim {
    pub delta: f64,
    pub c_r: f64,
    #[serde(with = "rational::serde_q")]
    pub alpha0: Q,
    #[serde(with = "rational::serde_q")]
    pub alpha1: Q,
}

impl RegularityClaim {
    pub fn new(delta: f64, c_r: f64, alpha0: Q, alpha1: Q) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(invalid("delta", format!("{delta} outside [0,1]")));
        }
        if !(c_r >= 1.0 && c_r.is_finite()) {
            return Err(invalid("c_r", format!("{c_r} is not a finite value ≥ 1")));
        }
        if alpha0.is_negative() || alpha0 > alpha1 {
            return Err(invalid("alpha", "need 0 ≤ α₀ ≤ α₁"));
        }
        Ok(RegularityClaim {
            delta,
            c_r,
            alpha0,
            alpha1,
        })
    }

    pub fn verify(&self, set: &RegularSetApprox) -> Result<RegularityCertificate> {
        verify_regularity(set, self.delta, self.c_r, self.alpha0, self.alpha1)
    }
}

/// A set together with the regularity its construction claims.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimedSet {
    pub set: RegularSetApprox,
    pub claim: RegularityClaim,
}

impl ClaimedSet {
    pub fn new(set: RegularSetApprox, claim: RegularityClaim) -> Self {
        ClaimedSet { set, claim }
    }

    pub fn verify(&self) -> Result<RegularityCertificate> {
        self.claim.verify(&self.set)
    }
}
