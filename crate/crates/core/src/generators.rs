//! Canonical regular inputs: base-L Cantor sets and Schottky limit-set covers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rational::{pow, qi, to_f64, Q};
use crate::regular_sets::{
    scan_regularity_all_sizes, ClaimedSet, Frame, RegularSetApprox, RegularityClaim,
};

/// Depth at which a Cantor set's constant is measured once and reused.
pub const CANTOR_REFERENCE_DEPTH: u32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorSpec {
    pub base: u32,
    pub alphabet: Vec<u32>,
    pub depth: u32,
}

impl CantorSpec {
    pub fn new(base: u32, mut alphabet: Vec<u32>, depth: u32) -> Result<Self> {
        if base < 2 {
            return Err(invalid("base", "must be at least 2"));
        }
        alphabet.sort_unstable();
        alphabet.dedup();
        if alphabet.is_empty() {
            return Err(invalid("alphabet", "must be nonempty"));
        }
        if let Some(&a) = alphabet.iter().find(|&&a| a >= base) {
            return Err(invalid("alphabet", format!("digit {a} is not below base {base}")));
        }
        if depth < 1 {
            return Err(invalid("depth", "must be at least 1"));
        }
        Ok(CantorSpec {
            base,
            alphabet,
            depth,
        })
    }

    /// Parses `"L:a,b,c"` at the given depth.
    pub fn parse(s: &str, depth: u32) -> Result<Self> {
        let (b, a) = s
            .split_once(':')
            .ok_or_else(|| invalid("cantor", format!("expected L:a,b,... got `{s}`")))?;
        let base = b
            .trim()
            .parse()
            .map_err(|_| invalid("base", format!("`{b}` is not an integer")))?;
        let alphabet = a
            .split(',')
            .map(|d| {
                d.trim()
                    .parse()
                    .map_err(|_| invalid("alphabet", format!("`{d}` is not a digit")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Self::new(base, alphabet, depth)
    }

    pub fn delta(&self) -> f64 {
        (self.alphabet.len() as f64).ln() / (self.base as f64).ln()
    }

    pub fn at_depth(&self, depth: u32) -> Self {
        CantorSpec {
            depth,
            ..self.clone()
        }
    }

    /// Integer cell indices of the depth-k words, sorted.
    pub fn cells(&self) -> Vec<i64> {
        let mut cells = vec![0i64];
        for _ in 0..self.depth {
            let mut next = Vec::with_capacity(cells.len() * self.alphabet.len());
            for &c in &cells {
                for &a in &self.alphabet {
                    next.push(c * self.base as i64 + a as i64);
                }
            }
            cells = next;
        }
        cells
    }
}

fn cantor_set(spec: &CantorSpec) -> Result<RegularSetApprox> {
    let cells = spec.cells();
    let w = (spec.alphabet.len() as f64).powi(-(spec.depth as i32));
    let weights = vec![w; cells.len()];
    RegularSetApprox::new(spec.base, spec.depth, Frame::unit(), cells, weights)
}

/// Constant measured at the reference depth over every interval size that
/// is a multiple of the cell width, not only the sizes certificates sample.
/// Transformed sets are checked at sizes that correspond to arbitrary sizes
/// of the original, so the claimed constant has to hold between samples too.
pub fn cantor_constant(base: u32, alphabet: &[u32]) -> Result<f64> {
    let spec = CantorSpec::new(base, alphabet.to_vec(), CANTOR_REFERENCE_DEPTH)?;
    let set = cantor_set(&spec)?;
    let a0 = Q::new(1, pow(base, CANTOR_REFERENCE_DEPTH));
    Ok(scan_regularity_all_sizes(&set, spec.delta(), a0, qi(1))?.constant())
}

/// The depth-k Cantor set with uniform weights `|A|^{-k}`, claimed regular
/// with `δ = log|A|/log L` and the reference-depth constant on `[L^{-k}, 1]`.
pub fn gen_cantor(spec: &CantorSpec) -> Result<ClaimedSet> {
    let set = cantor_set(spec)?;
    let c_r = cantor_constant(spec.base, &spec.alphabet)?;
    let claim = RegularityClaim::new(spec.delta(), c_r, Q::new(1, pow(spec.base, spec.depth)), qi(1))?;
    Ok(ClaimedSet::new(set, claim))
}

/// Disks centered on the real line paired by Möbius maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkySpec {
    /// `(center, radius)` for each disk.
    pub disks: Vec<(f64, f64)>,
    /// For each generator, the disk whose exterior it maps into the partner.
    pub pairs: Vec<(usize, usize)>,
    /// Real matrices `[[a, b], [c, d]]` of determinant 1, one per pair.
    pub maps: Vec<[[f64; 2]; 2]>,
    pub depth: usize,
}

type Mat = [[f64; 2]; 2];

fn mobius(m: &Mat, x: f64) -> f64 {
    (m[0][0] * x + m[0][1]) / (m[1][0] * x + m[1][1])
}

fn inverse(m: &Mat) -> Mat {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

/// Image of `[a, b]` when the pole lies outside it.
fn image_interval(m: &Mat, a: f64, b: f64) -> Option<(f64, f64)> {
    if m[1][0] != 0.0 {
        let pole = -m[1][1] / m[1][0];
        if pole >= a && pole <= b {
            return None;
        }
    }
    let (x, y) = (mobius(m, a), mobius(m, b));
    Some((x.min(y), x.max(y)))
}

impl SchottkySpec {
    /// Generators `z ↦ c_b − R_a R_b / (z − c_a)` sending the exterior of
    /// disk `a` onto the interior of disk `b`.
    pub fn from_pairs(disks: Vec<(f64, f64)>, pairs: Vec<(usize, usize)>, depth: usize) -> Result<Self> {
        let maps = pairs
            .iter()
            .map(|&(a, b)| {
                let (ca, ra) = disks[a];
                let (cb, rb) = disks[b];
                let s = (ra * rb).sqrt();
                [[cb / s, (-cb * ca - ra * rb) / s], [1.0 / s, -ca / s]]
            })
            .collect();
        let spec = SchottkySpec {
            disks,
            pairs,
            maps,
            depth,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Four disks of radius `r` centered at `±1, ±3` paired symmetrically.
    pub fn symmetric(r: f64, depth: usize) -> Result<Self> {
        Self::from_pairs(
            vec![(-3.0, r), (3.0, r), (-1.0, r), (1.0, r)],
            vec![(0, 1), (2, 3)],
            depth,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.disks.len() != 2 * self.pairs.len() || self.maps.len() != self.pairs.len() {
            return Err(invalid("schottky", "need 2r disks, r pairs and r maps"));
        }
        for (i, &(c, r)) in self.disks.iter().enumerate() {
            if !(r > 0.0) {
                return Err(invalid("schottky", format!("disk {i} has radius {r}")));
            }
            for &(c2, r2) in &self.disks[i + 1..] {
                if (c - c2).abs() <= r + r2 {
                    return Err(Error::DiskOverlap { depth: 0 });
                }
            }
        }
        let mut used = vec![false; self.disks.len()];
        for (g, &(a, b)) in self.pairs.iter().enumerate() {
            if a == b || a >= self.disks.len() || b >= self.disks.len() || used[a] || used[b] {
                return Err(invalid("schottky", "pairs must partition the disks"));
            }
            used[a] = true;
            used[b] = true;
            let m = &self.maps[g];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if (det - 1.0).abs() > 1e-9 {
                return Err(invalid("schottky", format!("map {g} has determinant {det}")));
            }
            // Boundary of disk a must land on the boundary of disk b.
            let (ca, ra) = self.disks[a];
            let (cb, rb) = self.disks[b];
            for x in [ca - ra, ca + ra] {
                let y = mobius(m, x);
                let on = (y - (cb - rb)).abs() < 1e-9 * (1.0 + cb.abs() + rb)
                    || (y - (cb + rb)).abs() < 1e-9 * (1.0 + cb.abs() + rb);
                if !on {
                    return Err(invalid("schottky", format!("map {g} does not pair disks {a} and {b}")));
                }
            }
            // A point far outside disk a must land inside disk b.
            let far = ca + ra * 3.0 + 1.0;
            let y = mobius(m, far);
            if (y - cb).abs() >= rb {
                return Err(invalid("schottky", format!("map {g} does not map exterior to interior")));
            }
        }
        Ok(())
    }

    /// Directed letters `(matrix, source disk, target disk)`.
    fn letters(&self) -> Vec<(Mat, usize, usize)> {
        let mut out = Vec::new();
        for (g, &(a, b)) in self.pairs.iter().enumerate() {
            out.push((self.maps[g], a, b));
            out.push((inverse(&self.maps[g]), b, a));
        }
        out
    }

    /// Intervals on the real line of all depth-n image disks.
    pub fn line_intervals(&self) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let letters = self.letters();
        // (interval, disk it currently sits in)
        let mut level: Vec<((f64, f64), usize)> = self
            .disks
            .iter()
            .enumerate()
            .map(|(i, &(c, r))| ((c - r, c + r), i))
            .collect();
        for d in 1..=self.depth {
            let mut next = Vec::with_capacity(level.len() * (letters.len() - 1));
            for &((a, b), home) in &level {
                for (m, src, dst) in &letters {
                    if *src == home {
                        continue;
                    }
                    let iv = image_interval(m, a, b).ok_or(Error::DiskOverlap { depth: d })?;
                    next.push((iv, *dst));
                }
            }
            level = next;
        }
        let mut ivs: Vec<(f64, f64)> = level.into_iter().map(|(iv, _)| iv).collect();
        ivs.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in ivs.windows(2) {
            if w[1].0 < w[0].1 {
                return Err(Error::DiskOverlap { depth: self.depth });
            }
        }
        Ok(ivs)
    }
}

/// Circle chart `θ = π + 2·arctan(x)` of the boundary point `x ∈ ℝ`.
pub fn circle_angle(x: f64) -> f64 {
    std::f64::consts::PI + 2.0 * x.atan()
}

/// Rounds closed intervals outward onto the dyadic grid `2^{-d}ℤ`.
fn dyadic_cover(ivs: &[(f64, f64)], d: u32, weights: &[f64]) -> Result<RegularSetApprox> {
    let n = 2f64.powi(d as i32);
    let mut mass: std::collections::BTreeMap<i64, f64> = std::collections::BTreeMap::new();
    for (&(a, b), &w) in ivs.iter().zip(weights) {
        let ja = (a * n).floor() as i64;
        let jb = ((b * n).ceil() as i64).max(ja + 1);
        let share = w / (jb - ja) as f64;
        for j in ja..jb {
            *mass.entry(j).or_insert(0.0) += share;
        }
    }
    let (cells, ws): (Vec<i64>, Vec<f64>) = mass.into_iter().filter(|(_, m)| *m > 0.0).unzip();
    let frame = Frame {
        origin: Q::from_integer(0),
        scale: qi(1),
    };
    RegularSetApprox::new(2, d, frame, cells, ws)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyCover {
    pub set: RegularSetApprox,
    pub delta: f64,
    pub residual: f64,
    /// Arc intervals before rounding onto the grid.
    pub arcs: Vec<(f64, f64)>,
    pub grid_depth: u32,
}

/// Depth-n cover of the limit set in the circle chart with weights `|arc|^δ̂`.
pub fn gen_schottky_cover(spec: &SchottkySpec) -> Result<SchottkyCover> {
    let arcs: Vec<(f64, f64)> = spec
        .line_intervals()?
        .into_iter()
        .map(|(a, b)| (circle_angle(a), circle_angle(b)))
        .collect();
    // Grid width matches the largest arc, the resolution at which the
    // depth-n cover approximates the limit set.
    let max_len = arcs.iter().map(|(a, b)| b - a).fold(0.0, f64::max);
    let mut d = 4u32;
    while 2f64.powi(-(d as i32)) > max_len && d < 40 {
        d += 1;
    }
    let flat = dyadic_cover(&arcs, d, &vec![1.0; arcs.len()])?;
    let (delta, residual) = match estimate_dimension(&flat) {
        Ok(e) => (e.delta.clamp(0.0, 1.0), e.residual),
        Err(_) => (0.0, f64::NAN),
    };
    let w: Vec<f64> = arcs.iter().map(|(a, b)| (b - a).powf(delta)).collect();
    let total: f64 = w.iter().sum();
    let w: Vec<f64> = w.iter().map(|x| x / total).collect();
    let set = dyadic_cover(&arcs, d, &w)?;
    Ok(SchottkyCover {
        set,
        delta,
        residual,
        arcs,
        grid_depth: d,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub delta: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Minimal number of closed intervals of length `r` covering the union of
/// sorted disjoint intervals; greedy placement is optimal on the line.
pub fn min_cover_count(comps: &[(f64, f64)], r: f64) -> usize {
    let mut n = 0usize;
    let mut end = f64::NEG_INFINITY;
    for &(a, b) in comps {
        if b <= end {
            continue;
        }
        let s = if a > end { a } else { end };
        let k = (((b - s) / r) - 1e-12).ceil().max(if a > end { 1.0 } else { 0.0 }) as usize;
        n += k;
        end = s + k as f64 * r;
    }
    n
}

/// Box-counting slope on quarter-octave scales between two cell widths and
/// an eighth of the hull length, using minimal interval covers.
pub fn estimate_dimension(set: &RegularSetApprox) -> Result<DimensionEstimate> {
    let comps: Vec<(f64, f64)> = set
        .components()
        .iter()
        .map(|(a, b)| (to_f64(a), to_f64(b)))
        .collect();
    let (rmin, rmax) = if set.is_point() {
        (2f64.powi(-20), 1.0)
    } else {
        let (lo, hi) = set.hull();
        (2.0 * to_f64(&set.width()), to_f64(&(hi - lo)) / 8.0)
    };
    let mut scales = Vec::new();
    let mut counts = Vec::new();
    let mut k = (4.0 * rmax.log2()).floor() as i32;
    loop {
        let r = 2f64.powf(k as f64 / 4.0);
        if r < rmin * (1.0 - 1e-12) {
            break;
        }
        counts.push(min_cover_count(&comps, r));
        scales.push(r);
        k -= 1;
    }
    if scales.len() < 3 {
        return Err(Error::InsufficientScales {
            needed: 3,
            found: scales.len(),
        });
    }
    let xs: Vec<f64> = scales.iter().map(|r| -r.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = crate::fit::least_squares(&xs, &ys)?;
    Ok(DimensionEstimate {
        delta: fit.slope,
        residual: fit.rms_residual,
        scales,
        counts,
    })
}
